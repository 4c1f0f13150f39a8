"""Command-line entry point: ``dalikit <command> ...``.

Results go to stdout, diagnostics to stderr.  Exit codes: ``detect`` returns
0 (all clean), 1 (something suspicious) or 2 (a polyglot); ``verify`` returns
0 on accept and 2 on reject; usage errors return 64 and operational errors 3.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import click

from . import __version__
from .chimera import SpliceMode, build_chimera
from .detector import (
    DEFAULT_MIN_FOREIGN,
    TIFF_MAGICS,
    FileResult,
    detect_file,
    scan_tree,
)
from .errors import DaliError
from .pdf_lite import make_fixture_pdf, scan_pdf
from .sanitizer import sanitize
from .signet import (
    BindingMode,
    Ed25519Signer,
    HashSigner,
    attack_demo,
    decode_envelope,
    encode_envelope,
    sign_detached,
    verify_envelope,
)
from .tiff_codec import FieldType, entry_values, make_fixture_tiff, parse_tiff, tag_name

EXIT_USAGE = 64
EXIT_OPERATIONAL = 3

DEMO_DATETIME = "2010:11:04 10:00:00"

_format_choice = click.Choice(["pdf", "tiff"])


def _backend(key: Optional[Path], signer_id: str, private: bool):
    if key is None:
        return HashSigner(signer_id)
    from cryptography.hazmat.primitives import serialization

    raw = key.read_bytes()
    if private:
        return Ed25519Signer(private_key=serialization.load_pem_private_key(raw, password=None))
    return Ed25519Signer(public_key=serialization.load_pem_public_key(raw))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="dalikit")
def cli():
    """Build, detect and disarm PDF/TIFF polyglot files."""


@cli.command()
@click.option("--tiff", "tiff_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              required=True, help="Image the file shows when opened as TIFF.")
@click.option("--pdf", "pdf_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              required=True, help="Document the file shows when opened as PDF.")
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--strict-pdf", is_flag=True,
              help="Also shift the PDF's xref/startxref so offsets resolve from byte 0.")
@click.option("--report", type=click.Path(dir_okay=False, path_type=Path),
              help="Write the field-rewrite table (tab separated) here.")
@click.option("--figure", type=click.Path(dir_okay=False, path_type=Path),
              help="Write a byte-layout PNG here.")
def forge(tiff_path, pdf_path, output, strict_pdf, report, figure):
    """Splice a PDF after the TIFF header and rebase the TIFF offsets."""
    mode = SpliceMode.STRICT if strict_pdf else SpliceMode.VERBATIM
    data, rep = build_chimera(tiff_path.read_bytes(), pdf_path.read_bytes(), mode)
    output.write_bytes(data)
    if report:
        report.write_text(rep.to_table())
    if figure:
        from .figures import plot_chimera_layout

        plot_chimera_layout(rep, figure)
    click.echo(f"wrote {output} ({len(data)} bytes, mode {mode.value})")
    click.echo(f"shift\t{rep.shift}\t0x{rep.shift:X}")
    for rw in rep.rewrites[:1]:
        click.echo(f"{rw.description}\t0x{rw.old:X}\t0x{rw.new:X}")
    click.echo(f"rewrites\t{len(rep.rewrites)}")
    return 0


def _expand(paths: Sequence[Path], min_foreign: int, claimed: Optional[str]) -> list[FileResult]:
    results = []
    for p in paths:
        if p.is_dir():
            results.extend(scan_tree(p, min_foreign))
        else:
            results.append(detect_file(p, min_foreign, claimed))
    return results


@cli.command()
@click.argument("paths", nargs=-1, required=True, type=click.Path(path_type=Path))
@click.option("--json", "as_json", is_flag=True, help="One JSON object per file and line.")
@click.option("--min-foreign", type=click.IntRange(min=1), default=DEFAULT_MIN_FOREIGN,
              show_default=True, help="Smallest unreachable run reported as ForeignSpan.")
@click.option("--as", "claimed", type=_format_choice,
              help="Claimed type for files (default: from the extension).")
@click.option("--figure-dir", type=click.Path(file_okay=False, path_type=Path),
              help="Write one findings PNG per file here.")
def detect(paths, as_json, min_foreign, claimed, figure_dir):
    """Scan files or directories for polyglot structure before signing."""
    results = _expand(paths, min_foreign, claimed)
    code = 0
    for r in results:
        if r.report is None:
            click.echo(f"{r.path}: {r.error}", err=True)
            code = EXIT_OPERATIONAL
        if as_json:
            click.echo(json.dumps(r.to_dict(), sort_keys=True))
        elif r.report is not None:
            click.echo(r.report.to_text(str(r.path)))
        if r.report is not None:
            if code != EXIT_OPERATIONAL:
                code = max(code, r.report.verdict.exit_code)
            if figure_dir:
                from .figures import plot_findings

                plot_findings(r.report, r.path.stat().st_size,
                              figure_dir / f"{r.path.name}.findings.png", str(r.path))
    return code


def _inspect_tiff(data: bytes) -> list[str]:
    doc = parse_tiff(data)
    order = doc.byte_order
    lines = [f"TIFF byte_order={order.value.decode()} magic={doc.header.magic} "
             f"first_ifd=0x{doc.header.first_ifd_offset:X} length={len(data)}"]
    for i, ifd in enumerate(doc.ifds):
        lines.append(f"IFD{i} at 0x{ifd.offset:X} entries={len(ifd.entries)} "
                     f"next=0x{ifd.next_offset:X}")
        for e in ifd.entries:
            values = entry_values(e, order)
            if isinstance(values, bytes):
                shown = f"<{len(values)} bytes>"
            elif isinstance(values, str):
                shown = repr(values)
            else:
                shown = ",".join(f"{v[0]}/{v[1]}" if isinstance(v, tuple) else str(v)
                                 for v in values[:8]) + (",..." if len(values) > 8 else "")
            where = "inline" if e.inline else f"@0x{e.offset:X}"
            lines.append(f"  0x{e.tag:04X} {tag_name(e.tag):<26} {FieldType(e.type).name:<9} "
                         f"count={e.count:<5} {where:<10} {shown}")
    for s in doc.strips:
        lines.append(f"strip IFD{s.ifd}[{s.index}] 0x{s.offset:X} +{len(s.data)}")
    for f in doc.foreign:
        lines.append(f"foreign 0x{f.offset:X}-0x{f.end:X} ({len(f.data)} bytes)")
    return lines


def _inspect_pdf(data: bytes) -> list[str]:
    sk = scan_pdf(data)
    lines = [f"PDF header=0x{sk.header.offset:X} version={sk.header.version} "
             f"eol={sk.header.eol.name} length={len(data)}"]
    for section in sk.xref_sections:
        lines.append(f"xref at 0x{section.position:X}")
        for number, e in section.entries():
            lines.append(f"  obj {number:<4} 0x{e.offset:08X} gen={e.generation} {e.kind}")
    if sk.trailer_span:
        lines.append(f"trailer 0x{sk.trailer_span[0]:X}-0x{sk.trailer_span[1]:X}")
    lines.append(f"startxref {sk.startxref_value} (0x{sk.startxref_value:X}) "
                 f"resolves={sk.convention}")
    lines.append(f"%%EOF at 0x{sk.eof_offset:X}")
    for pos in sk.earlier_eofs:
        lines.append(f"earlier %%EOF at 0x{pos:X}")
    return lines


@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--as", "claimed", type=_format_choice,
              help="Structure to dump (default: every format that parses).")
def inspect(path, claimed):
    """Dump TIFF directory or PDF skeleton structure with hex offsets."""
    data = path.read_bytes()
    views = [claimed] if claimed else ["tiff", "pdf"]
    printed = False
    for view in views:
        try:
            lines = _inspect_tiff(data) if view == "tiff" else _inspect_pdf(data)
        except DaliError as exc:
            if claimed:
                raise
            if view == "tiff" and data[:4] in TIFF_MAGICS:
                click.echo(f"tiff: {type(exc).__name__}: {exc}", err=True)
            continue
        click.echo("\n".join(lines))
        printed = True
    if not printed:
        raise click.ClickException("neither TIFF nor PDF structure found")
    return 0


@cli.command(name="sanitize")
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--as", "claimed", type=_format_choice, required=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), required=True)
def sanitize_cmd(path, claimed, output):
    """Rewrite the file under one format, dropping every unreached byte."""
    outcome = sanitize(path.read_bytes(), claimed)
    output.write_bytes(outcome.output)
    click.echo(outcome.to_table(), nl=False)
    return 0


@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--name", required=True, help="Filename the signer believes they are signing.")
@click.option("--mime", required=True)
@click.option("--bind", is_flag=True, help="Bind filename and MIME type (hardened).")
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--signer-id", default="dalikit-test", show_default=True)
@click.option("--key", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Ed25519 private key (PEM) instead of the test signer.")
def sign(path, name, mime, bind, output, signer_id, key):
    """Write a detached .dse signature envelope."""
    mode = BindingMode.HARDENED if bind else BindingMode.LEGACY
    try:
        env = sign_detached(path.read_bytes(), name, mime, mode, _backend(key, signer_id, True))
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None
    output.write_bytes(encode_envelope(env))
    click.echo(f"wrote {output} ({mode.name.lower()})")
    return 0


@cli.command()
@click.argument("envelope", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--content", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              required=True)
@click.option("--name", required=True, help="Filename the content is presented under.")
@click.option("--mime", required=True)
@click.option("--signer-id", default="dalikit-test", show_default=True)
@click.option("--key", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Ed25519 public key (PEM) instead of the test signer.")
def verify(envelope, content, name, mime, signer_id, key):
    """Check a .dse envelope against content presented under a name and type."""
    env = decode_envelope(envelope.read_bytes())
    result = verify_envelope(env, content.read_bytes(), name, mime,
                             _backend(key, signer_id, False))
    click.echo(f"{result}\t{env.binding.name.lower()}\t{name}\t{mime}")
    return 0 if result.accepted else 2


@cli.command()
@click.option("-o", "--output", type=click.Path(file_okay=False, path_type=Path), required=True)
def demo(output):
    """Run the rename attack end to end and keep every artifact."""
    from .figures import plot_chimera_layout
    from .raster import text_bitmap

    output.mkdir(parents=True, exist_ok=True)
    width, height, pixels = text_bitmap("1 million Euros")
    tiff = make_fixture_tiff(width, height, "bilevel", "chimera-forge", DEMO_DATETIME,
                             pixels=pixels)
    pdf = make_fixture_pdf("100,000 Euros", "chimera-forge")
    t = attack_demo(tiff, pdf)
    (output / "Contract.tif").write_bytes(tiff)
    (output / "Contract.pdf").write_bytes(pdf)
    (output / "Contract.chimera").write_bytes(t.chimera)
    (output / "Contract.pdf.dse").write_bytes(encode_envelope(t.legacy_envelope))
    (output / "Contract.pdf.hardened.dse").write_bytes(encode_envelope(t.hardened_envelope))
    (output / "transcript.txt").write_text(t.to_text())
    (output / "transcript.json").write_text(json.dumps(t.to_dict(), indent=2, sort_keys=True) + "\n")
    _, report = build_chimera(tiff, pdf, SpliceMode.VERBATIM)
    (output / "Contract.chimera.tsv").write_text(report.to_table())
    plot_chimera_layout(report, output / "Contract.chimera.png")
    click.echo(t.to_text(), nl=False)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        rv = cli.main(args=args, prog_name="dalikit", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_OPERATIONAL
    except click.exceptions.Abort:
        return EXIT_OPERATIONAL
    except (OSError, DaliError) as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return EXIT_OPERATIONAL
    return rv if isinstance(rv, int) else 0


def run() -> None:
    sys.exit(main())
