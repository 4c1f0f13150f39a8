"""Splice a PDF into a TIFF so that one byte sequence is valid as both.

Layout of a built file::

    [TIFF header, 8 bytes][entire PDF][TIFF remainder, rebased][PDF trailer copy]

Every TIFF pointer at or beyond the insertion point moves by the PDF length.
The trailer copy at the end lets PDF readers, which start from ``%%EOF``,
find the embedded cross-reference table.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, replace

from .errors import DaliError, HeaderWindowExceeded, NestedChimera, OffsetOverflow
from .pdf_lite import HEADER_WINDOW, extract_trailer_block, scan_pdf, shift_pdf_offsets
from .tiff_codec import (
    DATA_TAGS,
    ENTRY_SIZE,
    HEADER_SIZE,
    MAX_OFFSET,
    FieldType,
    ForeignSpan,
    TiffDocument,
    entry_values,
    parse_tiff,
    sorted_entries,
    sync_strip_entries,
    tag_name,
    write_tiff,
)

INSERTION_POINT = HEADER_SIZE


class SpliceMode(enum.Enum):
    VERBATIM = "verbatim"  # embedded PDF left untouched
    STRICT = "strict"  # xref/startxref shifted so offsets resolve from byte 0


@dataclass(frozen=True)
class Rewrite:
    description: str
    old: int
    new: int
    field_offset: int  # where the field sits in the source TIFF
    width: int


@dataclass(frozen=True)
class ChimeraReport:
    shift: int
    rewrites: tuple[Rewrite, ...]
    mode: SpliceMode
    pdf_span: tuple[int, int]
    tiff_span: tuple[int, int]
    trailer_copy_span: tuple[int, int]
    prior_foreign: tuple[tuple[int, int], ...] = ()

    def output_offset(self, rewrite: Rewrite) -> int:
        if rewrite.field_offset < INSERTION_POINT:
            return rewrite.field_offset
        return rewrite.field_offset + self.shift

    def to_table(self) -> str:
        """Tab-separated ledger of rewritten fields, offsets in hex."""
        lines = [
            f"# mode\t{self.mode.value}",
            f"# shift\t{self.shift}\t0x{self.shift:X}",
            f"# pdf_span\t0x{self.pdf_span[0]:X}\t0x{self.pdf_span[1]:X}",
            f"# tiff_span\t0x{self.tiff_span[0]:X}\t0x{self.tiff_span[1]:X}",
            f"# trailer_copy_span\t0x{self.trailer_copy_span[0]:X}\t0x{self.trailer_copy_span[1]:X}",
            "field\tsource_at\tchimera_at\told\tnew",
        ]
        for rw in self.rewrites:
            lines.append(
                f"{rw.description}\t0x{rw.field_offset:X}\t0x{self.output_offset(rw):X}"
                f"\t0x{rw.old:X}\t0x{rw.new:X}"
            )
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "shift": self.shift,
            "pdf_span": list(self.pdf_span),
            "tiff_span": list(self.tiff_span),
            "trailer_copy_span": list(self.trailer_copy_span),
            "prior_foreign": [list(s) for s in self.prior_foreign],
            "rewrites": [
                {
                    "field": rw.description,
                    "source_at": rw.field_offset,
                    "chimera_at": self.output_offset(rw),
                    "width": rw.width,
                    "old": rw.old,
                    "new": rw.new,
                }
                for rw in self.rewrites
            ],
        }


def rebase_tiff(
    doc: TiffDocument, shift: int, insertion_point: int = INSERTION_POINT
) -> tuple[TiffDocument, list[Rewrite]]:
    """Move every pointer at or past ``insertion_point`` forward by ``shift`` bytes."""
    if shift < 0:
        raise ValueError("shift must be >= 0")
    if shift == 0:
        return doc, []

    def moved(value: int) -> int:
        if value < insertion_point:
            return value
        if value + shift > MAX_OFFSET:
            raise OffsetOverflow(f"offset 0x{value:X} + {shift} exceeds 32 bits")
        return value + shift

    order = doc.byte_order
    rewrites: list[Rewrite] = []
    header = doc.header
    if header.first_ifd_offset >= insertion_point:
        new = moved(header.first_ifd_offset)
        rewrites.append(Rewrite("first IFD offset", header.first_ifd_offset, new, 4, 4))
        header = replace(header, first_ifd_offset=new)

    ifds = []
    for i, ifd in enumerate(doc.ifds):
        written = sorted_entries(ifd.entries, doc.preserve_order)
        entries = []
        for k, entry in enumerate(written):
            field_at = ifd.offset + 2 + ENTRY_SIZE * k + 8
            value_at = field_at if entry.inline else entry.offset
            if not entry.inline and entry.offset >= insertion_point:
                new = moved(entry.offset)
                rewrites.append(Rewrite(
                    f"IFD{i} {tag_name(entry.tag)} value offset", entry.offset, new, field_at, 4))
                entry = replace(entry, offset=new)
            if entry.tag in DATA_TAGS and entry.type in (FieldType.SHORT, FieldType.LONG):
                width = 2 if entry.type == FieldType.SHORT else 4
                for n, value in enumerate(entry_values(entry, order)):
                    if value >= insertion_point:
                        rewrites.append(Rewrite(
                            f"IFD{i} {tag_name(entry.tag)}[{n}]", value, moved(value),
                            value_at + width * n, width))
            entries.append(entry)
        next_offset = ifd.next_offset
        if next_offset:
            new = moved(next_offset)
            rewrites.append(Rewrite(
                f"IFD{i} next IFD offset", next_offset, new,
                ifd.offset + 2 + ENTRY_SIZE * len(written), 4))
            next_offset = new
        ifds.append(replace(ifd, entries=tuple(entries), next_offset=next_offset,
                            offset=moved(ifd.offset)))

    strips = tuple(replace(s, offset=moved(s.offset)) for s in doc.strips)
    foreign = tuple(replace(f, offset=moved(f.offset)) for f in doc.foreign)
    rebased = replace(
        doc,
        header=header,
        ifds=tuple(ifds),
        strips=strips,
        foreign=foreign,
        raw_length=(doc.raw_length or 0) + shift,
    )
    return sync_strip_entries(rebased), rewrites


def build_chimera(
    tiff_bytes: bytes, pdf_bytes: bytes, mode: SpliceMode = SpliceMode.VERBATIM
) -> tuple[bytes, ChimeraReport]:
    doc = parse_tiff(tiff_bytes)
    skeleton = scan_pdf(pdf_bytes)
    for span in doc.foreign:
        if b"%PDF-" in span.data or b"%%EOF" in span.data:
            raise NestedChimera(f"TIFF already hides PDF bytes at 0x{span.offset:X}")
    if INSERTION_POINT + skeleton.header.offset + 8 > HEADER_WINDOW:
        raise HeaderWindowExceeded(
            f"PDF header would land at byte {INSERTION_POINT + skeleton.header.offset}")

    pdf = bytes(pdf_bytes)
    if mode is SpliceMode.STRICT:
        pdf = shift_pdf_offsets(skeleton, pdf, INSERTION_POINT)
        skeleton = scan_pdf(pdf)
    trailer = extract_trailer_block(pdf, skeleton)

    shift = len(pdf)
    total = len(tiff_bytes) + shift + len(trailer)
    if total - 1 > MAX_OFFSET:
        raise OffsetOverflow(f"chimera of {total} bytes exceeds the 32-bit offset range")
    rebased, rewrites = rebase_tiff(doc, shift, INSERTION_POINT)
    end = rebased.raw_length
    carrier = replace(
        rebased,
        foreign=rebased.foreign + (ForeignSpan(INSERTION_POINT, pdf), ForeignSpan(end, trailer)),
        raw_length=end + len(trailer),
    )
    out = write_tiff(carrier)
    report = ChimeraReport(
        shift=shift,
        rewrites=tuple(rewrites),
        mode=mode,
        pdf_span=(INSERTION_POINT, INSERTION_POINT + shift),
        tiff_span=(INSERTION_POINT + shift, end),
        trailer_copy_span=(end, end + len(trailer)),
        prior_foreign=tuple((f.offset, f.end) for f in doc.foreign),
    )
    return out, report


@dataclass(frozen=True)
class DualValidity:
    tiff_ok: bool
    pdf_ok: bool
    tiff_error: str | None = None
    pdf_error: str | None = None
    pdf_convention: str | None = None  # zero / header / both

    @property
    def both(self) -> bool:
        return self.tiff_ok and self.pdf_ok

    def to_dict(self) -> dict:
        return {
            "tiff_ok": self.tiff_ok,
            "tiff_error": self.tiff_error,
            "pdf_ok": self.pdf_ok,
            "pdf_error": self.pdf_error,
            "pdf_convention": self.pdf_convention,
            "both": self.both,
        }


def _describe(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


def validate_chimera(data: bytes) -> DualValidity:
    """Check whether ``data`` opens as a TIFF and as a PDF; never raises."""
    tiff_ok, tiff_error = True, None
    try:
        parse_tiff(data)
    except (DaliError, struct.error) as exc:
        tiff_ok, tiff_error = False, _describe(exc)

    pdf_ok, pdf_error, convention = True, None, None
    try:
        skeleton = scan_pdf(data)
    except DaliError as exc:
        pdf_ok, pdf_error = False, _describe(exc)
    else:
        convention = skeleton.convention
        if not skeleton.resolved:
            pdf_ok, pdf_error = False, "XrefUnresolved: startxref matches no xref table"
    return DualValidity(tiff_ok, pdf_ok, tiff_error, pdf_error, convention)
