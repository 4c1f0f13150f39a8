"""Pre-signing scanner for PDF/TIFF polyglots.

Findings come from the real parsers, so every one carries an exact byte span.
The verdict ladder is deliberately coarse: ``Polyglot`` only when the bytes
open as both formats, ``Suspicious`` for any structural anomaly, otherwise
``Clean``.
"""

from __future__ import annotations

import enum
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .chimera import DualValidity, validate_chimera
from .errors import DaliError
from .pdf_lite import find_header, foreign_spans, scan_pdf
from .tiff_codec import (
    BITS_PER_SAMPLE,
    IMAGE_LENGTH,
    IMAGE_WIDTH,
    SAMPLES_PER_PIXEL,
    X_RESOLUTION,
    Y_RESOLUTION,
    TiffDocument,
    entry_values,
    parse_tiff,
    tag_name,
)

DEFAULT_MIN_FOREIGN = 16
EVIDENCE_BYTES = 32
TIFF_MAGICS = (b"II*\x00", b"MM\x00*")
CLAIMED_TYPES = ("pdf", "tiff", "unknown")


class Kind(enum.Enum):
    TIFF_MAGIC_AT_START = "TiffMagicAtStart"
    PDF_HEADER_DISPLACED = "PdfHeaderDisplaced"
    PDF_HEADER_INSIDE_TIFF = "PdfHeaderInsideTiff"
    TRAILING_PDF_TRAILER = "TrailingPdfTrailer"
    FOREIGN_SPAN = "ForeignSpan"
    XREF_HEADER_ORIGIN_ONLY = "XrefResolvesOnlyWithHeaderOrigin"
    PDFA1B_HEADER_VIOLATION = "PdfA1bHeaderViolation"
    TIFF_PARAMS_INSIDE_PDF = "TiffParamsInsidePdf"
    PDF_PARAMS_INSIDE_TIFF = "PdfParamsInsideTiff"


class Severity(enum.IntEnum):
    INFO = 0
    SUSPICIOUS = 1
    MALICIOUS = 2

    @property
    def label(self) -> str:
        return self.name.capitalize()


class Verdict(enum.Enum):
    CLEAN = "Clean"
    SUSPICIOUS = "Suspicious"
    POLYGLOT = "Polyglot"

    @property
    def exit_code(self) -> int:
        return {"Clean": 0, "Suspicious": 1, "Polyglot": 2}[self.value]


@dataclass(frozen=True)
class Finding:
    kind: Kind
    span: tuple[int, int]
    severity: Severity
    evidence: bytes = b""
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "span": list(self.span),
            "severity": self.severity.label,
            "evidence": self.evidence.hex(),
            "detail": self.detail,
        }


@dataclass(frozen=True)
class DetectionReport:
    claimed_type: str
    findings: tuple[Finding, ...]
    verdict: Verdict
    validity: DualValidity

    def kinds(self) -> set[Kind]:
        return {f.kind for f in self.findings}

    def to_dict(self) -> dict:
        return {
            "claimed_type": self.claimed_type,
            "verdict": self.verdict.value,
            "findings": [f.to_dict() for f in self.findings],
        }

    def to_text(self, name: str = "-") -> str:
        lines = [f"{name}: {self.verdict.value} (claimed {self.claimed_type})"]
        for f in self.findings:
            line = (f"  [{f.severity.label}] {f.kind.value} "
                    f"0x{f.span[0]:X}-0x{f.span[1]:X} {f.evidence[:16].hex()}")
            if f.detail:
                line += f"  {f.detail}"
            lines.append(line)
        return "\n".join(lines)


@dataclass(frozen=True)
class HeaderCheck:
    ok: bool
    reason: str
    offset: Optional[int] = None


_PDFA_HEADER = b"%PDF-1."


def check_pdfa_header(data: bytes) -> HeaderCheck:
    """The PDF/A-1b rule: the file must begin with ``%PDF-1.<digit>``."""
    if len(data) < len(_PDFA_HEADER) + 1:
        return HeaderCheck(False, "TooShort", len(data))
    for i, expected in enumerate(_PDFA_HEADER):
        if data[i] != expected:
            return HeaderCheck(False, "BadHeader", i)
    if not chr(data[7]).isdigit():
        return HeaderCheck(False, "BadVersion", 7)
    return HeaderCheck(True, "pass")


def claimed_type_for(path: os.PathLike | str) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".pdf":
        return "pdf"
    if suffix in (".tif", ".tiff"):
        return "tiff"
    return "unknown"


def _evidence(data: bytes, span: tuple[int, int]) -> bytes:
    return bytes(data[span[0]:min(span[1], span[0] + EVIDENCE_BYTES)])


def _tiff_params(doc: TiffDocument) -> str:
    ifd = doc.ifds[0]
    parts = []
    for tag in (IMAGE_WIDTH, IMAGE_LENGTH, BITS_PER_SAMPLE, SAMPLES_PER_PIXEL,
                X_RESOLUTION, Y_RESOLUTION):
        entry = ifd.get(tag)
        if entry is None:
            continue
        values = entry_values(entry, doc.byte_order)
        shown = ",".join(f"{v[0]}/{v[1]}" if isinstance(v, tuple) else str(v) for v in values)
        parts.append(f"{tag_name(tag)}={shown}")
    return " ".join(parts)


_PRODUCER_RE = re.compile(rb"/Producer\s*\(([^)]{0,64})\)")


def detect(data: bytes, claimed_type: str = "unknown",
           min_foreign: int = DEFAULT_MIN_FOREIGN) -> DetectionReport:
    if claimed_type not in CLAIMED_TYPES:
        raise ValueError(f"claimed_type must be one of {CLAIMED_TYPES}")
    data = bytes(data)
    n = len(data)
    validity = validate_chimera(data)
    findings: list[Finding] = []

    def add(kind, span, severity, detail=""):
        findings.append(Finding(kind, span, severity, _evidence(data, span), detail))

    doc = None
    try:
        doc = parse_tiff(data)
    except DaliError:
        pass
    skeleton = None
    try:
        skeleton = scan_pdf(data)
    except DaliError:
        pass
    header = find_header(data)

    tiff_magic = data[:4] in TIFF_MAGICS
    if tiff_magic:
        add(Kind.TIFF_MAGIC_AT_START, (0, 4),
            Severity.SUSPICIOUS if claimed_type == "pdf" else Severity.INFO)

    if header is not None and header.offset > 0:
        add(Kind.PDF_HEADER_DISPLACED, (header.offset, header.offset + 8), Severity.SUSPICIOUS,
            f"%PDF-{header.version} at byte {header.offset}")

    if doc is not None:
        if claimed_type == "pdf":
            first = doc.ifds[0]
            add(Kind.TIFF_PARAMS_INSIDE_PDF, (first.offset, first.offset + first.size),
                Severity.SUSPICIOUS, _tiff_params(doc))
        if header is not None:
            for span in doc.foreign:
                if span.offset <= header.offset < span.end:
                    add(Kind.PDF_HEADER_INSIDE_TIFF, (header.offset, header.offset + 8),
                        Severity.SUSPICIOUS, f"inside unreferenced span 0x{span.offset:X}")
        if doc.foreign and doc.foreign[-1].end == n and b"%%EOF" in doc.foreign[-1].data:
            tail = doc.foreign[-1]
            add(Kind.TRAILING_PDF_TRAILER, (tail.offset, tail.end), Severity.SUSPICIOUS)

    if claimed_type == "tiff":
        eof = data.rfind(b"%%EOF")
        startxref = data.rfind(b"startxref")
        if eof >= 0 and startxref >= 0:
            m = _PRODUCER_RE.search(data)
            detail = "format: application/pdf"
            if m:
                detail += f" producer: {m.group(1).decode('latin-1')}"
            add(Kind.PDF_PARAMS_INSIDE_TIFF, (startxref, eof + 5), Severity.SUSPICIOUS, detail)

    if skeleton is not None and skeleton.origin_header and not skeleton.origin_zero:
        add(Kind.XREF_HEADER_ORIGIN_ONLY, (skeleton.startxref_position, skeleton.eof_offset),
            Severity.INFO, f"startxref {skeleton.startxref_value} + header {skeleton.header.offset}")

    if claimed_type == "pdf":
        check = check_pdfa_header(data)
        if not check.ok:
            at = check.offset or 0
            add(Kind.PDFA1B_HEADER_VIOLATION, (at, min(n, at + 1)) if n else (0, 0),
                Severity.INFO, check.reason)

    # foreign spans under the claimed format's view of the file
    view = claimed_type
    if view == "unknown":
        view = "tiff" if doc is not None else "pdf"
    if view == "tiff" and doc is not None:
        gaps = [(f.offset, f.end) for f in doc.foreign]
    elif view == "pdf" and skeleton is not None:
        gaps = foreign_spans(data, skeleton)
    else:
        gaps = []
    for start, end in gaps:
        if end - start >= min_foreign:
            add(Kind.FOREIGN_SPAN, (start, end), Severity.SUSPICIOUS,
                f"{end - start} bytes unreachable as {view}")

    if validity.both:
        verdict = Verdict.POLYGLOT
        findings = [replace(f, severity=Severity.MALICIOUS) if f.severity is Severity.SUSPICIOUS
                    else f for f in findings]
    elif any(f.severity >= Severity.SUSPICIOUS for f in findings):
        verdict = Verdict.SUSPICIOUS
    else:
        verdict = Verdict.CLEAN
    return DetectionReport(claimed_type, tuple(findings), verdict, validity)


@dataclass(frozen=True)
class FileResult:
    path: Path
    report: Optional[DetectionReport] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        if self.report is None:
            return {"path": str(self.path), "claimed_type": claimed_type_for(self.path),
                    "verdict": None, "findings": [], "error": self.error}
        return {"path": str(self.path), **self.report.to_dict(), "error": None}


def _read(path: Path) -> bytes:
    return path.read_bytes()


def detect_file(path: Path, min_foreign: int = DEFAULT_MIN_FOREIGN,
                claimed_type: Optional[str] = None) -> FileResult:
    try:
        data = _read(path)
    except OSError as exc:
        return FileResult(path, error=f"IoError: {exc}")
    return FileResult(path, detect(data, claimed_type or claimed_type_for(path), min_foreign))


def scan_tree(root: os.PathLike | str, min_foreign: int = DEFAULT_MIN_FOREIGN,
              workers: int = 4) -> list[FileResult]:
    """Detect every regular file below ``root``; results sorted by path."""
    root = Path(root)
    paths = []
    for dirpath, _, filenames in os.walk(root):
        for name in filenames:
            p = Path(dirpath) / name
            if p.is_file():
                paths.append(p)
    paths.sort(key=str)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(lambda p: detect_file(p, min_foreign), paths))
