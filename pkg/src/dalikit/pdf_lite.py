"""Structural PDF scanner.

Only the skeleton is modelled: the ``%PDF-1.X`` header, classic
cross-reference tables, the trailer, ``startxref`` and ``%%EOF``.  Scanning
runs the way a reader does, from the end of the file backwards.  Content
streams are never interpreted.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import (
    FieldWidthOverflow,
    MalformedXref,
    NoEof,
    NoHeader,
    NoStartxref,
    OffsetUnderflow,
    Unsupported,
)

HEADER_WINDOW = 1024
XREF_ENTRY_SIZE = 20

_HEADER_RE = re.compile(rb"%PDF-1\.(\d)")
_EOL_RE = re.compile(rb"\r\n|\r|\n")
_XREF_KEYWORD_RE = re.compile(rb"(?:(?<=[\r\n\s])|^)xref[ \t]*(?:\r\n|\r|\n)")
_SUBSECTION_RE = re.compile(rb"[ \t]*(\d+) (\d+)[ \t]*(?:\r\n|\r|\n)")
_ENTRY_RE = re.compile(rb"(\d{10}) (\d{5}) ([fn])(?: \r| \n|\r\n)")
_STARTXREF_RE = re.compile(rb"(?<![A-Za-z])startxref\s*(\d+)")
_TRAILER_RE = re.compile(rb"(?<![A-Za-z])trailer\s*<<")
_PREV_RE = re.compile(rb"/Prev\s+(\d+)")
_OBJ_RE = re.compile(rb"\s*(\d+)\s+(\d+)\s+obj\b")


class Eol(enum.Enum):
    CR = b"\r"
    LF = b"\n"
    CRLF = b"\r\n"


def _eol_at(data: bytes, pos: int) -> Optional[Eol]:
    m = _EOL_RE.match(data, pos)
    return Eol(m.group()) if m else None


@dataclass(frozen=True)
class PdfHeader:
    offset: int
    minor: int
    eol: Eol
    major: int = 1

    @property
    def end(self) -> int:
        return self.offset + 8 + len(self.eol.value)

    @property
    def version(self) -> str:
        return f"{self.major}.{self.minor}"


@dataclass(frozen=True)
class XrefEntry:
    offset: int
    generation: int
    kind: str  # "n" in use, "f" free
    position: int  # byte position of the entry in the file

    @property
    def in_use(self) -> bool:
        return self.kind == "n"


@dataclass(frozen=True)
class XrefSubsection:
    start: int
    entries: tuple[XrefEntry, ...]


@dataclass(frozen=True)
class XrefSection:
    position: int  # of the "xref" keyword
    end: int
    subsections: tuple[XrefSubsection, ...]

    def entries(self) -> Iterator[tuple[int, XrefEntry]]:
        for sub in self.subsections:
            for k, entry in enumerate(sub.entries):
                yield sub.start + k, entry


@dataclass(frozen=True)
class NumberField:
    """A decimal offset written in the file, patchable in place."""

    position: int
    width: int
    value: int
    kind: str  # "xref", "startxref" or "prev"


@dataclass(frozen=True)
class PdfSkeleton:
    header: PdfHeader
    xref_sections: tuple[XrefSection, ...]
    trailer_span: Optional[tuple[int, int]]
    startxref_value: int
    startxref_position: int
    eof_offset: int
    eof_end: int
    earlier_eofs: tuple[int, ...]
    origin_zero: bool
    origin_header: bool
    body_span: tuple[int, int]
    fields: tuple[NumberField, ...]

    @property
    def resolved(self) -> bool:
        return self.origin_zero or self.origin_header

    @property
    def origin(self) -> Optional[int]:
        """Base that xref offsets are relative to, preferring byte 0."""
        if self.origin_zero:
            return 0
        if self.origin_header:
            return self.header.offset
        return None

    @property
    def convention(self) -> str:
        if self.header.offset == 0:
            return "zero" if self.origin_zero else "none"
        if self.origin_zero and self.origin_header:
            return "both"
        return "zero" if self.origin_zero else "header" if self.origin_header else "none"

    def resolved_section(self) -> Optional[XrefSection]:
        origin = self.origin
        if origin is None:
            return None
        for section in self.xref_sections:
            if section.position == self.startxref_value + origin:
                return section
        return None

    def in_use_entries(self) -> Iterator[tuple[int, XrefEntry]]:
        for section in self.xref_sections:
            for number, entry in section.entries():
                if entry.in_use:
                    yield number, entry


def find_header(data: bytes) -> Optional[PdfHeader]:
    """Locate ``%PDF-1.X`` fully inside the first 1,024 bytes."""
    m = _HEADER_RE.search(data[:HEADER_WINDOW])
    if m is None:
        return None
    eol = _eol_at(data, m.end())
    if eol is None:
        return None
    return PdfHeader(m.start(), int(m.group(1)), eol)


def _parse_section(data: bytes, pos: int, body_start: int) -> Optional[XrefSection]:
    """Parse the table whose keyword ends at ``body_start``; ``None`` if it is not one."""
    cursor = body_start
    subsections = []
    while True:
        m = _SUBSECTION_RE.match(data, cursor)
        if m is None:
            break
        start, count = int(m.group(1)), int(m.group(2))
        cursor = m.end()
        entries = []
        for _ in range(count):
            e = _ENTRY_RE.match(data, cursor)
            if e is None:
                raise MalformedXref(f"xref entry at 0x{cursor:X} is not a 20-byte record")
            entries.append(XrefEntry(int(e.group(1)), int(e.group(2)), e.group(3).decode(), cursor))
            cursor += XREF_ENTRY_SIZE
        subsections.append(XrefSubsection(start, tuple(entries)))
    if not subsections:
        return None
    return XrefSection(pos, cursor, tuple(subsections))


def _line_end(data: bytes, pos: int) -> int:
    eol = _eol_at(data, pos)
    return pos + (len(eol.value) if eol else 0)


def scan_pdf(data: bytes) -> PdfSkeleton:
    data = bytes(data)
    if len(data) < 16:
        raise NoHeader(f"{len(data)} bytes cannot hold a PDF")
    header = find_header(data)
    if header is None:
        raise NoHeader("no %PDF-1.X header within the first 1,024 bytes")

    eof = data.rfind(b"%%EOF")
    if eof < 0:
        raise NoEof("no %%EOF marker")
    eof_end = _line_end(data, eof + 5)
    earlier = tuple(m.start() for m in re.finditer(rb"%%EOF", data[:eof]))

    startxrefs = [m for m in _STARTXREF_RE.finditer(data, 0, eof)]
    if not startxrefs:
        raise NoStartxref("no startxref before the final %%EOF")
    last = startxrefs[-1]
    startxref_value = int(last.group(1))

    sections = []
    for m in _XREF_KEYWORD_RE.finditer(data):
        section = _parse_section(data, m.start(), m.end())
        if section is not None:
            sections.append(section)
    positions = {s.position for s in sections}

    origin_zero = startxref_value in positions
    origin_header = startxref_value + header.offset in positions
    if not (origin_zero or origin_header):
        for base in {0, header.offset}:
            target = startxref_value + base
            m = _OBJ_RE.match(data, target)
            if m and b"/XRef" in data[target:target + 512]:
                raise Unsupported("cross-reference streams are not supported")

    trailer_at = data.rfind(b"trailer", 0, last.start())
    trailer_span = (trailer_at, eof_end) if trailer_at >= 0 else None

    fields = []
    for section in sections:
        for _, entry in section.entries():
            if entry.in_use:
                fields.append(NumberField(entry.position, 10, entry.offset, "xref"))
    for m in startxrefs:
        fields.append(NumberField(m.start(1), len(m.group(1)), int(m.group(1)), "startxref"))
    for t in _TRAILER_RE.finditer(data, 0, eof):
        stop = data.find(b"startxref", t.end())
        prev = _PREV_RE.search(data, t.end(), stop if stop >= 0 else eof)
        if prev:
            fields.append(NumberField(prev.start(1), len(prev.group(1)), int(prev.group(1)), "prev"))

    body_end = min(positions) if positions else last.start()
    return PdfSkeleton(
        header=header,
        xref_sections=tuple(sections),
        trailer_span=trailer_span,
        startxref_value=startxref_value,
        startxref_position=last.start(),
        eof_offset=eof,
        eof_end=eof_end,
        earlier_eofs=earlier,
        origin_zero=origin_zero,
        origin_header=origin_header,
        body_span=(header.end, body_end),
        fields=tuple(sorted(fields, key=lambda f: f.position)),
    )


def shift_pdf_offsets(skeleton: PdfSkeleton, data: bytes, delta: int) -> bytes:
    """Add ``delta`` to every in-use xref offset, ``startxref`` and ``/Prev`` value.

    Fields keep their width (zero padded), so the file length never changes.
    """
    if delta == 0:
        return bytes(data)
    out = bytearray(data)
    for f in skeleton.fields:
        new = f.value + delta
        if new < 0:
            raise OffsetUnderflow(f"{f.kind} offset {f.value} + {delta} < 0")
        text = str(new).zfill(f.width).encode()
        if len(text) > f.width:
            raise FieldWidthOverflow(f"{f.kind} offset {new} needs more than {f.width} digits")
        out[f.position:f.position + f.width] = text
    return bytes(out)


def extract_trailer_block(data: bytes, skeleton: PdfSkeleton) -> bytes:
    """Bytes from the ``trailer`` keyword through the final ``%%EOF`` and its EOL."""
    if skeleton.trailer_span is None:
        raise NoStartxref("startxref is not preceded by a trailer dictionary")
    start, end = skeleton.trailer_span
    return bytes(data[start:end])


def revision_end(data: bytes, section: XrefSection) -> int:
    """End (after EOL) of the first ``%%EOF`` line following ``section``."""
    eof = data.find(b"%%EOF", section.end)
    if eof < 0:
        raise NoEof("xref section is never closed by %%EOF")
    return _line_end(data, eof + 5)


def reachable_spans(data: bytes, skeleton: PdfSkeleton) -> list[tuple[int, int]]:
    """Byte ranges a reader reaches: header line, indirect objects, xref tables, trailers."""
    h = skeleton.header
    spans = [(h.offset, h.end)]
    if data[h.end:h.end + 1] == b"%":
        eol = _EOL_RE.search(data, h.end)
        if eol:
            spans.append((h.end, eol.end()))
    origin = skeleton.origin or 0
    for _, entry in skeleton.in_use_entries():
        start = entry.offset + origin
        if _OBJ_RE.match(data, start) is None:
            continue
        end = data.find(b"endobj", start)
        if end >= 0:
            spans.append((start, _line_end(data, end + 6)))
    for section in skeleton.xref_sections:
        try:
            spans.append((section.position, revision_end(data, section)))
        except NoEof:
            spans.append((section.position, section.end))
    if skeleton.trailer_span is not None:
        spans.append(skeleton.trailer_span)
    return spans


def foreign_spans(data: bytes, skeleton: PdfSkeleton) -> list[tuple[int, int]]:
    """Unreached byte runs, ignoring whitespace-only gaps."""
    from .tiff_codec import complement_spans

    gaps = complement_spans(reachable_spans(data, skeleton), len(data))
    return [(a, b) for a, b in gaps if data[a:b].strip(b" \t\r\n\f\0")]


# --- fixtures -------------------------------------------------------------

def _pdf_string(text: str) -> bytes:
    raw = text.encode("latin-1")
    return raw.replace(b"\\", b"\\\\").replace(b"(", b"\\(").replace(b")", b"\\)")


def _assemble(text: bytes, producer: bytes, pad: int, spacer: int) -> bytes:
    stream = b"BT /F1 24 Tf 72 720 Td (" + text + b") Tj ET\n"
    if pad == 1:
        stream += b"\n"
    elif pad > 1:
        stream += b"%" + b" " * (pad - 2) + b"\n"
    objects = [
        b"<< /Type /Catalog /Pages 2 0 R >>",
        b"<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
        b"<< /Type /Page /Parent 2 0 R /MediaBox [0 0 612 792]"
        b" /Resources << /Font << /F1 4 0 R >> >> /Contents 5 0 R >>",
        b"<< /Type /Font /Subtype /Type1 /BaseFont /Times-Roman >>",
        b"<< /Length %d%s >>\nstream\n%sendstream" % (len(stream), b" " * spacer, stream),
        b"<< /Producer (" + producer + b") >>",
    ]
    out = bytearray(b"%PDF-1.4\n%\xe2\xe3\xcf\xd3\n")
    offsets = []
    for number, body in enumerate(objects, start=1):
        offsets.append(len(out))
        out += b"%d 0 obj\n%s\nendobj\n" % (number, body)
    xref_at = len(out)
    out += b"xref\n0 %d\n" % (len(objects) + 1)
    out += b"0000000000 65535 f\r\n"
    for off in offsets:
        out += b"%010d 00000 n\r\n" % off
    out += b"trailer\n<< /Size %d /Root 1 0 R /Info 6 0 R >>\n" % (len(objects) + 1)
    # startxref is zero padded so in-place rebasing never changes its width
    out += b"startxref\n%010d\n%%%%EOF\n" % xref_at
    return bytes(out)


def make_fixture_pdf(page_text: str, producer: str = "dalikit", *, size: Optional[int] = None) -> bytes:
    """Minimal single-page PDF showing ``page_text``.

    With ``size`` the content stream is padded so the file is exactly that long.
    """
    if not page_text or not page_text.isprintable():
        raise ValueError("page_text must be non-empty printable text")
    if not producer.isprintable():
        raise ValueError("producer must be printable text")
    text, prod = _pdf_string(page_text), _pdf_string(producer)
    base = _assemble(text, prod, 0, 0)
    if size is None:
        return base
    guess = size - len(base)
    if guess < 0:
        raise ValueError(f"cannot fit the page into {size} bytes (needs {len(base)})")
    for pad in range(max(0, guess - 4), guess + 1):
        for spacer in (0, 1):
            out = _assemble(text, prod, pad, spacer)
            if len(out) == size:
                return out
    raise ValueError(f"no padding reaches exactly {size} bytes")
