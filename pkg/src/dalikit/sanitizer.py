"""Disarm a suspected polyglot by rewriting it under one format only.

Whatever the chosen parser does not reach is dropped, so the second format
has nothing left to live in.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import XrefUnresolved
from .pdf_lite import revision_end, scan_pdf, shift_pdf_offsets
from .tiff_codec import pack, parse_tiff, write_tiff


@dataclass(frozen=True)
class SanitizeOutcome:
    output: bytes
    dropped_spans: tuple[tuple[int, int], ...]
    claimed_type: str
    size_delta: int

    def to_table(self) -> str:
        lines = [f"# claimed_type\t{self.claimed_type}",
                 f"# size_delta\t{self.size_delta}",
                 "start\tend\tlength"]
        for start, end in self.dropped_spans:
            lines.append(f"0x{start:X}\t0x{end:X}\t{end - start}")
        return "\n".join(lines) + "\n"


def _sanitize_tiff(data: bytes) -> tuple[bytes, list[tuple[int, int]]]:
    doc = parse_tiff(data)
    canonical = pack(replace(doc, foreign=(), preserve_order=False))
    return write_tiff(canonical), [(f.offset, f.end) for f in doc.foreign]


def _sanitize_pdf(data: bytes) -> tuple[bytes, list[tuple[int, int]]]:
    skeleton = scan_pdf(data)
    section = skeleton.resolved_section()
    if section is None:
        raise XrefUnresolved("startxref matches no xref table under either origin")
    start = skeleton.header.offset
    end = revision_end(data, section)
    kept = data[start:end]
    if skeleton.origin == 0 and start:
        kept = shift_pdf_offsets(scan_pdf(kept), kept, -start)
    if not scan_pdf(kept).origin_zero:
        raise XrefUnresolved("rewritten file does not resolve from byte 0")
    dropped = []
    if start:
        dropped.append((0, start))
    if end < len(data):
        dropped.append((end, len(data)))
    return kept, dropped


def sanitize(data: bytes, claimed_type: str) -> SanitizeOutcome:
    data = bytes(data)
    if claimed_type == "tiff":
        output, dropped = _sanitize_tiff(data)
    elif claimed_type == "pdf":
        output, dropped = _sanitize_pdf(data)
    else:
        raise ValueError("claimed_type must be 'pdf' or 'tiff'")
    return SanitizeOutcome(output, tuple(dropped), claimed_type, len(output) - len(data))
