"""Byte-exact TIFF reader and writer.

The document model keeps every structure at the position it was read from, so
``write_tiff(parse_tiff(b)) == b`` holds for any well-formed input, including
the bytes no TIFF pointer reaches (kept as :class:`ForeignSpan` records).
Documents built in memory without positions are laid out densely by
:func:`pack`.
"""

from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .errors import (
    BadByteOrder,
    BadMagic,
    CyclicIfdChain,
    IfdIndexOutOfRange,
    OffsetOutOfBounds,
    OffsetOverflow,
    StripMismatch,
    TruncatedEntry,
    UnknownFieldType,
)

MAGIC = 42
HEADER_SIZE = 8
ENTRY_SIZE = 12
MAX_OFFSET = 0xFFFFFFFF
MAX_IFDS = 1024

NEW_SUBFILE_TYPE = 0x00FE
IMAGE_WIDTH = 0x0100
IMAGE_LENGTH = 0x0101
BITS_PER_SAMPLE = 0x0102
COMPRESSION = 0x0103
PHOTOMETRIC = 0x0106
STRIP_OFFSETS = 0x0111
SAMPLES_PER_PIXEL = 0x0115
ROWS_PER_STRIP = 0x0116
STRIP_BYTE_COUNTS = 0x0117
X_RESOLUTION = 0x011A
Y_RESOLUTION = 0x011B
RESOLUTION_UNIT = 0x0128
SOFTWARE = 0x0131
DATE_TIME = 0x0132
TILE_OFFSETS = 0x0144
TILE_BYTE_COUNTS = 0x0145

TAG_NAMES = {
    NEW_SUBFILE_TYPE: "NewSubfileType",
    IMAGE_WIDTH: "ImageWidth",
    IMAGE_LENGTH: "ImageLength",
    BITS_PER_SAMPLE: "BitsPerSample",
    COMPRESSION: "Compression",
    PHOTOMETRIC: "PhotometricInterpretation",
    STRIP_OFFSETS: "StripOffsets",
    SAMPLES_PER_PIXEL: "SamplesPerPixel",
    ROWS_PER_STRIP: "RowsPerStrip",
    STRIP_BYTE_COUNTS: "StripByteCounts",
    X_RESOLUTION: "XResolution",
    Y_RESOLUTION: "YResolution",
    RESOLUTION_UNIT: "ResolutionUnit",
    SOFTWARE: "Software",
    DATE_TIME: "DateTime",
    TILE_OFFSETS: "TileOffsets",
    TILE_BYTE_COUNTS: "TileByteCounts",
}

# offsets tag -> byte-count tag
DATA_TAGS = {STRIP_OFFSETS: STRIP_BYTE_COUNTS, TILE_OFFSETS: TILE_BYTE_COUNTS}


def tag_name(tag: int) -> str:
    return TAG_NAMES.get(tag, f"Tag{tag:04X}")


class ByteOrder(enum.Enum):
    LITTLE = b"II"
    BIG = b"MM"

    @property
    def fmt(self) -> str:
        return "<" if self is ByteOrder.LITTLE else ">"

    @property
    def other(self) -> "ByteOrder":
        return ByteOrder.BIG if self is ByteOrder.LITTLE else ByteOrder.LITTLE


class FieldType(enum.IntEnum):
    BYTE = 1
    ASCII = 2
    SHORT = 3
    LONG = 4
    RATIONAL = 5
    SBYTE = 6
    UNDEFINED = 7
    SSHORT = 8
    SLONG = 9
    SRATIONAL = 10
    FLOAT = 11
    DOUBLE = 12

    @property
    def size(self) -> int:
        return TYPE_SIZES[self]


TYPE_SIZES = {
    FieldType.BYTE: 1,
    FieldType.ASCII: 1,
    FieldType.SHORT: 2,
    FieldType.LONG: 4,
    FieldType.RATIONAL: 8,
    FieldType.SBYTE: 1,
    FieldType.UNDEFINED: 1,
    FieldType.SSHORT: 2,
    FieldType.SLONG: 4,
    FieldType.SRATIONAL: 8,
    FieldType.FLOAT: 4,
    FieldType.DOUBLE: 8,
}

# struct code and element width used when swapping byte order
_ELEMENT = {
    FieldType.BYTE: ("B", 1),
    FieldType.ASCII: ("B", 1),
    FieldType.SHORT: ("H", 2),
    FieldType.LONG: ("I", 4),
    FieldType.RATIONAL: ("I", 4),
    FieldType.SBYTE: ("b", 1),
    FieldType.UNDEFINED: ("B", 1),
    FieldType.SSHORT: ("h", 2),
    FieldType.SLONG: ("i", 4),
    FieldType.SRATIONAL: ("i", 4),
    FieldType.FLOAT: ("f", 4),
    FieldType.DOUBLE: ("d", 8),
}


@dataclass(frozen=True)
class TiffHeader:
    byte_order: ByteOrder
    first_ifd_offset: int
    magic: int = MAGIC

    def to_bytes(self) -> bytes:
        return self.byte_order.value + struct.pack(
            self.byte_order.fmt + "HI", self.magic, self.first_ifd_offset
        )


@dataclass(frozen=True)
class IfdEntry:
    """One 12-byte directory entry.

    ``data`` holds the raw 4-byte value field when the value fits inline,
    otherwise the value bytes stored at ``offset``.
    """

    tag: int
    type: int
    count: int
    data: bytes
    offset: Optional[int] = None

    @property
    def size(self) -> int:
        return TYPE_SIZES[FieldType(self.type)] * self.count

    @property
    def inline(self) -> bool:
        return self.size <= 4

    @property
    def value_bytes(self) -> bytes:
        return self.data[: self.size]


@dataclass(frozen=True)
class Ifd:
    entries: tuple[IfdEntry, ...]
    next_offset: int = 0
    offset: Optional[int] = None

    @property
    def size(self) -> int:
        return 2 + ENTRY_SIZE * len(self.entries) + 4

    def get(self, tag: int) -> Optional[IfdEntry]:
        for entry in self.entries:
            if entry.tag == tag:
                return entry
        return None


@dataclass(frozen=True)
class Strip:
    """A strip (or tile) of image data addressed from IFD ``ifd``."""

    ifd: int
    index: int
    data: bytes
    offset: Optional[int] = None
    tag: int = STRIP_OFFSETS

    @property
    def end(self) -> int:
        return (self.offset or 0) + len(self.data)


@dataclass(frozen=True)
class ForeignSpan:
    offset: int
    data: bytes

    @property
    def end(self) -> int:
        return self.offset + len(self.data)


@dataclass(frozen=True)
class TiffDocument:
    header: TiffHeader
    ifds: tuple[Ifd, ...]
    strips: tuple[Strip, ...] = ()
    foreign: tuple[ForeignSpan, ...] = ()
    raw_length: Optional[int] = None
    preserve_order: bool = False

    @property
    def byte_order(self) -> ByteOrder:
        return self.header.byte_order

    def strips_of(self, ifd_index: int, tag: int = STRIP_OFFSETS) -> list[Strip]:
        return sorted(
            (s for s in self.strips if s.ifd == ifd_index and s.tag == tag),
            key=lambda s: s.index,
        )

    def reachable_spans(self) -> list[tuple[int, int]]:
        """Merged ``[start, end)`` ranges covered by header, IFDs, values and strips."""
        spans = [(0, HEADER_SIZE)]
        for ifd in self.ifds:
            if ifd.offset is None:
                continue
            spans.append((ifd.offset, ifd.offset + ifd.size))
            for e in ifd.entries:
                if not e.inline and e.offset is not None:
                    spans.append((e.offset, e.offset + len(e.data)))
        for s in self.strips:
            if s.data and s.offset is not None:
                spans.append((s.offset, s.end))
        return merge_spans(spans)


def merge_spans(spans: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    merged: list[list[int]] = []
    for start, end in sorted(s for s in spans if s[1] > s[0]):
        if merged and start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    return [(a, b) for a, b in merged]


def complement_spans(spans: Sequence[tuple[int, int]], length: int) -> list[tuple[int, int]]:
    gaps = []
    cursor = 0
    for start, end in merge_spans(spans):
        if start > cursor:
            gaps.append((cursor, min(start, length)))
        cursor = max(cursor, end)
    if cursor < length:
        gaps.append((cursor, length))
    return [g for g in gaps if g[1] > g[0]]


# --- value encoding -------------------------------------------------------

def _field_type(code: int) -> FieldType:
    try:
        return FieldType(code)
    except ValueError:
        raise UnknownFieldType(f"unknown field type {code}") from None


def encode_values(field_type: int, values, byte_order: ByteOrder) -> tuple[int, bytes]:
    """Encode python values for ``field_type``; returns ``(count, value_bytes)``.

    ASCII takes a ``str`` (a terminating NUL is appended), RATIONAL/SRATIONAL
    take ``(numerator, denominator)`` pairs, UNDEFINED takes ``bytes``.
    """
    ft = _field_type(field_type)
    e = byte_order.fmt
    if ft is FieldType.ASCII:
        raw = values.encode("ascii") + b"\0" if isinstance(values, str) else bytes(values)
        return len(raw), raw
    if ft is FieldType.UNDEFINED:
        raw = bytes(values)
        return len(raw), raw
    code, _ = _ELEMENT[ft]
    if ft in (FieldType.RATIONAL, FieldType.SRATIONAL):
        # a bare (num, den) tuple is one rational; a list holds several
        pairs = [values] if isinstance(values, tuple) else list(values)
        flat = [x for pair in pairs for x in pair]
        return len(pairs), struct.pack(f"{e}{len(flat)}{code}", *flat)
    values = [values] if isinstance(values, (int, float)) else list(values)
    return len(values), struct.pack(f"{e}{len(values)}{code}", *values)


def make_entry(tag: int, field_type: int, values, byte_order: ByteOrder) -> IfdEntry:
    count, raw = encode_values(field_type, values, byte_order)
    if len(raw) <= 4:
        raw = raw.ljust(4, b"\0")
    return IfdEntry(tag, int(field_type), count, raw)


def entry_values(entry: IfdEntry, byte_order: ByteOrder):
    """Decode an entry into python values (tuple, ``str`` for ASCII, ``bytes`` for UNDEFINED)."""
    ft = _field_type(entry.type)
    raw = entry.value_bytes
    if ft is FieldType.ASCII:
        return raw.split(b"\0", 1)[0].decode("latin-1")
    if ft is FieldType.UNDEFINED:
        return raw
    code, width = _ELEMENT[ft]
    flat = struct.unpack(f"{byte_order.fmt}{len(raw) // width}{code}", raw)
    if ft in (FieldType.RATIONAL, FieldType.SRATIONAL):
        return tuple(zip(flat[0::2], flat[1::2]))
    return flat


def _replace_ints(entry: IfdEntry, ints: Sequence[int], byte_order: ByteOrder) -> IfdEntry:
    """Re-encode an integer SHORT/LONG entry in place, keeping inline padding bytes."""
    ft = _field_type(entry.type)
    if ft not in (FieldType.SHORT, FieldType.LONG):
        raise OffsetOverflow(f"{tag_name(entry.tag)} has non-integer type {ft.name}")
    limit = 0xFFFF if ft is FieldType.SHORT else MAX_OFFSET
    if any(v < 0 or v > limit for v in ints):
        raise OffsetOverflow(f"{tag_name(entry.tag)} value exceeds {ft.name} range")
    code = "H" if ft is FieldType.SHORT else "I"
    raw = struct.pack(f"{byte_order.fmt}{len(ints)}{code}", *ints)
    if entry.inline:
        raw = raw + entry.data[len(raw):4]
    return replace(entry, count=len(ints), data=raw)


def swap_value_bytes(field_type: int, raw: bytes) -> bytes:
    """Reverse the byte order of each element in ``raw`` (trailing padding untouched)."""
    _, width = _ELEMENT[_field_type(field_type)]
    if width == 1:
        return raw
    usable = len(raw) - len(raw) % width
    out = bytearray(raw)
    for i in range(0, usable, width):
        out[i:i + width] = raw[i:i + width][::-1]
    return bytes(out)


# --- parsing --------------------------------------------------------------

def _check_span(start: int, length: int, total: int, what: str) -> None:
    if start < HEADER_SIZE or start + length > total:
        raise OffsetOutOfBounds(
            f"{what} at 0x{start:X} (+{length}) outside [0x8, 0x{total:X})"
        )


def _parse_ifd(data: bytes, pos: int, order: ByteOrder) -> Ifd:
    e = order.fmt
    n = len(data)
    (count,) = struct.unpack_from(e + "H", data, pos)
    end = pos + 2 + ENTRY_SIZE * count + 4
    if end > n:
        raise TruncatedEntry(f"IFD at 0x{pos:X} with {count} entries runs past end of file")
    entries = []
    for i in range(count):
        at = pos + 2 + ENTRY_SIZE * i
        tag, code, cnt = struct.unpack_from(e + "HHI", data, at)
        field = data[at + 8:at + 12]
        size = _field_type(code).size * cnt
        if size <= 4:
            entries.append(IfdEntry(tag, code, cnt, field))
        else:
            (off,) = struct.unpack(e + "I", field)
            _check_span(off, size, n, f"{tag_name(tag)} value")
            entries.append(IfdEntry(tag, code, cnt, data[off:off + size], off))
    (next_offset,) = struct.unpack_from(e + "I", data, end - 4)
    return Ifd(tuple(entries), next_offset, pos)


def _collect_strips(data: bytes, ifds: Sequence[Ifd], order: ByteOrder) -> list[Strip]:
    strips = []
    for i, ifd in enumerate(ifds):
        for off_tag, count_tag in DATA_TAGS.items():
            off_entry = ifd.get(off_tag)
            if off_entry is None:
                continue
            offsets = entry_values(off_entry, order)
            count_entry = ifd.get(count_tag)
            if count_entry is not None:
                counts = entry_values(count_entry, order)
            elif len(offsets) == 1:
                counts = (_single_strip_size(ifd, order),)
            else:
                raise StripMismatch(f"IFD {i}: {tag_name(off_tag)} without {tag_name(count_tag)}")
            if len(counts) != len(offsets):
                raise StripMismatch(
                    f"IFD {i}: {len(offsets)} {tag_name(off_tag)} vs {len(counts)} {tag_name(count_tag)}"
                )
            for k, (off, cnt) in enumerate(zip(offsets, counts)):
                if cnt:
                    _check_span(off, cnt, len(data), f"IFD {i} strip {k}")
                strips.append(Strip(i, k, data[off:off + cnt] if cnt else b"", off, off_tag))
    return strips


def _single_strip_size(ifd: Ifd, order: ByteOrder) -> int:
    def first(tag, default):
        entry = ifd.get(tag)
        return entry_values(entry, order)[0] if entry is not None else default

    width = first(IMAGE_WIDTH, 0)
    height = first(IMAGE_LENGTH, 0)
    bps = first(BITS_PER_SAMPLE, 1)
    spp = first(SAMPLES_PER_PIXEL, 1)
    return math.ceil(width * bps * spp / 8) * height


def parse_tiff(data: bytes) -> TiffDocument:
    data = bytes(data)
    n = len(data)
    if n < HEADER_SIZE:
        raise TruncatedEntry(f"{n} bytes is shorter than the 8-byte TIFF header")
    if n > MAX_OFFSET:
        raise OffsetOutOfBounds("file exceeds the 32-bit TIFF offset range")
    try:
        order = ByteOrder(data[:2])
    except ValueError:
        raise BadByteOrder(f"byte order mark {data[:2].hex()} is neither II nor MM") from None
    magic, first = struct.unpack_from(order.fmt + "HI", data, 2)
    if magic != MAGIC:
        raise BadMagic(f"magic {magic} != 42")
    if not HEADER_SIZE <= first <= n - 2:
        raise OffsetOutOfBounds(f"first IFD offset 0x{first:X} outside file of {n} bytes")

    ifds = []
    seen = set()
    pos = first
    while pos:
        if pos in seen:
            raise CyclicIfdChain(f"IFD chain revisits 0x{pos:X}")
        if len(ifds) >= MAX_IFDS:
            raise CyclicIfdChain(f"more than {MAX_IFDS} IFDs")
        seen.add(pos)
        ifd = _parse_ifd(data, pos, order)
        ifds.append(ifd)
        pos = ifd.next_offset
        if pos and not HEADER_SIZE <= pos <= n - 2:
            raise OffsetOutOfBounds(f"next IFD offset 0x{pos:X} outside file")

    doc = TiffDocument(
        TiffHeader(order, first, magic),
        tuple(ifds),
        tuple(_collect_strips(data, ifds, order)),
        raw_length=n,
        preserve_order=True,
    )
    foreign = tuple(
        ForeignSpan(a, data[a:b]) for a, b in complement_spans(doc.reachable_spans(), n)
    )
    return replace(doc, foreign=foreign)


def get_entry(doc: TiffDocument, ifd_index: int, tag: int) -> Optional[IfdEntry]:
    if not 0 <= ifd_index < len(doc.ifds):
        raise IfdIndexOutOfRange(f"IFD {ifd_index} requested, document has {len(doc.ifds)}")
    return doc.ifds[ifd_index].get(tag)


# --- writing --------------------------------------------------------------

def sorted_entries(entries: Sequence[IfdEntry], preserve_order: bool) -> tuple[IfdEntry, ...]:
    return tuple(entries) if preserve_order else tuple(sorted(entries, key=lambda e: e.tag))


def sync_strip_entries(doc: TiffDocument) -> TiffDocument:
    """Make each StripOffsets/TileOffsets entry agree with the strip positions."""
    ifds = list(doc.ifds)
    for i, ifd in enumerate(ifds):
        entries = list(ifd.entries)
        for k, entry in enumerate(entries):
            if entry.tag not in DATA_TAGS:
                continue
            strips = doc.strips_of(i, entry.tag)
            if not strips:
                continue
            if len(strips) != entry.count:
                raise StripMismatch(f"IFD {i}: {entry.count} offsets for {len(strips)} strips")
            if any(s.offset is None for s in strips):
                continue
            if any(s.offset > MAX_OFFSET for s in strips):
                raise OffsetOverflow(f"IFD {i}: strip offset beyond 32-bit range")
            new = _replace_ints(entry, [s.offset for s in strips], doc.byte_order)
            entries[k] = replace(new, offset=entry.offset)
        ifds[i] = replace(ifd, entries=tuple(entries))
    return replace(doc, ifds=tuple(ifds))


def _laid_out(doc: TiffDocument) -> bool:
    if any(ifd.offset is None for ifd in doc.ifds):
        return False
    if any(not e.inline and e.offset is None for ifd in doc.ifds for e in ifd.entries):
        return False
    return all(s.offset is not None for s in doc.strips)


def pack(doc: TiffDocument) -> TiffDocument:
    """Lay the document out densely: header, then per IFD its directory, values and strips.

    Foreign spans are dropped. Entries are sorted by tag unless the document
    asks for ``preserve_order``.
    """
    cursor = HEADER_SIZE
    ifds = []
    strips = []
    for i, ifd in enumerate(doc.ifds):
        ifd_offset = cursor
        cursor += ifd.size
        entries = []
        for e in sorted_entries(ifd.entries, doc.preserve_order):
            if e.inline:
                entries.append(replace(e, offset=None))
            else:
                entries.append(replace(e, offset=cursor))
                cursor += len(e.data)
        for tag in DATA_TAGS:
            for s in doc.strips_of(i, tag):
                strips.append(replace(s, offset=cursor))
                cursor += len(s.data)
        ifds.append(Ifd(tuple(entries), 0, ifd_offset))
    for k in range(len(ifds) - 1):
        ifds[k] = replace(ifds[k], next_offset=ifds[k + 1].offset)
    first = ifds[0].offset if ifds else 0
    packed = TiffDocument(
        replace(doc.header, first_ifd_offset=first),
        tuple(ifds),
        tuple(strips),
        (),
        cursor,
        doc.preserve_order,
    )
    return sync_strip_entries(packed)


def _extent(doc: TiffDocument) -> int:
    ends = [HEADER_SIZE]
    ends += [ifd.offset + ifd.size for ifd in doc.ifds]
    ends += [e.offset + len(e.data) for ifd in doc.ifds for e in ifd.entries if not e.inline]
    ends += [s.end for s in doc.strips]
    ends += [f.end for f in doc.foreign]
    return max(ends)


def _check_write_offsets(doc: TiffDocument) -> None:
    pointers = [doc.header.first_ifd_offset]
    for ifd in doc.ifds:
        pointers += [ifd.offset, ifd.next_offset]
        pointers += [e.offset for e in ifd.entries if not e.inline]
    pointers += [s.offset for s in doc.strips]
    if any(p > MAX_OFFSET for p in pointers) or _extent(doc) > MAX_OFFSET + 1:
        raise OffsetOverflow("offset exceeds the 32-bit TIFF range")
    below = [p for p in pointers[:1] + [ifd.offset for ifd in doc.ifds] if p < HEADER_SIZE]
    if below:
        raise OffsetOutOfBounds(f"structure placed inside the header at 0x{below[0]:X}")


def write_tiff(doc: TiffDocument, preserve_order: Optional[bool] = None) -> bytes:
    if not _laid_out(doc):
        doc = pack(doc)
    if preserve_order is None:
        preserve_order = doc.preserve_order
    _check_write_offsets(doc)
    doc = sync_strip_entries(doc)
    extent = _extent(doc)
    length = doc.raw_length if doc.raw_length is not None else extent
    if extent > length:
        raise OffsetOutOfBounds(f"structures extend to 0x{extent:X} past raw length 0x{length:X}")

    e = doc.byte_order.fmt
    buf = bytearray(length)
    for span in doc.foreign:
        buf[span.offset:span.end] = span.data
    buf[0:HEADER_SIZE] = doc.header.to_bytes()
    for ifd in doc.ifds:
        pos = ifd.offset
        entries = sorted_entries(ifd.entries, preserve_order)
        struct.pack_into(e + "H", buf, pos, len(entries))
        for k, entry in enumerate(entries):
            at = pos + 2 + ENTRY_SIZE * k
            struct.pack_into(e + "HHI", buf, at, entry.tag, entry.type, entry.count)
            if entry.inline:
                buf[at + 8:at + 12] = entry.data[:4].ljust(4, b"\0")
            else:
                struct.pack_into(e + "I", buf, at + 8, entry.offset)
                buf[entry.offset:entry.offset + len(entry.data)] = entry.data
        struct.pack_into(e + "I", buf, pos + 2 + ENTRY_SIZE * len(entries), ifd.next_offset)
    for s in doc.strips:
        if s.data:
            buf[s.offset:s.end] = s.data
    return bytes(buf)


def convert_byte_order(doc: TiffDocument, order: ByteOrder) -> TiffDocument:
    """Re-express every multi-byte value in ``order``; positions are unchanged.

    Strip data is copied verbatim (only 8-bit samples are byte-order neutral).
    """
    if order is doc.byte_order:
        return doc
    ifds = []
    for ifd in doc.ifds:
        entries = []
        for entry in ifd.entries:
            if entry.inline:
                swapped = swap_value_bytes(entry.type, entry.data[: entry.size])
                data = swapped + entry.data[entry.size:]
            else:
                data = swap_value_bytes(entry.type, entry.data)
            entries.append(replace(entry, data=data))
        ifds.append(replace(ifd, entries=tuple(entries)))
    return replace(doc, header=replace(doc.header, byte_order=order), ifds=tuple(ifds))


def structure(doc: TiffDocument) -> tuple:
    """Layout-independent view: tags, types, counts, non-offset values and strip bytes."""
    ifds = []
    for ifd in doc.ifds:
        ifds.append(tuple(
            (e.tag, e.type, e.count, None if e.tag in DATA_TAGS else e.value_bytes)
            for e in sorted(ifd.entries, key=lambda e: e.tag)
        ))
    strips = tuple((s.ifd, s.tag, s.index, s.data) for s in sorted(
        doc.strips, key=lambda s: (s.ifd, s.tag, s.index)))
    return doc.byte_order, tuple(ifds), strips


# --- fixtures -------------------------------------------------------------

VARIANTS = ("bilevel", "grayscale", "rgb")


def _pattern(row_bytes: int, height: int) -> bytes:
    # arithmetic progression per row: never spells PDF keywords
    return bytes((r * 31 + c * 13 + 7) & 0xFF for r in range(height) for c in range(row_bytes))


def make_fixture_tiff(
    width: int,
    height: int,
    variant: str = "bilevel",
    software: Optional[str] = None,
    datetime: Optional[str] = None,
    *,
    rows_per_strip: Optional[int] = None,
    byte_order: ByteOrder = ByteOrder.LITTLE,
    pixels: Optional[bytes] = None,
) -> bytes:
    """Build a small uncompressed single-IFD TIFF.

    ``bilevel`` carries exactly the ten baseline black-and-white tags plus
    NewSubfileType; ``grayscale`` adds BitsPerSample, ``rgb`` adds a
    three-value BitsPerSample and SamplesPerPixel.
    """
    if width < 1 or height < 1:
        raise ValueError("width and height must be >= 1")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    bps, spp, photometric = {"bilevel": (1, 1, 1), "grayscale": (8, 1, 1), "rgb": (8, 3, 2)}[variant]
    row_bytes = math.ceil(width * bps * spp / 8)
    if rows_per_strip is None:
        rows_per_strip = max(1, min(height, 8192 // row_bytes))
    rows_per_strip = max(1, min(rows_per_strip, height))
    if pixels is None:
        pixels = _pattern(row_bytes, height)
    elif len(pixels) != row_bytes * height:
        raise ValueError(f"expected {row_bytes * height} pixel bytes, got {len(pixels)}")

    strip_len = row_bytes * rows_per_strip
    chunks = [pixels[i:i + strip_len] for i in range(0, len(pixels), strip_len)]
    n = len(chunks)
    bo = byte_order
    entries = [
        make_entry(NEW_SUBFILE_TYPE, FieldType.LONG, 0, bo),
        make_entry(IMAGE_WIDTH, FieldType.LONG, width, bo),
        make_entry(IMAGE_LENGTH, FieldType.LONG, height, bo),
        make_entry(COMPRESSION, FieldType.SHORT, 1, bo),
        make_entry(PHOTOMETRIC, FieldType.SHORT, photometric, bo),
        make_entry(STRIP_OFFSETS, FieldType.LONG, tuple([0] * n), bo),
        make_entry(ROWS_PER_STRIP, FieldType.LONG, rows_per_strip, bo),
        make_entry(STRIP_BYTE_COUNTS, FieldType.LONG, tuple(len(c) for c in chunks), bo),
        make_entry(X_RESOLUTION, FieldType.RATIONAL, (72, 1), bo),
        make_entry(Y_RESOLUTION, FieldType.RATIONAL, (72, 1), bo),
        make_entry(RESOLUTION_UNIT, FieldType.SHORT, 2, bo),
    ]
    if variant == "grayscale":
        entries.append(make_entry(BITS_PER_SAMPLE, FieldType.SHORT, 8, bo))
    elif variant == "rgb":
        entries.append(make_entry(BITS_PER_SAMPLE, FieldType.SHORT, (8, 8, 8), bo))
        entries.append(make_entry(SAMPLES_PER_PIXEL, FieldType.SHORT, 3, bo))
    if software is not None:
        entries.append(make_entry(SOFTWARE, FieldType.ASCII, software, bo))
    if datetime is not None:
        entries.append(make_entry(DATE_TIME, FieldType.ASCII, datetime, bo))

    doc = TiffDocument(
        TiffHeader(bo, HEADER_SIZE),
        (Ifd(tuple(entries)),),
        tuple(Strip(0, k, c) for k, c in enumerate(chunks)),
    )
    return write_tiff(pack(doc))
