import struct
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dalikit.errors import (
    BadByteOrder,
    BadMagic,
    CyclicIfdChain,
    IfdIndexOutOfRange,
    OffsetOutOfBounds,
    OffsetOverflow,
    TruncatedEntry,
    UnknownFieldType,
)
from dalikit.tiff_codec import (
    COMPRESSION,
    SAMPLES_PER_PIXEL,
    SOFTWARE,
    ByteOrder,
    FieldType,
    ForeignSpan,
    Ifd,
    IfdEntry,
    TiffDocument,
    TiffHeader,
    convert_byte_order,
    entry_values,
    get_entry,
    make_entry,
    make_fixture_tiff,
    parse_tiff,
    structure,
    write_tiff,
)

from strategies import tiff_documents


def _hand_tiff(order: str, first: int, entries, next_offset=0, pad=b"") -> bytes:
    """Assemble a one-IFD TIFF by hand with struct, independent of the codec."""
    mark = b"II" if order == "<" else b"MM"
    out = mark + struct.pack(order + "HI", 42, first)
    out += pad.ljust(first - 8, b"\0")
    out += struct.pack(order + "H", len(entries))
    for tag, ftype, count, field in entries:
        out += struct.pack(order + "HHI", tag, ftype, count) + field
    return out + struct.pack(order + "I", next_offset)


class TestHeader:
    def test_little_endian_header_at_8(self):
        data = _hand_tiff("<", 8, [(0x0100, 3, 1, struct.pack("<HH", 8, 0))])
        assert data[:8] == bytes.fromhex("49492A0008000000")
        doc = parse_tiff(data)
        assert doc.header.byte_order is ByteOrder.LITTLE
        assert doc.header.magic == 42
        assert doc.header.first_ifd_offset == 8

    def test_big_endian_header_at_0x14(self):
        data = _hand_tiff(">", 0x14, [(0x0100, 4, 1, struct.pack(">I", 8))])
        assert data[:8] == bytes.fromhex("4D4D002A00000014")
        doc = parse_tiff(data)
        assert doc.header.byte_order is ByteOrder.BIG
        assert doc.header.first_ifd_offset == 20
        assert entry_values(doc.ifds[0].entries[0], ByteOrder.BIG) == (8,)

    def test_header_serializes_to_8_bytes(self, bilevel_tiff):
        header = parse_tiff(bilevel_tiff).header
        assert header.to_bytes() == bilevel_tiff[:8]
        assert len(header.to_bytes()) == 8

    def test_zip_magic_is_bad_byte_order(self):
        with pytest.raises(BadByteOrder):
            parse_tiff(bytes.fromhex("504B0304") + bytes(40))

    def test_bad_magic(self):
        with pytest.raises(BadMagic):
            parse_tiff(b"II" + struct.pack("<HI", 43, 8) + bytes(20))

    def test_first_ifd_outside_file(self):
        with pytest.raises(OffsetOutOfBounds):
            parse_tiff(b"II" + struct.pack("<HI", 42, 4000) + bytes(20))

    def test_first_ifd_inside_header(self):
        with pytest.raises(OffsetOutOfBounds):
            parse_tiff(b"II" + struct.pack("<HI", 42, 4) + bytes(20))

    def test_short_input(self):
        with pytest.raises(TruncatedEntry):
            parse_tiff(b"II*\0")


class TestParseErrors:
    def test_self_loop_is_cyclic(self):
        data = _hand_tiff("<", 8, [(0x0100, 3, 1, bytes(4))], next_offset=8)
        with pytest.raises(CyclicIfdChain):
            parse_tiff(data)

    def test_two_ifd_cycle(self):
        ifd_a = struct.pack("<H", 1) + struct.pack("<HHI", 0x100, 3, 1) + bytes(4) + struct.pack("<I", 26)
        ifd_b = struct.pack("<H", 1) + struct.pack("<HHI", 0x100, 3, 1) + bytes(4) + struct.pack("<I", 8)
        data = b"II" + struct.pack("<HI", 42, 8) + ifd_a + ifd_b
        with pytest.raises(CyclicIfdChain):
            parse_tiff(data)

    def test_entry_count_past_end(self):
        data = b"II" + struct.pack("<HI", 42, 8) + struct.pack("<H", 50) + bytes(16)
        with pytest.raises(TruncatedEntry):
            parse_tiff(data)

    def test_value_pointer_outside_file(self):
        data = _hand_tiff("<", 8, [(0x0131, 2, 20, struct.pack("<I", 9999))])
        with pytest.raises(OffsetOutOfBounds):
            parse_tiff(data)

    def test_unknown_field_type(self):
        data = _hand_tiff("<", 8, [(0x0100, 13, 1, bytes(4))])
        with pytest.raises(UnknownFieldType):
            parse_tiff(data)


class TestFieldTypes:
    @pytest.mark.parametrize("ftype,size", [
        (1, 1), (2, 1), (3, 2), (4, 4), (5, 8), (6, 1),
        (7, 1), (8, 2), (9, 4), (10, 8), (11, 4), (12, 8),
    ])
    def test_sizes(self, ftype, size):
        assert FieldType(ftype).size == size

    def test_float_and_double_codes(self):
        assert FieldType.FLOAT == 11
        assert FieldType.DOUBLE == 12

    def test_four_byte_long_is_inline(self):
        entry = make_entry(0x100, FieldType.LONG, 7, ByteOrder.LITTLE)
        assert entry.inline and entry.data == struct.pack("<I", 7)

    def test_five_bytes_is_out_of_line(self):
        assert not make_entry(0x131, FieldType.ASCII, "abcd", ByteOrder.LITTLE).inline
        assert make_entry(0x131, FieldType.ASCII, "abc", ByteOrder.LITTLE).inline

    def test_rational_round_trip(self):
        entry = make_entry(0x11A, FieldType.RATIONAL, (300, 1), ByteOrder.BIG)
        assert entry.count == 1 and not entry.inline
        assert entry_values(entry, ByteOrder.BIG) == ((300, 1),)


class TestFixtures:
    def test_bilevel_tag_set(self, bilevel_tiff):
        doc = parse_tiff(bilevel_tiff)
        tags = {e.tag for e in doc.ifds[0].entries}
        assert tags == {0x00FE, 0x0100, 0x0101, 0x0103, 0x0106, 0x0111,
                        0x0116, 0x0117, 0x011A, 0x011B, 0x0128}
        assert doc.foreign == ()

    def test_rgb_samples(self):
        doc = parse_tiff(make_fixture_tiff(1, 1, "rgb"))
        spp = get_entry(doc, 0, SAMPLES_PER_PIXEL)
        assert entry_values(spp, doc.byte_order) == (3,)
        bps = get_entry(doc, 0, 0x0102)
        assert bps.count == 3
        assert entry_values(bps, doc.byte_order) == (8, 8, 8)

    def test_grayscale_adds_bits_per_sample(self):
        doc = parse_tiff(make_fixture_tiff(4, 4, "grayscale"))
        assert entry_values(get_entry(doc, 0, 0x0102), doc.byte_order) == (8,)
        assert get_entry(doc, 0, SAMPLES_PER_PIXEL) is None

    def test_software_out_of_line(self):
        data = make_fixture_tiff(8, 8, "bilevel", software="PageMaker 4.0")
        doc = parse_tiff(data)
        entry = get_entry(doc, 0, SOFTWARE)
        assert entry.type == FieldType.ASCII and not entry.inline
        assert entry_values(entry, doc.byte_order) == "PageMaker 4.0"
        assert data[entry.offset:entry.offset + 14] == b"PageMaker 4.0\0"

    def test_deterministic(self):
        assert make_fixture_tiff(9, 5, "rgb", "x", "y") == make_fixture_tiff(9, 5, "rgb", "x", "y")

    def test_multiple_strips(self):
        doc = parse_tiff(make_fixture_tiff(8, 9, "grayscale", rows_per_strip=3))
        assert len(doc.strips) == 3
        assert [len(s.data) for s in doc.strips] == [24, 24, 24]

    @pytest.mark.parametrize("width,height", [(0, 1), (1, 0)])
    def test_bad_dimensions(self, width, height):
        with pytest.raises(ValueError):
            make_fixture_tiff(width, height)


class TestGetEntry:
    def test_compression(self, bilevel_tiff):
        doc = parse_tiff(bilevel_tiff)
        entry = get_entry(doc, 0, COMPRESSION)
        assert entry.tag == COMPRESSION
        assert entry_values(entry, doc.byte_order) == (1,)

    def test_missing_tag(self, bilevel_tiff):
        assert get_entry(parse_tiff(bilevel_tiff), 0, SAMPLES_PER_PIXEL) is None

    def test_index_out_of_range(self, bilevel_tiff):
        with pytest.raises(IfdIndexOutOfRange):
            get_entry(parse_tiff(bilevel_tiff), 5, COMPRESSION)


class TestWrite:
    @pytest.mark.parametrize("variant", ["bilevel", "grayscale", "rgb"])
    @pytest.mark.parametrize("order", list(ByteOrder))
    def test_pristine_identity(self, variant, order):
        data = make_fixture_tiff(13, 7, variant, "sw", "2000:01:01 00:00:00",
                                 rows_per_strip=2, byte_order=order)
        assert write_tiff(parse_tiff(data)) == data

    def test_foreign_bytes_survive_identity(self, bilevel_tiff):
        data = bilevel_tiff + b"trailing junk that nobody points at"
        doc = parse_tiff(data)
        assert len(doc.foreign) == 1
        assert write_tiff(doc) == data

    def test_unsorted_entries_round_trip(self):
        data = _hand_tiff("<", 8, [(0x0101, 3, 1, struct.pack("<HH", 2, 0)),
                                   (0x0100, 3, 1, struct.pack("<HH", 1, 0))])
        doc = parse_tiff(data)
        assert write_tiff(doc) == data
        resorted = write_tiff(doc, preserve_order=False)
        assert struct.unpack_from("<H", resorted, 10)[0] == 0x0100

    def test_strip_offset_overflow(self, bilevel_tiff):
        doc = parse_tiff(bilevel_tiff)
        strips = tuple(replace(s, offset=2**32) for s in doc.strips)
        with pytest.raises(OffsetOverflow):
            write_tiff(replace(doc, strips=strips))

    def test_offsets_within_output(self, rgb_tiff):
        doc = parse_tiff(rgb_tiff)
        n = len(rgb_tiff)
        pointers = [doc.header.first_ifd_offset] + [s.offset for s in doc.strips]
        pointers += [e.offset for e in doc.ifds[0].entries if not e.inline]
        assert all(8 <= p < n for p in pointers)


class TestByteOrder:
    @pytest.mark.parametrize("variant", ["bilevel", "grayscale", "rgb"])
    def test_le_be_le_structural(self, variant):
        doc = parse_tiff(make_fixture_tiff(5, 3, variant, "sw", "dt"))
        big = parse_tiff(write_tiff(convert_byte_order(doc, ByteOrder.BIG)))
        assert big.byte_order is ByteOrder.BIG
        back = parse_tiff(write_tiff(convert_byte_order(big, ByteOrder.LITTLE)))
        assert structure(back) == structure(doc)

    def test_big_endian_values_readable(self):
        doc = parse_tiff(make_fixture_tiff(300, 2, "grayscale", byte_order=ByteOrder.BIG))
        assert entry_values(get_entry(doc, 0, 0x0100), ByteOrder.BIG) == (300,)


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(list(FieldType)), st.integers(1, 9), st.sampled_from(list(ByteOrder)))
def test_inline_rule(ftype, count, order):
    raw = bytes((i * 7 + 1) & 0xFF for i in range(ftype.size * count))
    entry = IfdEntry(0x9000, int(ftype), count, raw.ljust(4, b"\0"))
    data = write_tiff(_single_entry_doc(entry, order))
    got = parse_tiff(data).ifds[0].entries[0]
    field = data[8 + 2 + 8:8 + 2 + 12]
    if ftype.size * count <= 4:
        assert got.inline and field == raw.ljust(4, b"\0")
    else:
        assert not got.inline
        assert field == struct.pack(order.fmt + "I", got.offset)
    assert got.value_bytes == raw


def _single_entry_doc(entry, order):
    return TiffDocument(TiffHeader(order, 0), (Ifd((entry,)),))


@settings(max_examples=200, deadline=None)
@given(tiff_documents(), st.binary(min_size=1, max_size=64))
def test_foreign_accounting_property(doc, junk):
    data = write_tiff(doc)
    doc2 = parse_tiff(data)
    laid = replace(doc2, foreign=doc2.foreign + (ForeignSpan(len(data), junk),),
                   raw_length=len(data) + len(junk))
    grown = write_tiff(laid)
    parsed = parse_tiff(grown)
    spans = parsed.reachable_spans() + [(f.offset, f.end) for f in parsed.foreign]
    assert sum(b - a for a, b in spans) == parsed.raw_length == len(grown)
    spans.sort()
    assert all(a[1] <= b[0] for a, b in zip(spans, spans[1:]))
