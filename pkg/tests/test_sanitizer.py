import pytest

from dalikit.chimera import SpliceMode, build_chimera, validate_chimera
from dalikit.detector import Verdict, check_pdfa_header, detect
from dalikit.errors import XrefUnresolved
from dalikit.pdf_lite import foreign_spans, make_fixture_pdf, scan_pdf
from dalikit.sanitizer import sanitize
from dalikit.tiff_codec import ByteOrder, make_fixture_tiff, parse_tiff, structure


@pytest.fixture(params=list(SpliceMode), ids=lambda m: m.value)
def pair(request, rgb_tiff, small_pdf):
    data, report = build_chimera(rgb_tiff, small_pdf, request.param)
    return rgb_tiff, small_pdf, data, report


class TestTiff:
    def test_restores_original_structure(self, pair):
        tiff, _, chimera, report = pair
        out = sanitize(chimera, "tiff")
        assert structure(parse_tiff(out.output)) == structure(parse_tiff(tiff))
        assert out.output == tiff
        assert report.pdf_span in out.dropped_spans
        assert report.trailer_copy_span in out.dropped_spans

    def test_disarmed(self, pair):
        out = sanitize(pair[2], "tiff").output
        assert not validate_chimera(out).both
        assert detect(out, "tiff").verdict is Verdict.CLEAN
        assert parse_tiff(out).foreign == ()

    def test_big_endian_kept(self, small_pdf):
        tiff = make_fixture_tiff(5, 5, "grayscale", byte_order=ByteOrder.BIG)
        chimera, _ = build_chimera(tiff, small_pdf)
        out = sanitize(chimera, "tiff").output
        assert out[:2] == b"MM" and out == tiff

    def test_pristine_untouched(self, rgb_tiff):
        out = sanitize(rgb_tiff, "tiff")
        assert out.size_delta == 0 and out.dropped_spans == () and out.output == rgb_tiff


class TestPdf:
    def test_header_at_zero(self, pair):
        _, pdf, chimera, _ = pair
        out = sanitize(chimera, "pdf")
        assert check_pdfa_header(out.output).ok
        assert scan_pdf(out.output).origin_zero
        assert out.dropped_spans[0] == (0, 8)
        assert out.dropped_spans[-1][1] == len(chimera)

    def test_verbatim_recovers_pdf(self, rgb_tiff, small_pdf):
        chimera, _ = build_chimera(rgb_tiff, small_pdf, SpliceMode.VERBATIM)
        assert sanitize(chimera, "pdf").output == small_pdf

    def test_strict_recovers_pdf(self, rgb_tiff, small_pdf):
        chimera, _ = build_chimera(rgb_tiff, small_pdf, SpliceMode.STRICT)
        assert sanitize(chimera, "pdf").output == small_pdf

    def test_disarmed(self, pair):
        out = sanitize(pair[2], "pdf").output
        v = validate_chimera(out)
        assert v.pdf_ok and not v.tiff_ok
        assert detect(out, "pdf").verdict is Verdict.CLEAN
        assert foreign_spans(out, scan_pdf(out)) == []

    def test_pristine_untouched(self, small_pdf):
        out = sanitize(small_pdf, "pdf")
        assert out.size_delta == 0 and out.dropped_spans == ()

    def test_unresolvable(self):
        pdf = make_fixture_pdf("x")
        broken = pdf.replace(b"startxref\n0000000", b"startxref\n0000009")
        with pytest.raises(XrefUnresolved):
            sanitize(broken, "pdf")


@pytest.mark.parametrize("claimed", ["pdf", "tiff"])
def test_idempotent(pair, claimed):
    once = sanitize(pair[2], claimed)
    twice = sanitize(once.output, claimed)
    assert twice.size_delta == 0 and twice.output == once.output


@pytest.mark.parametrize("claimed", ["pdf", "tiff"])
def test_conservation(pair, claimed):
    chimera = pair[2]
    out = sanitize(chimera, claimed)
    dropped = sum(b - a for a, b in out.dropped_spans)
    assert len(out.output) + dropped >= len(chimera) - 4 * len(pair[3].rewrites)
    spans = sorted(out.dropped_spans)
    assert all(0 <= a < b <= len(chimera) for a, b in spans)
    assert all(x[1] <= y[0] for x, y in zip(spans, spans[1:]))


def test_bad_claimed_type(small_pdf):
    with pytest.raises(ValueError):
        sanitize(small_pdf, "docx")


def test_table(pair):
    table = sanitize(pair[2], "tiff").to_table().splitlines()
    assert table[0] == "# claimed_type\ttiff"
    assert table[2] == "start\tend\tlength"
    assert table[3].startswith("0x8\t")
