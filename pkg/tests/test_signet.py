import hashlib
import struct
from pathlib import Path

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from dalikit.chimera import build_chimera
from dalikit.errors import EnvelopeError
from dalikit.pdf_lite import make_fixture_pdf
from dalikit.signet import (
    BindingMode,
    Ed25519Signer,
    HashSigner,
    RejectReason,
    SignatureEnvelope,
    attack_demo,
    decode_envelope,
    encode_envelope,
    sign_detached,
    verify_envelope,
)
from dalikit.tiff_codec import make_fixture_tiff

GOLDEN = Path(__file__).parent / "golden"
GOLDEN_CONTENT = b"golden content\n"
PDF, TIFF = "application/pdf", "image/tiff"


def _u16(b: bytes) -> bytes:
    return struct.pack(">H", len(b)) + b


def assemble(content: bytes, binding: int, name: bytes, mime: bytes, signer: bytes) -> bytes:
    """Envelope bytes built field by field with hashlib and struct."""
    digest = hashlib.sha256(content).digest()
    message = digest if binding == 0 else hashlib.sha256(
        digest + b"\x00" + name + b"\x00" + mime).digest()
    signature = hashlib.sha256(signer + message).digest()
    return (b"DSE1" + bytes([1, binding, 1]) + _u16(name) + _u16(mime)
            + digest + _u16(signature) + _u16(signer))


@pytest.fixture(scope="module")
def chimera() -> bytes:
    return build_chimera(make_fixture_tiff(8, 8), make_fixture_pdf("100,000 Euros"))[0]


class TestGolden:
    def test_legacy_matches_manual_assembly(self):
        env = sign_detached(GOLDEN_CONTENT, "Contract.pdf", PDF, BindingMode.LEGACY, HashSigner())
        assert encode_envelope(env) == assemble(GOLDEN_CONTENT, 0, b"", b"", b"test-signer")

    def test_hardened_matches_manual_assembly(self):
        env = sign_detached(GOLDEN_CONTENT, "Contract.pdf", PDF, BindingMode.HARDENED,
                            HashSigner())
        expected = assemble(GOLDEN_CONTENT, 1, b"Contract.pdf", PDF.encode(), b"test-signer")
        assert encode_envelope(env) == expected

    @pytest.mark.parametrize("mode,name", [(BindingMode.LEGACY, "legacy.dse"),
                                           (BindingMode.HARDENED, "hardened.dse")])
    def test_checked_in_dump(self, mode, name):
        env = sign_detached(GOLDEN_CONTENT, "Contract.pdf", PDF, mode, HashSigner())
        golden = (GOLDEN / name).read_bytes()
        assert encode_envelope(env) == golden
        assert decode_envelope(golden) == env


class TestEnvelope:
    def test_legacy_has_no_binding(self, chimera):
        env = sign_detached(chimera, "Contract.pdf", PDF, BindingMode.LEGACY, HashSigner())
        assert env.bound_name is None and env.bound_mime is None

    def test_hardened_binds_name(self, chimera):
        env = sign_detached(chimera, "Contract.pdf", PDF, BindingMode.HARDENED, HashSigner())
        assert (env.bound_name, env.bound_mime) == ("Contract.pdf", PDF)

    def test_empty_content(self):
        env = sign_detached(b"", "x", PDF, BindingMode.LEGACY, HashSigner())
        assert env.digest == hashlib.sha256(b"").digest()
        assert verify_envelope(env, b"", "x", PDF, HashSigner()).accepted

    def test_invariants_enforced(self):
        digest = bytes(32)
        with pytest.raises(EnvelopeError):
            SignatureEnvelope(BindingMode.HARDENED, digest, b"", "s")
        with pytest.raises(EnvelopeError):
            SignatureEnvelope(BindingMode.LEGACY, digest, b"", "s", bound_name="a.pdf",
                              bound_mime=PDF)
        with pytest.raises(EnvelopeError):
            SignatureEnvelope(BindingMode.LEGACY, bytes(31), b"", "s")

    def test_precondition_errors(self):
        with pytest.raises(ValueError):
            sign_detached(b"x", "", PDF, BindingMode.LEGACY, HashSigner())
        with pytest.raises(ValueError):
            sign_detached(b"x", "a.doc", "application/msword", BindingMode.HARDENED, HashSigner())

    @pytest.mark.parametrize("mangle", [
        lambda b: b"DSE2" + b[4:],
        lambda b: b[:4] + b"\x02" + b[5:],
        lambda b: b[:5] + b"\x07" + b[6:],
        lambda b: b[:6] + b"\x09" + b[7:],
        lambda b: b[:-1],
        lambda b: b + b"\x00",
    ])
    def test_decode_rejects(self, mangle):
        raw = (GOLDEN / "hardened.dse").read_bytes()
        with pytest.raises(EnvelopeError):
            decode_envelope(mangle(raw))

    @settings(max_examples=200, deadline=None)
    @given(st.binary(max_size=256), st.text(min_size=1, max_size=40).filter(lambda s: "\0" not in s),
           st.sampled_from([PDF, TIFF]), st.sampled_from(list(BindingMode)))
    def test_round_trip(self, content, name, mime, mode):
        env = sign_detached(content, name, mime, mode, HashSigner("id-é"))
        raw = encode_envelope(env)
        assert decode_envelope(raw) == env
        assert encode_envelope(decode_envelope(raw)) == raw


class TestVerify:
    def test_attack_legacy_accepts_renamed(self, chimera):
        env = sign_detached(chimera, "Contract.pdf", PDF, BindingMode.LEGACY, HashSigner())
        assert verify_envelope(env, chimera, "Contract.tif", TIFF, HashSigner()).accepted

    def test_hardened_rejects_rename(self, chimera):
        env = sign_detached(chimera, "Contract.pdf", PDF, BindingMode.HARDENED, HashSigner())
        v = verify_envelope(env, chimera, "Contract.tif", TIFF, HashSigner())
        assert not v and v.reason is RejectReason.NAME_MISMATCH
        assert str(v) == "reject(NameMismatch)"

    def test_hardened_mime_mismatch(self, chimera):
        env = sign_detached(chimera, "Contract.pdf", PDF, BindingMode.HARDENED, HashSigner())
        v = verify_envelope(env, chimera, "Contract.pdf", TIFF, HashSigner())
        assert v.reason is RejectReason.MIME_MISMATCH

    @pytest.mark.parametrize("mode", list(BindingMode))
    def test_bit_flip(self, chimera, mode):
        env = sign_detached(chimera, "Contract.pdf", PDF, mode, HashSigner())
        flipped = bytearray(chimera)
        flipped[100] ^= 0x10
        v = verify_envelope(env, bytes(flipped), "Contract.pdf", PDF, HashSigner())
        assert v.reason is RejectReason.BAD_SIGNATURE

    def test_forged_binding_rejected(self, chimera):
        env = sign_detached(chimera, "Contract.pdf", PDF, BindingMode.HARDENED, HashSigner())
        tampered = SignatureEnvelope(env.binding, env.digest, env.signature, env.signer_id,
                                     "Contract.tif", TIFF)
        v = verify_envelope(tampered, chimera, "Contract.tif", TIFF, HashSigner())
        assert v.reason is RejectReason.BAD_SIGNATURE

    def test_wrong_signer(self, chimera):
        env = sign_detached(chimera, "Contract.pdf", PDF, BindingMode.LEGACY, HashSigner("a"))
        assert not verify_envelope(env, chimera, "Contract.pdf", PDF, HashSigner("b"))

    def test_ed25519_backend(self, chimera):
        signer = Ed25519Signer()
        env = sign_detached(chimera, "Contract.pdf", PDF, BindingMode.HARDENED, signer)
        verifier = Ed25519Signer(public_key=signer.public_key)
        assert verify_envelope(env, chimera, "Contract.pdf", PDF, verifier).accepted
        v = verify_envelope(env, chimera, "Contract.tif", TIFF, verifier)
        assert v.reason is RejectReason.NAME_MISMATCH
        with pytest.raises(EnvelopeError):
            verifier.sign(b"m")

    @settings(max_examples=100, deadline=None)
    @given(st.binary(max_size=64), st.text(min_size=1, max_size=20), st.text(min_size=1, max_size=20))
    def test_rename_properties(self, content, n1, n2):
        assume("\0" not in n1 and n1 != n2)
        legacy = sign_detached(content, n1, PDF, BindingMode.LEGACY, HashSigner())
        hardened = sign_detached(content, n1, PDF, BindingMode.HARDENED, HashSigner())
        assert verify_envelope(legacy, content, n2, PDF, HashSigner()).accepted
        v = verify_envelope(hardened, content, n2, PDF, HashSigner())
        assert v.reason is RejectReason.NAME_MISMATCH


class TestDemo:
    def test_transcript(self):
        tiff = make_fixture_tiff(16, 4, software="chimera-forge")
        pdf = make_fixture_pdf("100,000 Euros", "chimera-forge")
        t = attack_demo(tiff, pdf)
        assert t.dual_valid
        assert t.legacy_accept_as_pdf and t.legacy_accept_after_rename
        assert t.detect_verdict == "Polyglot"
        assert t.hardened_accept_as_pdf
        assert t.hardened_accept_after_rename is False
        assert t.hardened_reject_reason == "NameMismatch"
        assert "rename" in [s for s, _ in t.steps]

    def test_bit_flip_after_signing(self):
        t = attack_demo(make_fixture_tiff(8, 8), make_fixture_pdf("100,000 Euros"), flip_bit=77)
        assert t.legacy_accept_as_pdf is False
        assert t.legacy_accept_after_rename is False

    def test_pristine_pdf_alone(self):
        pdf = make_fixture_pdf("100,000 Euros")
        t = attack_demo(pdf, pdf)
        assert not t.dual_valid and t.chimera is None
        assert t.legacy_accept_after_rename is None
        assert t.steps[-1][0] == "rename gate"

    def test_to_dict_and_text(self):
        t = attack_demo(make_fixture_tiff(8, 8), make_fixture_pdf("x"))
        d = t.to_dict()
        assert d["legacy_accept_after_rename"] is True
        assert len(d["steps"]) == len(t.to_text().splitlines())
