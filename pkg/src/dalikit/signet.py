"""Detached signature envelope with and without filename/MIME binding.

A ``Legacy`` envelope signs only the content digest, so nothing in it depends
on the file's name; renaming ``Contract.pdf`` to ``Contract.tif`` leaves it
valid.  A ``Hardened`` envelope also signs the filename and content type.

Wire format (``.dse``)::

    "DSE1" | version u8 | binding u8 | digest_alg u8
    | name_len u16 | name | mime_len u16 | mime
    | digest[32] | sig_len u16 | signature | signer_id_len u16 | signer_id

All integers are big-endian.
"""

from __future__ import annotations

import enum
import hashlib
import hmac
import struct
from dataclasses import dataclass, field
from typing import Optional, Protocol

from .errors import EnvelopeError

MAGIC = b"DSE1"
VERSION = 1
DIGEST_SHA256 = 1
DIGEST_SIZES = {DIGEST_SHA256: 32}
MIME_TYPES = {"pdf": "application/pdf", "tiff": "image/tiff"}


class BindingMode(enum.IntEnum):
    LEGACY = 0
    HARDENED = 1


class RejectReason(enum.Enum):
    BAD_SIGNATURE = "BadSignature"
    NAME_MISMATCH = "NameMismatch"
    MIME_MISMATCH = "MimeMismatch"


class SignerBackend(Protocol):
    def id(self) -> str: ...

    def sign(self, message: bytes) -> bytes: ...

    def verify(self, message: bytes, signature: bytes) -> bool: ...


class HashSigner:
    """Deterministic stand-in signer: ``sha256(signer_id || message)``.

    Anyone can forge it; it exists so the binding property can be tested
    without key management.
    """

    def __init__(self, signer_id: str = "test-signer"):
        self._id = signer_id

    def id(self) -> str:
        return self._id

    def sign(self, message: bytes) -> bytes:
        return hashlib.sha256(self._id.encode() + message).digest()

    def verify(self, message: bytes, signature: bytes) -> bool:
        return hmac.compare_digest(self.sign(message), signature)


class Ed25519Signer:
    """Real asymmetric backend; pass ``private_key`` to sign, a public key suffices to verify."""

    def __init__(self, private_key=None, public_key=None, signer_id: Optional[str] = None):
        from cryptography.hazmat.primitives import serialization
        from cryptography.hazmat.primitives.asymmetric import ed25519

        if private_key is None and public_key is None:
            private_key = ed25519.Ed25519PrivateKey.generate()
        self._private = private_key
        self._public = public_key or private_key.public_key()
        raw = self._public.public_bytes(serialization.Encoding.Raw, serialization.PublicFormat.Raw)
        self._id = signer_id or "ed25519:" + raw.hex()

    @property
    def public_key(self):
        return self._public

    def id(self) -> str:
        return self._id

    def sign(self, message: bytes) -> bytes:
        if self._private is None:
            raise EnvelopeError("verify-only backend cannot sign")
        return self._private.sign(message)

    def verify(self, message: bytes, signature: bytes) -> bool:
        from cryptography.exceptions import InvalidSignature

        try:
            self._public.verify(signature, message)
        except InvalidSignature:
            return False
        return True


@dataclass(frozen=True)
class SignatureEnvelope:
    binding: BindingMode
    digest: bytes
    signature: bytes
    signer_id: str
    bound_name: Optional[str] = None
    bound_mime: Optional[str] = None
    digest_alg: int = DIGEST_SHA256
    version: int = VERSION

    def __post_init__(self):
        hardened = self.binding is BindingMode.HARDENED
        if hardened != (self.bound_name is not None) or hardened != (self.bound_mime is not None):
            raise EnvelopeError("bound name/mime must be present exactly for hardened envelopes")
        if len(self.digest) != DIGEST_SIZES.get(self.digest_alg, -1):
            raise EnvelopeError("digest length does not match digest algorithm")

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "binding": self.binding.name.capitalize(),
            "digest_alg": "sha256",
            "bound_name": self.bound_name,
            "bound_mime": self.bound_mime,
            "digest": self.digest.hex(),
            "signature": self.signature.hex(),
            "signer_id": self.signer_id,
        }


def _u16_field(raw: bytes, what: str) -> bytes:
    if len(raw) > 0xFFFF:
        raise EnvelopeError(f"{what} longer than 65535 bytes")
    return struct.pack(">H", len(raw)) + raw


def encode_envelope(env: SignatureEnvelope) -> bytes:
    return b"".join([
        MAGIC,
        struct.pack(">BBB", env.version, int(env.binding), env.digest_alg),
        _u16_field((env.bound_name or "").encode("utf-8"), "name"),
        _u16_field((env.bound_mime or "").encode("utf-8"), "mime"),
        env.digest,
        _u16_field(env.signature, "signature"),
        _u16_field(env.signer_id.encode("utf-8"), "signer id"),
    ])


def decode_envelope(raw: bytes) -> SignatureEnvelope:
    raw = bytes(raw)
    pos = 0

    def take(n: int) -> bytes:
        nonlocal pos
        if pos + n > len(raw):
            raise EnvelopeError("envelope truncated")
        chunk = raw[pos:pos + n]
        pos += n
        return chunk

    def take_u16_field() -> bytes:
        (length,) = struct.unpack(">H", take(2))
        return take(length)

    if take(4) != MAGIC:
        raise EnvelopeError("not a DSE1 envelope")
    version, binding_code, digest_alg = struct.unpack(">BBB", take(3))
    if version != VERSION:
        raise EnvelopeError(f"unsupported envelope version {version}")
    try:
        binding = BindingMode(binding_code)
    except ValueError:
        raise EnvelopeError(f"unknown binding {binding_code}") from None
    if digest_alg not in DIGEST_SIZES:
        raise EnvelopeError(f"unknown digest algorithm {digest_alg}")
    name = take_u16_field().decode("utf-8")
    mime = take_u16_field().decode("utf-8")
    digest = take(DIGEST_SIZES[digest_alg])
    signature = take_u16_field()
    signer_id = take_u16_field().decode("utf-8")
    if pos != len(raw):
        raise EnvelopeError(f"{len(raw) - pos} trailing bytes after envelope")
    hardened = binding is BindingMode.HARDENED
    return SignatureEnvelope(
        binding=binding,
        digest=digest,
        signature=signature,
        signer_id=signer_id,
        bound_name=name if hardened else None,
        bound_mime=mime if hardened else None,
        digest_alg=digest_alg,
        version=version,
    )


def content_digest(content: bytes) -> bytes:
    return hashlib.sha256(content).digest()


def signed_message(digest: bytes, binding: BindingMode,
                   name: Optional[str] = None, mime: Optional[str] = None) -> bytes:
    """Bytes handed to the signer backend."""
    if binding is BindingMode.LEGACY:
        return digest
    # content is pre-hashed to fixed length, so the separators cannot be forged from it
    return hashlib.sha256(
        digest + b"\0" + name.encode("utf-8") + b"\0" + mime.encode("utf-8")
    ).digest()


def sign_detached(content: bytes, filename: str, mime: str, mode: BindingMode,
                  backend: SignerBackend) -> SignatureEnvelope:
    if not filename:
        raise ValueError("filename must be non-empty")
    if "\0" in filename or "\0" in mime:
        raise ValueError("filename and mime may not contain NUL")
    if mode is BindingMode.HARDENED and mime not in MIME_TYPES.values():
        raise ValueError(f"hardened envelopes bind one of {sorted(MIME_TYPES.values())}")
    digest = content_digest(content)
    hardened = mode is BindingMode.HARDENED
    name = filename if hardened else None
    bound_mime = mime if hardened else None
    signature = backend.sign(signed_message(digest, mode, name, bound_mime))
    return SignatureEnvelope(mode, digest, signature, backend.id(), name, bound_mime)


@dataclass(frozen=True)
class Verification:
    accepted: bool
    reason: Optional[RejectReason] = None

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        return "accept" if self.accepted else f"reject({self.reason.value})"


def verify_envelope(env: SignatureEnvelope, content: bytes, presented_filename: str,
                    presented_mime: str, backend: SignerBackend) -> Verification:
    """Legacy ignores the presented name and type; Hardened requires both to match."""
    digest = content_digest(content)
    if not hmac.compare_digest(digest, env.digest):
        return Verification(False, RejectReason.BAD_SIGNATURE)
    message = signed_message(digest, env.binding, env.bound_name, env.bound_mime)
    if not backend.verify(message, env.signature):
        return Verification(False, RejectReason.BAD_SIGNATURE)
    if env.binding is BindingMode.HARDENED:
        if presented_filename != env.bound_name:
            return Verification(False, RejectReason.NAME_MISMATCH)
        if presented_mime != env.bound_mime:
            return Verification(False, RejectReason.MIME_MISMATCH)
    return Verification(True)


# --- end-to-end scenario --------------------------------------------------

@dataclass
class Transcript:
    steps: list[tuple[str, str]] = field(default_factory=list)
    chimera: Optional[bytes] = None
    legacy_envelope: Optional[SignatureEnvelope] = None
    hardened_envelope: Optional[SignatureEnvelope] = None
    dual_valid: bool = False
    legacy_accept_as_pdf: Optional[bool] = None
    legacy_accept_after_rename: Optional[bool] = None
    detect_verdict: Optional[str] = None
    hardened_accept_as_pdf: Optional[bool] = None
    hardened_accept_after_rename: Optional[bool] = None
    hardened_reject_reason: Optional[str] = None

    def log(self, step: str, outcome: str) -> None:
        self.steps.append((step, outcome))

    def summary(self) -> dict:
        return {
            "dual_valid": self.dual_valid,
            "legacy_accept_as_pdf": self.legacy_accept_as_pdf,
            "legacy_accept_after_rename": self.legacy_accept_after_rename,
            "detect_verdict": self.detect_verdict,
            "hardened_accept_as_pdf": self.hardened_accept_as_pdf,
            "hardened_accept_after_rename": self.hardened_accept_after_rename,
            "hardened_reject_reason": self.hardened_reject_reason,
        }

    def to_dict(self) -> dict:
        return {"steps": [{"step": s, "outcome": o} for s, o in self.steps], **self.summary()}

    def to_text(self) -> str:
        return "\n".join(f"{s}\t{o}" for s, o in self.steps) + "\n"


def attack_demo(tiff: bytes, pdf: bytes, backend: Optional[SignerBackend] = None,
                flip_bit: Optional[int] = None, stem: str = "Contract") -> Transcript:
    """Enact the rename attack and the binding mitigation on the given inputs.

    ``flip_bit`` tampers with the signed file (bit index) before verification.
    """
    from .chimera import SpliceMode, build_chimera, validate_chimera
    from .detector import detect
    from .errors import DaliError

    backend = backend or HashSigner()
    as_pdf, as_tif = f"{stem}.pdf", f"{stem}.tif"
    t = Transcript()
    try:
        chimera, report = build_chimera(tiff, pdf, SpliceMode.VERBATIM)
    except DaliError as exc:
        t.log("build chimera", f"failed: {type(exc).__name__}: {exc}")
        chimera = None
    else:
        t.log("build chimera", f"ok, {len(chimera)} bytes, shift {report.shift}")
    t.chimera = chimera

    validity = validate_chimera(chimera) if chimera is not None else None
    t.dual_valid = bool(validity and validity.both)
    if not t.dual_valid:
        t.log("rename gate", "rejected: file is not valid as both PDF and TIFF")
        return t
    t.log("validate", f"tiff_ok={validity.tiff_ok} pdf_ok={validity.pdf_ok}")

    legacy = sign_detached(chimera, as_pdf, MIME_TYPES["pdf"], BindingMode.LEGACY, backend)
    hardened = sign_detached(chimera, as_pdf, MIME_TYPES["pdf"], BindingMode.HARDENED, backend)
    t.legacy_envelope, t.hardened_envelope = legacy, hardened
    t.log("sign legacy", f"{as_pdf}.dse")
    t.log("sign hardened", f"{as_pdf}.dse (bound to {as_pdf}, {MIME_TYPES['pdf']})")

    signed = bytearray(chimera)
    if flip_bit is not None:
        signed[flip_bit // 8] ^= 1 << (flip_bit % 8)
        t.log("tamper", f"flipped bit {flip_bit}")
    signed = bytes(signed)

    v = verify_envelope(legacy, signed, as_pdf, MIME_TYPES["pdf"], backend)
    t.legacy_accept_as_pdf = v.accepted
    t.log(f"verify legacy as {as_pdf}", str(v))
    t.log("rename", f"{as_pdf}.dse -> {as_tif}.dse")
    v = verify_envelope(legacy, signed, as_tif, MIME_TYPES["tiff"], backend)
    t.legacy_accept_after_rename = v.accepted
    t.log(f"verify legacy as {as_tif}", str(v))

    report = detect(signed, "tiff")
    t.detect_verdict = report.verdict.value
    t.log("detect", report.verdict.value)

    v = verify_envelope(hardened, signed, as_pdf, MIME_TYPES["pdf"], backend)
    t.hardened_accept_as_pdf = v.accepted
    t.log(f"verify hardened as {as_pdf}", str(v))
    v = verify_envelope(hardened, signed, as_tif, MIME_TYPES["tiff"], backend)
    t.hardened_accept_after_rename = v.accepted
    t.hardened_reject_reason = v.reason.value if v.reason else None
    t.log(f"verify hardened as {as_tif}", str(v))
    return t
