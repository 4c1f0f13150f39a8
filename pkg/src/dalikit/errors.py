"""Exception hierarchy shared by the parsers, the builder and the CLI."""


class DaliError(Exception):
    """Base class for every error raised by dalikit."""


# --- TIFF -----------------------------------------------------------------

class TiffError(DaliError):
    pass


class BadByteOrder(TiffError):
    pass


class BadMagic(TiffError):
    pass


class OffsetOutOfBounds(TiffError):
    pass


class CyclicIfdChain(TiffError):
    pass


class TruncatedEntry(TiffError):
    pass


class UnknownFieldType(TiffError):
    pass


class StripMismatch(TiffError):
    pass


class OffsetOverflow(TiffError):
    pass


class IfdIndexOutOfRange(TiffError, IndexError):
    pass


# --- PDF ------------------------------------------------------------------

class PdfError(DaliError):
    pass


class NoHeader(PdfError):
    pass


class NoEof(PdfError):
    pass


class NoStartxref(PdfError):
    pass


class MalformedXref(PdfError):
    pass


class Unsupported(PdfError):
    pass


class XrefUnresolved(PdfError):
    pass


class OffsetUnderflow(PdfError):
    pass


class FieldWidthOverflow(PdfError):
    pass


# --- builder / envelope ---------------------------------------------------

class ChimeraError(DaliError):
    pass


class HeaderWindowExceeded(ChimeraError):
    pass


class NestedChimera(ChimeraError):
    pass


class EnvelopeError(DaliError):
    pass
