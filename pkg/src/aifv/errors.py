"""Exception hierarchy shared by all aifv modules."""


class AifvError(Exception):
    """Base class for every error raised by this package."""


class EmptyAlphabet(AifvError):
    """Alphabet is empty, or too small for code construction."""


class NonUnitSum(AifvError):
    """Probabilities do not sum to exactly 1."""


class NonPositiveProbability(AifvError):
    """A probability is zero or negative."""


class AlphabetMismatch(AifvError):
    """Tree symbols and distribution symbols disagree."""


class UnknownSymbol(AifvError):
    """Message symbol not present in the code's alphabet."""


class InvalidTree(AifvError):
    """A code tree violates its family's structural rules."""


class CorruptStream(AifvError):
    """Code-symbol stream cannot be decoded (trace dies with no emission)."""


class TruncatedStream(AifvError):
    """Stream or container ended before the expected content."""


class InvalidPrefix(AifvError):
    """Bit string is not a valid Elias-delta codeword."""


class SymbolOutOfRange(AifvError):
    """Code symbol outside 0..K-1, or unpackable in the v1 byte format."""


class BadMagic(AifvError):
    """Container does not start with the AIFV magic bytes."""


class VersionMismatch(AifvError):
    """Container version is not supported."""


class DepthTooSmall(AifvError):
    """Depth bound D cannot accommodate the alphabet."""


class DepthSaturated(AifvError):
    """An optimal tree used the maximum depth D, suggesting truncation."""


class BadArity(AifvError):
    """Arity/child-count parameters out of range for the family."""


class CapExceeded(AifvError):
    """Input exceeds a configured size cap."""


class Unconstructible(AifvError):
    """Solver assignment could not be turned into a tree (should not happen)."""


class DegenerateChain(AifvError):
    """Both tree-transition masses are zero; cost update undefined."""


class MaxIterExceeded(AifvError):
    """Cost iteration failed to reach a fixed point (flags a bug)."""


class TimeLimitExceeded(AifvError):
    """Solver hit its time limit before certifying optimality."""
