"""Exception hierarchy shared by all modules."""


class TLReflError(ValueError):
    """Base class for every error raised by tlrefl."""


class SingularMatrixError(TLReflError):
    pass


class ShapeMismatchError(TLReflError):
    pass


class ZeroEntryError(TLReflError):
    """Hadamard inverse undefined: some entry is numerically zero."""


class DegenerateTraceError(TLReflError):
    """tr(WV) vanishes, so the V-W Hadamard condition degenerates."""


class NotHadamardError(TLReflError):
    pass


class ModelError(TLReflError):
    """A ModelSpec violates its invariants."""


class DegenerateSplitError(TLReflError):
    """Equal eigenvalue multiplicities (s == 2 m') admit no traceless block."""


class BadShapeError(TLReflError):
    pass


class OddSizeError(TLReflError):
    pass


class SingularCrossError(TLReflError):
    """B^t A is not invertible: the two eigenspaces intersect."""


class NewtonFailError(TLReflError):
    pass


class DegenerateCoefficientError(TLReflError):
    """n + 2q vanishes, so a nonzero-d class cannot carry a two-eigenvalue block."""


class RankUnstableError(TLReflError):
    """Numeric rank changed under step halving; the sample is not generic."""


class PlanError(TLReflError):
    pass


class ConfigInvalidError(TLReflError):
    pass
