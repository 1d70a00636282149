"""Exception types raised across the package."""


class PhotomirrorError(ValueError):
    """Base class for all domain errors."""


class CutoffTooSmall(PhotomirrorError):
    pass


class DimensionMismatch(PhotomirrorError):
    pass


class NotHermitian(PhotomirrorError):
    pass


class NotNormalized(PhotomirrorError):
    pass


class BasisNotOrthonormal(PhotomirrorError):
    pass


class Unreachable(PhotomirrorError):
    pass


class PreconditionFailed(PhotomirrorError):
    pass


class PacketsInterfere(PhotomirrorError):
    """The pointer packets overlap too strongly for branch selection.

    Attributes:
        pair: indices ``(i, j)`` of the first offending packet pair.
        overlap: modulus of their inner product.
        separation: distance between their centers.
    """

    def __init__(self, pair: tuple[int, int], overlap: float, separation: float):
        self.pair = pair
        self.overlap = overlap
        self.separation = separation
        super().__init__(
            f"packets {pair[0]} and {pair[1]} interfere: "
            f"|overlap|={overlap:.6g}, separation={separation:.6g}"
        )
