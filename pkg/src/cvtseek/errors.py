"""Exception types raised by the library."""


class CvtSeekError(Exception):
    """Base class for library errors."""


class DegeneratePointError(CvtSeekError, ValueError):
    """A point too close to the origin to be projected onto the sphere."""


class DegenerateCellError(CvtSeekError, ValueError):
    """A Voronoi cell holds no mesh points."""

    def __init__(self, message, cells=()):
        super().__init__(message)
        self.cells = tuple(cells)


class DegenerateFormationError(CvtSeekError, ValueError):
    """Robot offsets do not span 3D, so the second-moment matrix is singular."""


class NumericError(CvtSeekError, ArithmeticError):
    """Non-finite value encountered where a finite one is required."""
