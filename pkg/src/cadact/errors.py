"""Exception hierarchy shared across the toolchain."""


class CadactError(Exception):
    """Base class for all toolchain errors."""


# --- sequence parsing ------------------------------------------------------

class MalformedToken(CadactError):
    """Token with wrong arity, unknown command code, or bad field values."""


class DanglingLoop(CadactError):
    """Sketch tokens not terminated by an extrusion token."""


class EmptySequence(CadactError):
    """Input contains no tokens."""


class EmptyInput(CadactError):
    """An operation over a collection received nothing."""


# --- geometry lowering -----------------------------------------------------

class OutOfRange(CadactError):
    """Quantized value outside its legal domain."""


class DegenerateNormal(CadactError):
    """Sketch-plane normal collapsed below tolerance."""


class OffCanvas(CadactError):
    """Projected point falls outside the unit canvas."""


class DegenerateChord(CadactError):
    """Arc start and end coincide."""


class ReflexOverflow(CadactError):
    """Arc sweep exceeds a full turn after dequantization."""


class OpenLoop(CadactError):
    """Loop endpoints fail to close within tolerance."""


# --- action compilation / encoding -----------------------------------------

class UnsupportedGeometry(CadactError):
    """Record cannot be expressed as UI actions (e.g. off-canvas point)."""


class MalformedVector(CadactError):
    """Action vector whose used/unused pattern does not match its command."""


# --- solid kernel ----------------------------------------------------------

class SelfIntersecting(CadactError):
    """Loop polyline crosses itself."""


class ZeroDepth(CadactError):
    """Extrusion interval has no extent."""


class RemoveFromEmpty(CadactError):
    """Material removal requested with no existing solid."""


class EmptySolid(CadactError):
    """Operation requires a solid with nonempty surface."""


# --- metrics ---------------------------------------------------------------

class EmptyCloud(CadactError):
    """Point cloud with no points."""


class DegenerateCloud(CadactError):
    """Point cloud covariance has rank < 3."""


class LengthMismatch(CadactError):
    """Paired sequences have different lengths."""


# --- dataset / CLI ---------------------------------------------------------

class EmptyDataset(CadactError):
    """Dataset directory holds no episodes."""


class IdMismatch(CadactError):
    """Prediction and ground-truth episode ids do not line up."""


class InsufficientEpisodes(CadactError):
    """Dataset cannot satisfy a question family's prerequisites."""


class PrerequisiteUnmet(CadactError):
    """Episode does not satisfy a question family's geometric prerequisite."""
