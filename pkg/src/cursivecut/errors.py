"""Exception hierarchy shared by all cursivecut modules."""


class CursiveCutError(Exception):
    """Base class for all library errors."""


# --- raster / IO ---

class UnreadableFile(CursiveCutError):
    pass


class UnsupportedFormat(CursiveCutError):
    pass


class EmptyImage(CursiveCutError):
    pass


class NoForeground(CursiveCutError):
    pass


# --- contours ---

class DegenerateContour(CursiveCutError):
    pass


# --- quality ---

class AmbiguousPenWidth(CursiveCutError):
    pass


class PathOutsideInk(CursiveCutError):
    pass


# --- rule tables ---

class UnknownLetter(CursiveCutError):
    pass


class NoJoin(CursiveCutError):
    pass


# --- segmentation ---

class BandTooShort(CursiveCutError):
    pass


class BandCountMismatch(CursiveCutError):
    pass


class NonSeparatingCut(CursiveCutError):
    pass


class JointError(CursiveCutError):
    """Wraps a sub-error with the index of the joint it occurred at."""

    def __init__(self, joint_index, cause):
        super().__init__(f"joint {joint_index}: {type(cause).__name__}: {cause}")
        self.joint_index = joint_index
        self.cause = cause


# --- shape statistics ---

class MismatchedLandmarkCount(CursiveCutError):
    pass


class DegenerateShape(CursiveCutError):
    pass


class NoShapes(CursiveCutError):
    pass


class MissingInputPoint(CursiveCutError):
    pass


# --- synthesis ---

class SpecInvalid(CursiveCutError):
    pass
