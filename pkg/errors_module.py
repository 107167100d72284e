# file: errors_module.py

# -------------------------
# BASE
# -------------------------
class RingforgeError(Exception):
    """Root of every error raised by the workbench."""


# -------------------------
# INSTANCE FILES
# -------------------------
class InstanceError(RingforgeError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InstanceSyntaxError(InstanceError):
    pass


class RingLengthError(InstanceError):
    pass


class UnknownColorError(InstanceError):
    pass


class DuplicateRingError(InstanceError):
    pass


# -------------------------
# PATCHES
# -------------------------
class PatchError(RingforgeError):
    pass


class OverlapError(PatchError):
    pass


class IllegalVertexError(PatchError):
    """A placement left some vertex with no ring embedding (dead branch)."""

    def __init__(self, vertex, message=None):
        self.vertex = vertex
        super().__init__(message or f"vertex {vertex} admits no ring")


class ContradictionError(PatchError):
    """A vertex past the extension threshold has no ring completion."""

    def __init__(self, vertex, message=None):
        self.vertex = vertex
        super().__init__(message or f"no ring completes vertex {vertex}")


# -------------------------
# SEARCH
# -------------------------
class BudgetExceededError(RingforgeError):
    def __init__(self, budget, what="search"):
        self.budget = budget
        super().__init__(f"{what} exceeded budget of {budget}")


# -------------------------
# CLASSIFICATION
# -------------------------
class ClassificationError(RingforgeError):
    pass


class LemmaMismatchError(ClassificationError):
    """The engine's branch count disagrees with the lemma's count."""

    def __init__(self, lemma, expected, found):
        self.lemma = lemma
        self.expected = expected
        self.found = found
        super().__init__(f"{lemma}: expected {expected} completion classes, found {found}")


# -------------------------
# RING COMPLEXES
# -------------------------
class ComplexSpecError(RingforgeError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InconsistentSpecError(ComplexSpecError):
    pass


class AmbiguousSpecError(ComplexSpecError):
    pass


# -------------------------
# DENSITY MODEL / RENDERING
# -------------------------
class DensityParamError(RingforgeError):
    pass


class RenderError(RingforgeError):
    pass
