"""Exception hierarchy shared by all modules."""


class FlowError(Exception):
    """Base class for every error raised by the package."""


class UnstableAnisotropy(FlowError):
    """sigma + sigma'' is not strictly positive."""


class QuadratureError(FlowError):
    pass


class DegenerateEdge(FlowError):
    def __init__(self, index):
        super().__init__(f"edge {index} has zero length")
        self.index = index


class FoldedVertex(FlowError):
    def __init__(self, index, phi):
        super().__init__(f"vertex {index} folded back (phi={phi:.6g})")
        self.index = index
        self.phi = phi


class NearlyFoldedVertex(FoldedVertex):
    pass


class NonpositiveArea(FlowError):
    pass


class AllFlat(FlowError):
    pass


class SolveFailure(FlowError):
    pass


class DegenerateSpec(FlowError):
    pass


class RadiusTooSmall(FlowError):
    pass


class ConfigError(FlowError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class StepError(FlowError):
    """Wraps an error raised while advancing the flow, with the step index."""

    def __init__(self, step_index, cause):
        super().__init__(f"step {step_index}: {type(cause).__name__}: {cause}")
        self.step_index = step_index
        self.cause = cause
