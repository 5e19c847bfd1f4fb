"""Exception hierarchy shared by every module."""
from __future__ import annotations


class TourpowError(Exception):
    """Base class for all package errors."""


class InvariantViolation(TourpowError, ValueError):
    """Input does not describe a valid tournament or bipartite graph."""


class SelfLoop(InvariantViolation):
    pass


class ConflictingOrientation(InvariantViolation):
    pass


class MissingPair(InvariantViolation):
    pass


class OutOfRange(InvariantViolation):
    pass


class DuplicateVertex(InvariantViolation):
    pass


class DegenerateCycle(TourpowError, ValueError):
    """A cycle power was requested on fewer than k+1 vertices."""


class EmptyQuerySet(TourpowError, ValueError):
    pass


class WrongSize(TourpowError, ValueError):
    pass


class TooShort(TourpowError, ValueError):
    pass


class TooSmall(TourpowError, ValueError):
    pass


class TooLargeForExact(TourpowError, ValueError):
    pass


class NotFound(TourpowError):
    pass


class FloorNotMet(TourpowError):
    pass


class PreconditionFailed(TourpowError, ValueError):
    pass


class HypothesisUnverifiable(TourpowError):
    pass


class RetriesExhausted(TourpowError):
    pass


class ParseError(TourpowError, ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class StagedFailure(TourpowError):
    """A constructive procedure gave up at a named stage.

    ``stage`` identifies the sub-procedure (``"partition"``, ``"cover"``,
    ``"link"``, ``"offside-cover"`` ...); ``detail`` is a free-form dict
    that ends up in reports.
    """

    def __init__(self, stage: str, message: str = "", **detail):
        self.stage = stage
        self.detail = detail
        super().__init__(f"[{stage}] {message}" if message else f"[{stage}]")


class ExtractionStalled(StagedFailure):
    def __init__(self, message: str = "", **detail):
        super().__init__("partition", message, **detail)


class CoverFailed(StagedFailure):
    def __init__(self, vertex: int, stage: str, message: str = ""):
        super().__init__("cover", message or f"vertex {vertex}: {stage}", vertex=vertex, substage=stage)
        self.vertex = vertex
        self.substage = stage


class LayeringCollapsed(StagedFailure):
    def __init__(self, message: str = "", **detail):
        super().__init__("link-layering", message, **detail)


class CaseSplitFailed(StagedFailure):
    def __init__(self, case: str, stage: str, message: str = ""):
        super().__init__("link", message or f"{case}: {stage}", case=case, substage=stage)
        self.case = case
        self.substage = stage


class RecursionFailed(StagedFailure):
    def __init__(self, depth: int, stage: str, message: str = ""):
        super().__init__("crossing", message or f"depth {depth}: {stage}", depth=depth, substage=stage)
        self.depth = depth
        self.substage = stage


class DegenerateStrip(StagedFailure):
    def __init__(self, message: str = "", **detail):
        super().__init__("prepare", message, **detail)


class BalanceFailed(StagedFailure):
    def __init__(self, message: str = "", **detail):
        super().__init__("balance", message, **detail)


class OffsideCoverFailed(StagedFailure):
    def __init__(self, vertex: int, case: str, message: str = ""):
        super().__init__("offside-cover", message or f"vertex {vertex}: case {case}", vertex=vertex, case=case)
        self.vertex = vertex
        self.case = case


class GoodCoverFailed(StagedFailure):
    def __init__(self, message: str = "", **detail):
        super().__init__("good-cover", message, **detail)


class ExtensionFailed(StagedFailure):
    def __init__(self, chain: int, message: str = ""):
        super().__init__("extension", message or f"chain {chain}", chain=chain)
        self.chain = chain


class BadResidualFailed(StagedFailure):
    def __init__(self, vertex: int, message: str = ""):
        super().__init__("bad-residual", message or f"vertex {vertex}", vertex=vertex)
        self.vertex = vertex


class BadModulus(TourpowError, ValueError):
    pass


class OddDegree(TourpowError, ValueError):
    pass


class NotPrime(TourpowError, ValueError):
    pass


class PartsUnequal(TourpowError, ValueError):
    pass


class PartsEven(TourpowError, ValueError):
    pass


class KrrFound(TourpowError, ValueError):
    def __init__(self, witness):
        super().__init__(f"K_r,r found: {witness}")
        self.witness = witness


class NotRegular(TourpowError, ValueError):
    pass


class DegreeEven(TourpowError, ValueError):
    pass


class GirthTooSmall(TourpowError, ValueError):
    def __init__(self, cycle):
        super().__init__(f"short cycle {cycle}")
        self.cycle = cycle


class DoubleOrientation(TourpowError):
    def __init__(self, edge):
        super().__init__(f"edge {edge} oriented twice")
        self.edge = edge


class VerdictFailed(TourpowError):
    def __init__(self, check: str, witness):
        super().__init__(f"{check}: {witness}")
        self.check = check
        self.witness = witness
