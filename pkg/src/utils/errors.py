"""Exception hierarchy shared by every layer.

Library code raises these; only `src.routes.cli` turns them into exit codes.
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class TVError(Exception):
    """Root of all errors raised by the package."""

    exit_code = 3

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form used by `--json-errors`."""
        payload: Dict[str, Any] = {"error": type(self).__name__, "message": self.message}
        if self.details:
            payload["details"] = self.details
        return payload


# Input validation ------------------------------------------------------------
class InputError(TVError):
    exit_code = 2


class MalformedInput(InputError):
    def __init__(
        self, message: str, line: Optional[int] = None, column: Optional[int] = None, **details: Any
    ) -> None:
        if line is not None:
            details["line"] = line
            message = f"{message} (line {line}, column {column})"
        if column is not None:
            details["column"] = column
        super().__init__(message, **details)


class NonInvolutiveGluing(InputError):
    pass


class SelfGluedFace(InputError):
    pass


class UngluedFace(InputError):
    pass


class NotClosedManifoldLike(InputError):
    pass


# Computation -----------------------------------------------------------------
class ComputationError(TVError):
    exit_code = 3


class MoveNotApplicable(ComputationError):
    pass


class InadmissibleTriple(ComputationError):
    pass


class InadmissibleFace(ComputationError):
    pass


class PrecisionCapExceeded(ComputationError):
    pass


class EvenOrderUnsupported(ComputationError):
    pass


class ConventionViolation(ComputationError):
    pass


class InsufficientSamples(ComputationError):
    pass


class InsufficientPoints(ComputationError):
    pass


class DegenerateFit(ComputationError):
    pass


class MissingTarget(ComputationError):
    pass


__all__ = [
    "TVError",
    "InputError",
    "MalformedInput",
    "NonInvolutiveGluing",
    "SelfGluedFace",
    "UngluedFace",
    "NotClosedManifoldLike",
    "ComputationError",
    "MoveNotApplicable",
    "InadmissibleTriple",
    "InadmissibleFace",
    "PrecisionCapExceeded",
    "EvenOrderUnsupported",
    "ConventionViolation",
    "InsufficientSamples",
    "InsufficientPoints",
    "DegenerateFit",
    "MissingTarget",
]
