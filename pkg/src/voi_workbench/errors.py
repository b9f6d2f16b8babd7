"""Exception types shared across the workbench."""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class ParamRefError(WorkbenchError):
    """A parameter reference could not be parsed or resolved."""


class UnresolvedRefError(ParamRefError):
    """A well-formed reference names no entry in the model."""


class ModelValidationError(WorkbenchError):
    """A model failed validation.

    Carries the list of diagnostics so callers can report every problem,
    not just the first one.
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"model validation failed: {lines}")


class RefineError(WorkbenchError):
    """A refinement request was structurally invalid (incomplete CPT,
    cycle, or name clash)."""


class FitError(WorkbenchError):
    """A distribution fit did not converge within parameter bounds."""

    def __init__(self, message: str, residual: float | None = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual={residual:.3g})"
        super().__init__(message)


class OutOfSupportError(WorkbenchError):
    """A distribution was queried outside its support."""


class AnnotationError(WorkbenchError):
    """A parameter in a cluster has no usable second-order annotation."""


class SubstitutionError(WorkbenchError):
    """Substituting a value into a model produced an invalid probability."""


class ModelFileError(WorkbenchError):
    """A model file could not be read or did not match the schema."""
