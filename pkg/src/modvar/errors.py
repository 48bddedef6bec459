"""Exception types shared across the toolkit."""


class InputError(ValueError):
    """Malformed or inconsistent user input (files, specs, parameters)."""


class SpecializationError(InputError):
    """A family cannot be specialized at the requested parameter value."""


class PoleError(SpecializationError):
    """A rational-function entry has a vanishing denominator at the point."""


class ResourceLimitError(RuntimeError):
    """A computation was refused because it exceeds a configured budget."""
