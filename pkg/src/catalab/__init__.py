"""catalab: metered solvers, description-length codecs and energy floors for
studying reusable computational structure."""

__version__ = "0.1.0"
