"""Numerical toolkit for the j-Santalo family of inequalities."""

__all__ = [
    "__version__",
]

__version__ = "0.1.0"
