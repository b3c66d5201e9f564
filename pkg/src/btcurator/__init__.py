"""Curriculum data selection and quality weighting for iterative
back-translation."""

__version__ = "0.1.0"
