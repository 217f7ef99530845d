"""Computational free probability: exact moment engine, random-matrix models and bound checkers."""

from .errors import DomainError, NumericError, ResourceError

__version__ = "0.1.0"
