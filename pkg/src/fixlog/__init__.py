"""Toolchain for an intuitionistic fixed-point logic: proof checking,
program extraction, lazy evaluation, Haskell emission."""

__version__ = "0.1.0"
