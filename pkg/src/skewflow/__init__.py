"""Numerical certification of nonuniform asymptotic behaviour of skew-evolution semiflows."""

__version__ = "0.1.0"
