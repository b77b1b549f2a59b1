"""Exact polynomial arithmetic over ZZ and prime fields."""
from .gcd import poly_gcd, poly_gcd_many
from .parse import parse_polynomial
from .polynomial import Polynomial, format_polynomial
from .ring import GF, MERSENNE61, ZZ, CoefficientRing, RingKind, is_prime
from .univariate import UniPoly

__all__ = [
    "GF", "MERSENNE61", "ZZ", "CoefficientRing", "RingKind", "is_prime",
    "Polynomial", "UniPoly", "format_polynomial", "parse_polynomial",
    "poly_gcd", "poly_gcd_many",
]
