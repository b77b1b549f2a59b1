from __future__ import annotations

import enum
from dataclasses import dataclass

from ..errors import RingMismatch

MERSENNE61 = (1 << 61) - 1

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24 (covers every word-sized modulus)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class RingKind(enum.Enum):
    EXACT_INTEGER = "ZZ"
    PRIME_FIELD = "GF"


@dataclass(frozen=True)
class CoefficientRing:
    kind: RingKind
    modulus: int | None = None

    def __post_init__(self):
        if self.kind is RingKind.PRIME_FIELD:
            if self.modulus is None or self.modulus >= 1 << 64 or not is_prime(self.modulus):
                raise ValueError(f"prime-field modulus must be a word-sized prime, got {self.modulus}")
        elif self.modulus is not None:
            raise ValueError("ExactInteger ring takes no modulus")

    @property
    def is_field(self) -> bool:
        return self.kind is RingKind.PRIME_FIELD

    def reduce(self, c: int) -> int:
        c = int(c)
        return c % self.modulus if self.modulus else c

    def inv(self, c: int) -> int:
        if not self.modulus:
            if c in (1, -1):
                return c
            raise ZeroDivisionError(f"{c} is not a unit in ZZ")
        c %= self.modulus
        if c == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(c, -1, self.modulus)

    def symmetric(self, c: int) -> int:
        """Representative in (-p/2, p/2]; identity over ZZ."""
        if not self.modulus:
            return c
        c %= self.modulus
        return c - self.modulus if c > self.modulus // 2 else c

    def check_same(self, other: CoefficientRing):
        if self != other:
            raise RingMismatch(f"ring mismatch: {self} vs {other}")

    def __str__(self):
        return f"GF({self.modulus})" if self.modulus else "ZZ"


ZZ = CoefficientRing(RingKind.EXACT_INTEGER)


def GF(p: int = MERSENNE61) -> CoefficientRing:
    return CoefficientRing(RingKind.PRIME_FIELD, p)
