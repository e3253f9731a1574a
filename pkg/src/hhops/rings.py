"""Coefficient rings: the integers or a prime field F_p.

All arithmetic is exact Python-int arithmetic; F_p elements are kept
reduced to the range [0, p).
"""

from __future__ import annotations

from dataclasses import dataclass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Ring:
    """Z when p == 0, otherwise the prime field F_p."""

    p: int = 0

    def __post_init__(self) -> None:
        if self.p and not _is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")

    @property
    def is_field(self) -> bool:
        return self.p != 0

    def normalize(self, a: int) -> int:
        return a % self.p if self.p else a

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p if self.p else a + b

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p if self.p else a - b

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p if self.p else a * b

    def neg(self, a: int) -> int:
        return (-a) % self.p if self.p else -a

    def inv(self, a: int) -> int:
        if not self.p:
            if a in (1, -1):
                return a
            raise ZeroDivisionError(f"{a} is not a unit in Z")
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def is_unit(self, a: int) -> bool:
        if self.p:
            return a % self.p != 0
        return a in (1, -1)

    def divmod(self, a: int, b: int) -> tuple[int, int]:
        """Quotient/remainder with |r| minimized; exact division in F_p."""
        if self.p:
            return (a * self.inv(b)) % self.p, 0
        q, r = divmod(a, b)
        # keep remainders balanced so Euclid steps shrink fast
        if r and 2 * r > abs(b):
            if b > 0:
                q, r = q + 1, r - b
            else:
                q, r = q - 1, r + b
        return q, r

    def size(self, a: int) -> int:
        """Pivot-selection weight: smaller is better, 0 only for 0."""
        if self.p:
            return 0 if a % self.p == 0 else 1
        return abs(a)

    def __str__(self) -> str:
        return f"F{self.p}" if self.p else "Z"

    def token(self) -> str:
        return f"fp:{self.p}" if self.p else "z"


ZZ = Ring(0)


def GF(p: int) -> Ring:
    return Ring(p)


def ring_from_token(tok: str) -> Ring:
    tok = tok.strip().lower()
    if tok == "z":
        return ZZ
    if tok.startswith("fp:"):
        return GF(int(tok[3:]))
    raise ValueError(f"unknown ring token {tok!r} (use 'z' or 'fp:<p>')")
