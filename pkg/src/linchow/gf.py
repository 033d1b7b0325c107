"""Prime field F_p and the projective line P^1(F_p)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

MAX_PRIME = 31


class Infinity:
    """The point at infinity of P^1. A singleton."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (Infinity, ())


INF = Infinity()

# Either a residue 0..p-1 or INF.
ProjPoint = Union[int, Infinity]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldConfig:
    """Arithmetic in F_p with a precomputed inverse table.

    Elements are plain ints in ``range(p)``.
    """

    p: int
    inverse_table: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"field size must be prime, got {self.p!r}")
        if self.p > MAX_PRIME:
            raise ValueError(f"only primes up to {MAX_PRIME} are supported, got {self.p}")
        table = [0] * self.p
        for a in range(1, self.p):
            table[a] = pow(a, self.p - 2, self.p)
        object.__setattr__(self, "inverse_table", tuple(table))

    def elements(self) -> range:
        return range(self.p)

    def units(self) -> range:
        return range(1, self.p)

    def proj_points(self) -> list:
        """All p+1 points of P^1, finite ones first."""
        return list(range(self.p)) + [INF]

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.p}")
        return self.inverse_table[a]

    def div(self, a: int, b: int) -> int:
        return (a * self.inv(b)) % self.p

    def order(self, a: int) -> int:
        """Multiplicative order of a unit."""
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 is not a unit")
        k, x = 1, a
        while x != 1:
            x = (x * a) % self.p
            k += 1
        return k

    def point_key(self, x: ProjPoint) -> int:
        """Integer code of a projective point: residues map to themselves, INF to p."""
        return self.p if x is INF else x


_FIELDS: dict = {}


def get_field(p: int) -> FieldConfig:
    """Shared FieldConfig for p (configs are immutable, so one per prime is enough)."""
    F = _FIELDS.get(p)
    if F is None:
        F = _FIELDS[p] = FieldConfig(p)
    return F
