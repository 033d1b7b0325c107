"""Fractional linear functions in one and two variables.

A one-variable function (ax+b)/(cx+d) is kept in normalized form: d = 1, or
d = 0 and c = 1. Constants v are stored as (0, v, 0, 1).

Two-variable functions (ax+by+c)/(dx+ey+f) are homogenized to linear forms on
the parameter plane P^2 with coordinates [x:y:w]; the line w = 0 is the line at
infinity. The denominator is scaled so that its last nonzero coefficient is 1,
which in particular puts f in {0, 1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .gf import INF, FieldConfig, ProjPoint, get_field


class IndeterminateError(ValueError):
    """A restriction or evaluation came out as 0/0."""


def _mob_key(a, b, c, d):
    return (a, b, c, d)


@dataclass(frozen=True, order=True)
class FracLin1:
    """(ax+b)/(cx+d) over F_p, normalized. Build with :func:`normalize1`."""

    p: int
    a: int
    b: int
    c: int
    d: int

    @property
    def is_constant(self) -> bool:
        return (self.a * self.d - self.b * self.c) % self.p == 0

    @property
    def value(self) -> int:
        if not self.is_constant:
            raise ValueError(f"{self.encode()} is not constant")
        return self.b

    @property
    def coeffs(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def __call__(self, x: ProjPoint) -> ProjPoint:
        return eval1(self, x)

    def encode(self) -> str:
        return f"{self.a},{self.b},{self.c},{self.d}"

    @classmethod
    def decode(cls, text: str, F: FieldConfig) -> "FracLin1":
        a, b, c, d = (int(t) for t in text.split(","))
        q = normalize1(F, a, b, c, d)
        if q.coeffs != (a, b, c, d):
            raise ValueError(f"{text!r} is not in normalized form")
        return q

    def pretty(self) -> str:
        if self.is_constant:
            return str(self.b)
        num = _pretty_affine(self.a, self.b)
        if (self.c, self.d) == (0, 1):
            return num
        den = _pretty_affine(self.c, self.d)
        if self.a and self.b:
            num = f"({num})"
        if self.c and self.d:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"FracLin1[{self.pretty()} mod {self.p}]"


def _pretty_affine(a, b):
    if a == 0:
        return str(b)
    xs = "x" if a == 1 else f"{a}x"
    return xs if b == 0 else f"{xs}+{b}"


def normalize1(F: FieldConfig, a: int, b: int, c: int, d: int) -> FracLin1:
    """Canonical representative of (ax+b)/(cx+d).

    Constants are allowed only with value outside {0, 1, inf}; use
    :func:`mobius_or_point` where a raw constant is acceptable.
    """
    f = mobius_or_point(F, a, b, c, d)
    if isinstance(f, FracLin1):
        return f
    if f is INF or f in (0, 1):
        raise ValueError(f"constant function with value {f} is not an admissible coordinate")
    return FracLin1(F.p, 0, f, 0, 1)


def mobius_or_point(F: FieldConfig, a: int, b: int, c: int, d: int) -> Union[FracLin1, ProjPoint]:
    """Normalized non-constant function, or the constant value as a ProjPoint."""
    p = F.p
    a, b, c, d = a % p, b % p, c % p, d % p
    if c == 0 and d == 0:
        if a == 0 and b == 0:
            raise IndeterminateError("0/0 is not a function")
        raise ValueError("denominator vanishes identically")
    if (a * d - b * c) % p == 0:
        if a == 0 and b == 0:
            return 0
        return F.div(b, d) if d else F.div(a, c)
    s = F.inv(d) if d else F.inv(c)
    return FracLin1(p, a * s % p, b * s % p, c * s % p, d * s % p)


def constant1(F: FieldConfig, v: int) -> FracLin1:
    return normalize1(F, 0, v, 0, 1)


def identity1(F: FieldConfig) -> FracLin1:
    return FracLin1(F.p, 1, 0, 0, 1)


def zeros_poles1(f: FracLin1) -> tuple:
    """(zero, pole) of a non-constant function on P^1."""
    if f.is_constant:
        raise ValueError("a constant has no zero or pole")
    F = get_field(f.p)
    zero = INF if f.a == 0 else F.div(-f.b, f.a)
    pole = INF if f.c == 0 else F.div(-f.d, f.c)
    return zero, pole


def eval1(f: FracLin1, x: ProjPoint) -> ProjPoint:
    p = f.p
    if f.is_constant:
        return f.b
    if x is INF:
        n, m = f.a, f.c
    else:
        n, m = (f.a * x + f.b) % p, (f.c * x + f.d) % p
    if m == 0:
        return INF
    return n * get_field(p).inv(m) % p


def compose1(f: FracLin1, sigma: FracLin1) -> FracLin1:
    """f o sigma, normalized."""
    if sigma.is_constant:
        raise ValueError("cannot reparametrize by a constant")
    if f.is_constant:
        return f
    a, b, c, d = f.coeffs
    e, g, h, k = sigma.coeffs
    return normalize1(get_field(f.p), a * e + b * h, a * g + b * k, c * e + d * h, c * g + d * k)


def invert_mobius(sigma: FracLin1) -> FracLin1:
    """Two-sided inverse under composition (adjugate matrix)."""
    if sigma.is_constant:
        raise ValueError("a constant function is not invertible")
    a, b, c, d = sigma.coeffs
    return normalize1(get_field(sigma.p), d, -b, -c, a)


def all_mobius(F: FieldConfig) -> list:
    """All p(p-1)(p+1) non-constant normalized functions, in key order."""
    p = F.p
    out = []
    for a in range(p):
        for b in range(p):
            for c, d in [(c, 1) for c in range(p)] + [(1, 0)]:
                if (a * d - b * c) % p:
                    out.append(FracLin1(p, a, b, c, d))
    out.sort()
    return out


# -- parameter plane P^2 -------------------------------------------------------


def normalize_vec(F: FieldConfig, v) -> tuple:
    """Scale a nonzero triple so that its first nonzero entry is 1."""
    p = F.p
    v = tuple(x % p for x in v)
    for x in v:
        if x:
            s = F.inv(x)
            return tuple(y * s % p for y in v)
    raise ValueError("zero vector has no projective class")


def plane_points(F: FieldConfig) -> list:
    """The p^2+p+1 points of P^2(F_p) as normalized [x:y:w] triples."""
    p = F.p
    pts = []
    for x in range(p):
        for y in range(p):
            for w in range(p):
                v = (x, y, w)
                if any(v) and next(t for t in v if t) == 1:
                    pts.append(v)
    return pts


def _dot(p, u, v):
    return (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]) % p


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


@dataclass(frozen=True, order=True)
class ParamLine:
    """A line alpha*x + beta*y + gamma*w = 0 in the parameter plane."""

    p: int
    coeffs: tuple

    @classmethod
    def from_coeffs(cls, F: FieldConfig, coeffs) -> "ParamLine":
        return cls(F.p, normalize_vec(F, coeffs))

    @property
    def at_infinity(self) -> bool:
        return self.coeffs[0] == 0 and self.coeffs[1] == 0

    def contains(self, pt) -> bool:
        return _dot(self.p, self.coeffs, pt) == 0

    def parametrization(self) -> tuple:
        """Points (u, v) with t -> t*u + v, so t = inf gives u and t = 0 gives v.

        Affine lines are solved for y when its coefficient is nonzero and
        parametrized by x; otherwise solved for x and parametrized by y. The line
        at infinity is parametrized as [t:1:0].
        """
        p = self.p
        F = get_field(p)
        al, be, ga = self.coeffs
        if al == 0 and be == 0:
            return (1, 0, 0), (0, 1, 0)
        if be:
            ib = F.inv(be)
            return (1, (-al * ib) % p, 0), (0, (-ga * ib) % p, 1)
        ia = F.inv(al)
        return (0, 1, 0), ((-ga * ia) % p, 0, 1)

    def point_at(self, t: ProjPoint) -> tuple:
        u, v = self.parametrization()
        if t is INF:
            return u
        return normalize_vec(get_field(self.p), tuple(t * a + b for a, b in zip(u, v)))

    def encode(self) -> str:
        return ",".join(map(str, self.coeffs))


def line_through(F: FieldConfig, P, Q) -> ParamLine:
    return ParamLine(F.p, normalize_vec(F, _cross(P, Q)))


def intersection(F: FieldConfig, L: ParamLine, M: ParamLine):
    """Common point of two distinct lines."""
    return normalize_vec(F, _cross(L.coeffs, M.coeffs))


@dataclass(frozen=True, order=True)
class FracLin2:
    """(ax+by+c)/(dx+ey+f), homogenized to (ax+by+cw)/(dx+ey+fw). Build with :func:`normalize2`."""

    p: int
    num: tuple
    den: tuple

    @property
    def is_constant(self) -> bool:
        return not any(x % self.p for x in _cross(self.num, self.den))

    @property
    def value(self) -> int:
        if not self.is_constant:
            raise ValueError("not constant")
        F = get_field(self.p)
        for n, d in zip(self.num, self.den):
            if d:
                return F.div(n, d)
        raise AssertionError("unreachable: denominator is nonzero")

    def center(self):
        """Base point where numerator and denominator both vanish; None for constants."""
        if self.is_constant:
            return None
        return normalize_vec(get_field(self.p), _cross(self.num, self.den))

    def value_at(self, pt):
        """Value at a point of P^2; None at the base point."""
        p = self.p
        n, m = _dot(p, self.num, pt), _dot(p, self.den, pt)
        if m == 0:
            return None if n == 0 else INF
        return n * get_field(p).inv(m) % p

    def encode(self) -> str:
        return ",".join(map(str, self.num)) + ";" + ",".join(map(str, self.den))

    @classmethod
    def decode(cls, text: str, F: FieldConfig) -> "FracLin2":
        num, den = text.split(";")
        g = normalize2(F, [int(t) for t in num.split(",")], [int(t) for t in den.split(",")])
        if g.encode() != text.strip():
            raise ValueError(f"{text!r} is not in normalized form")
        return g

    def __repr__(self):
        return f"FracLin2[{self.encode()} mod {self.p}]"


def normalize2(F: FieldConfig, num, den) -> FracLin2:
    p = F.p
    num = tuple(x % p for x in num)
    den = tuple(x % p for x in den)
    if not any(den):
        raise ValueError("denominator vanishes identically")
    if not any(num):
        raise ValueError("the constant 0 is not an admissible coordinate")
    last = [x for x in den if x][-1]
    s = F.inv(last)
    g = FracLin2(p, tuple(x * s % p for x in num), tuple(x * s % p for x in den))
    if g.is_constant:
        return constant2(F, g.value)
    return g


def constant2(F: FieldConfig, v: int) -> FracLin2:
    """Canonical form v/1 of a constant coordinate; v must avoid 0 and 1."""
    v %= F.p
    if v in (0, 1):
        raise ValueError(f"the constant {v} is not an admissible coordinate")
    return FracLin2(F.p, (0, 0, v), (0, 0, 1))


def xy_coordinate(F: FieldConfig) -> FracLin2:
    """The fixed first coordinate x/y."""
    return FracLin2(F.p, (1, 0, 0), (0, 1, 0))


def zero_locus(g: FracLin2) -> ParamLine:
    if g.is_constant:
        raise ValueError("a constant has no zero locus")
    return ParamLine.from_coeffs(get_field(g.p), g.num)


def pole_locus(g: FracLin2) -> ParamLine:
    if g.is_constant:
        raise ValueError("a constant has no pole locus")
    return ParamLine.from_coeffs(get_field(g.p), g.den)


def restrict_to_line(g: FracLin2, L: ParamLine) -> Union[FracLin1, ProjPoint]:
    """g restricted to L in the canonical parameter t of L.

    Returns a non-constant FracLin1, or the constant value (0, 1 and inf
    included) as a ProjPoint.
    """
    p = g.p
    u, v = L.parametrization()
    a, b = _dot(p, g.num, u), _dot(p, g.num, v)
    c, d = _dot(p, g.den, u), _dot(p, g.den, v)
    if not (a or b or c or d):
        raise IndeterminateError(f"{g.encode()} is 0/0 on the line {L.encode()}")
    if not (c or d):
        return INF
    return mobius_or_point(get_field(p), a, b, c, d)
