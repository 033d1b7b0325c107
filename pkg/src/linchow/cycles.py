"""Fractional linear cycles of degree 3 and 4: canonical forms, admissibility,
degeneracy and exhaustive enumeration.

A degree-3 cycle is a curve [x, f2(x), f3(x)] in the algebraic 3-cube, with the
first coordinate normalized to x by a Moebius reparametrization. A degree-4
cycle is a surface [x/y, g1, g2, g3] parametrized by the plane P^2 with
homogeneous coordinates [x:y:w].

Degree-4 geometry works on the blowup of P^2 at the base points (centers) of
the coordinates: each coordinate N/D becomes a morphism there, its zero and
pole divisors are the lines N = 0 and D = 0 plus nothing else, and the
exceptional curve over a center P maps to P^1 under every coordinate centered
at P, while the remaining coordinates are constant on it.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .fraclin import (
    FracLin1,
    FracLin2,
    ParamLine,
    compose1,
    constant1,
    eval1,
    identity1,
    invert_mobius,
    normalize2,
    plane_points,
    restrict_to_line,
    xy_coordinate,
    zeros_poles1,
)
from .gf import INF, FieldConfig, ProjPoint, get_field


class CycleError(ValueError):
    pass


class ConstantFirstCoordinateError(CycleError):
    """Cycles with constant leftmost coordinate live in the acyclic subcomplex."""


class CycleInvariantError(CycleError):
    pass


# -- degree 3 ------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Cycle3:
    """[x, f2(x), f3(x)] in canonical form."""

    f2: FracLin1
    f3: FracLin1

    @property
    def p(self) -> int:
        return self.f2.p

    def coordinates(self) -> tuple:
        return (identity1(get_field(self.p)), self.f2, self.f3)

    def key(self) -> tuple:
        return self.f2.coeffs + self.f3.coeffs

    def encode(self) -> str:
        return f"{self.f2.encode()}|{self.f3.encode()}"

    @classmethod
    def decode(cls, text: str, F: FieldConfig) -> "Cycle3":
        s2, s3 = text.strip().split("|")
        return cls(FracLin1.decode(s2, F), FracLin1.decode(s3, F))

    def pretty(self) -> str:
        return f"[x, {self.f2.pretty()}, {self.f3.pretty()}]"

    def __repr__(self):
        return f"Cycle3{self.pretty()}"


@dataclass(frozen=True, order=True)
class Point2:
    """Point (a, b) of the 2-cube with a, b outside {0, 1}."""

    a: int
    b: int

    def encode(self) -> str:
        return f"{self.a},{self.b}"


class Chain:
    """Formal integer combination of hashable canonical objects."""

    __slots__ = ("_c",)

    def __init__(self, terms=None):
        self._c = {}
        if terms is not None:
            items = terms.items() if hasattr(terms, "items") else terms
            for k, v in items:
                self.add(k, v)

    def add(self, key, coef: int = 1):
        if not coef:
            return
        v = self._c.get(key, 0) + coef
        if v:
            self._c[key] = v
        else:
            del self._c[key]

    def __getitem__(self, key):
        return self._c.get(key, 0)

    def items(self):
        return self._c.items()

    def keys(self):
        return self._c.keys()

    def sorted_items(self, key=None):
        return sorted(self._c.items(), key=(lambda kv: key(kv[0])) if key else None)

    def __len__(self):
        return len(self._c)

    def __bool__(self):
        return bool(self._c)

    def __iter__(self):
        return iter(self._c)

    def __eq__(self, other):
        if isinstance(other, Chain):
            return self._c == other._c
        if isinstance(other, dict):
            return self._c == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __add__(self, other):
        out = Chain(self._c)
        for k, v in other.items():
            out.add(k, v)
        return out

    def __neg__(self):
        return Chain({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, n: int) -> "Chain":
        return Chain({k: n * v for k, v in self._c.items()}) if n else Chain()

    def __repr__(self):
        return "Chain(" + ", ".join(f"{v:+d}*{k!r}" for k, v in self._c.items()) + ")"


def canonicalize3(t1, t2, t3) -> Cycle3:
    """Reparametrize [t1, t2, t3] so the first coordinate reads x.

    t2 and t3 may be FracLin1 values or raw constants (ProjPoint); raw
    constants 0, 1, inf and cycles with two constant coordinates are rejected.
    """
    if not isinstance(t1, FracLin1) or t1.is_constant:
        raise ConstantFirstCoordinateError(f"leftmost coordinate {t1!r} is constant")
    F = get_field(t1.p)
    sigma = invert_mobius(t1)
    out = []
    for t in (t2, t3):
        if not isinstance(t, FracLin1):
            if t is INF or t in (0, 1):
                raise CycleInvariantError(f"constant coordinate {t} is not allowed")
            t = constant1(F, t)
        out.append(compose1(t, sigma))
    if out[0].is_constant and out[1].is_constant:
        raise CycleInvariantError("two constant coordinates: degenerate")
    return Cycle3(out[0], out[1])


def admissible3(c: Cycle3) -> bool:
    """Shared zero/pole test: wherever two coordinates have a zero or pole the
    third one must equal 1."""
    coords = c.coordinates()
    support = {}
    for i, h in enumerate(coords):
        if h.is_constant:
            continue
        for pt in zeros_poles1(h):
            support.setdefault(pt, set()).add(i)
    for pt, idx in support.items():
        if len(idx) < 2:
            continue
        if len(idx) == 3:
            return False
        (k,) = {0, 1, 2} - idx
        if eval1(coords[k], pt) != 1:
            return False
    return True


def _admissible_pairs_for(U, i: int) -> np.ndarray:
    """Indices j such that [x, U[i], U[j]] is admissible (vectorized over j)."""
    p = U.p
    n = U.n_valid
    z, q, val = U.zero[:n], U.pole[:n], U.val[:n]
    ok = np.ones(n, bool)
    if U.is_const[i]:
        ok &= U.is_const[:n] == 0
    zi, pi = int(U.zero[i]), int(U.pole[i])
    for pt in (0, p):
        # x and the coordinate U[i] meet at pt: the other must be 1 there
        if pt in (zi, pi):
            ok &= val[:, pt] == 1
        # x and U[j] meet at pt: U[i] must be 1 there
        hit = (z == pt) | (q == pt)
        if U.val[i, pt] != 1:
            ok &= ~hit
    if not U.is_const[i]:
        # U[i] and U[j] share a point, where x must equal 1
        for s in (zi, pi):
            if s != 1:
                ok &= (z != s) & (q != s)
    return np.nonzero(ok)[0]


def enumerate3(p: int, threads: int = 1, as_indices: bool = False):
    """All admissible non-degenerate Cycle3 over F_p, sorted by coefficient tuple.

    The outer loop over the second coordinate is split into contiguous shards;
    results are concatenated in shard order, so the output does not depend on
    the number of threads. With as_indices=True an (n, 2) array of universe
    indices is returned instead of Cycle3 objects.
    """
    from .universe import get_universe

    U = get_universe(p)
    n = U.n_valid
    nshards = max(1, min(n, 64))
    bounds = np.linspace(0, n, nshards + 1).astype(int)

    def shard(k):
        parts = []
        for i in range(bounds[k], bounds[k + 1]):
            js = _admissible_pairs_for(U, i)
            parts.append(np.column_stack([np.full(len(js), i, np.int32), js.astype(np.int32)]))
        return np.concatenate(parts) if parts else np.zeros((0, 2), np.int32)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            blocks = list(ex.map(shard, range(nshards)))
    else:
        blocks = [shard(k) for k in range(nshards)]
    idx = np.concatenate(blocks) if blocks else np.zeros((0, 2), np.int32)
    if as_indices:
        return idx
    funcs = U.funcs
    return [Cycle3(funcs[i], funcs[j]) for i, j in idx.tolist()]


# -- degree 4 ------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Cycle4:
    """[x/y, g1, g2, g3] with FracLin2 coordinates."""

    g1: FracLin2
    g2: FracLin2
    g3: FracLin2

    @property
    def p(self) -> int:
        return self.g1.p

    def coordinates(self) -> tuple:
        return (xy_coordinate(get_field(self.p)), self.g1, self.g2, self.g3)

    def encode(self) -> str:
        return "|".join(g.encode() for g in (self.g1, self.g2, self.g3))

    @classmethod
    def decode(cls, text: str, F: FieldConfig) -> "Cycle4":
        return cls(*(FracLin2.decode(t, F) for t in text.strip().split("|")))


def coordinate_candidates4(F: FieldConfig) -> list:
    """Every normalized FracLin2 coordinate, constants 2..p-1 included once,
    sorted by coefficient tuple (numerator, then denominator)."""
    p = F.p
    out = set()
    pts = plane_points(F)
    dens = []
    for D in pts:
        # plane_points are first-nonzero-normalized; rescale to last-nonzero = 1
        s = F.inv([x for x in D if x][-1])
        dens.append(tuple(x * s % p for x in D))
    for D in dens:
        for a in range(p):
            for b in range(p):
                for c in range(p):
                    N = (a, b, c)
                    if not any(N):
                        continue
                    try:
                        out.add(normalize2(F, N, D))
                    except ValueError:
                        pass
    return sorted(out, key=lambda g: g.num + g.den)


@dataclass(frozen=True)
class DegeneracyVerdict:
    degenerate: bool
    reasons: tuple = ()
    n_constant: int = 0
    pencil_sizes: tuple = ()

    def __bool__(self):
        return self.degenerate


def _center_class(P) -> str:
    if P == (0, 0, 1):
        return "functions of x/y"
    if P in ((1, 0, 0), (0, 1, 0)):
        return "independent of one variable"
    if P[2] == 0:
        return "functions of one linear form ax+by"
    return "functions of a pencil through an affine point"


def _as_quadruple(coords) -> tuple:
    coords = tuple(coords)
    if len(coords) == 3:
        F = get_field(coords[0].p)
        return (xy_coordinate(F),) + coords
    if len(coords) != 4:
        raise ValueError("expected (g1, g2, g3) or (x/y, g1, g2, g3)")
    return coords


def degenerate4_tests(coords) -> DegeneracyVerdict:
    """Degeneracy of [x/y, g1, g2, g3].

    Non-constant coordinates sharing a base point P are all functions of the
    lines through P (the pencil at P); a constant lies in every pencil. The
    cycle is degenerate when some pencil carries three or more of the four
    coordinates. Centres at [0:0:1], [1:0:0] / [0:1:0] and points at infinity
    correspond to the substitution z = x/y, independence of a variable and
    dependence on a single form ax+by respectively; those are reported by name.
    """
    q = _as_quadruple(coords)
    nconst = sum(1 for g in q if g.is_constant)
    centers = Counter(g.center() for g in q if not g.is_constant)
    reasons = []
    if nconst >= 3:
        reasons.append("constant coordinates")
    for P, k in sorted(centers.items()):
        if k + nconst >= 3:
            reasons.append(f"{_center_class(P)} (centre {P})")
    return DegeneracyVerdict(bool(reasons), tuple(reasons), nconst, tuple(sorted(centers.values(), reverse=True)))


def _restrict_value(g: FracLin2, L: ParamLine):
    if g.is_constant:
        return g.value
    return restrict_to_line(g, L)


def _is_zero_or_inf(v) -> bool:
    return not isinstance(v, FracLin1) and (v is INF or v == 0)


def _pencil_line(F, P) -> ParamLine:
    """First coordinate line x=0, y=0, w=0 not through P; its points index the
    directions at P, i.e. the points of the exceptional curve over P."""
    for L in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        line = ParamLine(F.p, L)
        if not line.contains(P):
            return line
    raise AssertionError("unreachable")


def admissibility4_failure(coords):
    """None if [x/y, g1, g2, g3] is admissible, else a short reason string.

    Faces of the 4-cube meet the surface in the right dimension iff:
    on every zero/pole line where two or more coordinates are 0 or inf and none
    is 1, the remaining coordinates are constant and fewer than three of them
    are 0 or inf; the same at the exceptional curve over each centre; and at
    every point of the blowup at most two coordinates are 0 or inf unless
    another one equals 1.
    """
    q = _as_quadruple(coords)
    F = get_field(q[0].p)
    lines = set()
    for g in q:
        if not g.is_constant:
            lines.add(ParamLine.from_coeffs(F, g.num))
            lines.add(ParamLine.from_coeffs(F, g.den))
    for L in sorted(lines):
        vals = [_restrict_value(g, L) for g in q]
        J = sum(1 for v in vals if _is_zero_or_inf(v))
        if J < 2 or any(not isinstance(v, FracLin1) and v == 1 for v in vals):
            continue
        if any(isinstance(v, FracLin1) for v in vals):
            return f"curve face on line {L.coeffs}"
        if J >= 3:
            return f"point face on line {L.coeffs}"
    centers = sorted({g.center() for g in q if not g.is_constant})
    pts = plane_points(F)

    def value(g, Q):
        return g.value if g.is_constant else g.value_at(Q)

    for P in centers:
        on = [not g.is_constant and g.center() == P for g in q]
        vals = [value(g, P) for g, c in zip(q, on) if not c]
        J = sum(1 for v in vals if v is INF or v == 0)
        if J >= 2 and 1 not in vals:
            return f"exceptional curve over {P}"
        M = _pencil_line(F, P)
        for Q in pts:
            if not M.contains(Q):
                continue
            vs = [value(g, Q) if c else value(g, P) for g, c in zip(q, on)]
            if 1 not in vs and sum(1 for v in vs if v is INF or v == 0) >= 3:
                return f"point over {P} in direction {Q}"
    for Q in pts:
        if Q in centers:
            continue
        vs = [value(g, Q) for g in q]
        if 1 not in vs and sum(1 for v in vs if v is INF or v == 0) >= 3:
            return f"point face at {Q}"
    return None


def admissible4(coords) -> bool:
    return admissibility4_failure(coords) is None


def enumerate4(p: int, threads: int = 1, keep_empty_boundary: bool = False) -> Iterator[Cycle4]:
    """Stream all admissible non-degenerate Cycle4 over F_p in coefficient order.

    By default cycles whose boundary cancels completely are skipped (they carry
    no relation); pass keep_empty_boundary=True to stream them as well.
    """
    from . import _fast4

    T = _fast4.get_tables(p)
    cands = T.coords
    for block in _fast4.iter_shards(T, threads=threads, with_boundary=not keep_empty_boundary):
        for k, (a, b, c) in enumerate(block.triples.tolist()):
            if keep_empty_boundary or block.offsets[k + 1] > block.offsets[k]:
                yield Cycle4(cands[a], cands[b], cands[c])
