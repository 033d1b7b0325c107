"""Bloch boundary maps on fractional linear cycles.

boundary3 sends [x, f2, f3] to a chain of points of the 2-cube, boundary4 sends
[x/y, g1, g2, g3] to a chain of canonical degree-3 cycles. Signs follow
sum_i (-1)^(i-1) (d_i^0 - d_i^inf) with coordinates numbered from 1.

Points with a coordinate equal to 1 lie outside the cube and are dropped, as
are degenerate faces (two or more constant coordinates) and faces whose
leftmost coordinate is constant (those belong to the acyclic subcomplex that
is divided out).

Degree-4 faces: on the blowup of the parameter plane at the coordinate
centres, the zero (pole) divisor of a coordinate is its zero (pole) line plus
the exceptional curves over the other centres lying on that line. On such an
exceptional curve over P the coordinates centred at P vary with the direction
at P and all others take their value at P.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .cycles import (
    Chain,
    ConstantFirstCoordinateError,
    Cycle3,
    Cycle4,
    Point2,
    _as_quadruple,
    _pencil_line,
    admissible3,
    canonicalize3,
)
from .exactla import RowLattice, SparseIntMatrix, relative_kernel_basis
from .fraclin import FracLin1, ParamLine, restrict_to_line, zeros_poles1, eval1
from .gf import INF, get_field


# above this many cycles the kernel basis is returned unreduced
HNF_KERNEL_LIMIT = 512


class BoundaryError(RuntimeError):
    """A face came out in a shape that admissibility should have excluded."""


@dataclass(frozen=True)
class SignedFace:
    index: int  # 1-based coordinate number
    kind: str  # "zero" or "infinity"

    @property
    def sign(self) -> int:
        s = -1 if self.index % 2 == 0 else 1
        return s if self.kind == "zero" else -s


class PointClassScheme(enum.Enum):
    PRODUCT = "product"
    FULLQUOTIENT = "quotient"


def boundary3(c: Cycle3) -> Chain:
    coords = c.coordinates()
    out = Chain()
    for i, h in enumerate(coords):
        if h.is_constant:
            continue
        for pt, kind in zip(zeros_poles1(h), ("zero", "infinity")):
            a, b = (eval1(coords[j], pt) for j in range(3) if j != i)
            if a == 1 or b == 1:
                continue
            if a is INF or b is INF or a == 0 or b == 0:
                raise BoundaryError(f"{c!r}: boundary point ({a}, {b}) has a coordinate 0 or inf")
            out.add(Point2(a, b), SignedFace(i + 1, kind).sign)
    return out


def _face_term(trip):
    """Canonical Cycle3 of a face triple, or None when the face does not count."""
    consts = [t for t in trip if not isinstance(t, FracLin1) or t.is_constant]
    for t in consts:
        v = t.value if isinstance(t, FracLin1) else t
        if v == 1:
            return None
    if len(consts) >= 2:
        return None
    try:
        c = canonicalize3(*trip)
    except ConstantFirstCoordinateError:
        return None
    except ValueError as e:
        raise BoundaryError(f"face {trip!r}: {e}") from e
    if not admissible3(c):
        raise BoundaryError(f"face {trip!r} gives the inadmissible cycle {c!r}")
    return c


def _value(g, L):
    return g.value if g.is_constant else restrict_to_line(g, L)


def boundary4_faces(c, include_exceptional: bool = True):
    """Yield (SignedFace, description, raw triple) for every face of [x/y, g1, g2, g3]."""
    q = _as_quadruple(c.coordinates() if isinstance(c, Cycle4) else c)
    F = get_field(q[0].p)
    centers = sorted({g.center() for g in q if not g.is_constant})
    for i, gi in enumerate(q):
        if gi.is_constant:
            continue
        for kind, form in (("zero", gi.num), ("infinity", gi.den)):
            face = SignedFace(i + 1, kind)
            L = ParamLine.from_coeffs(F, form)
            yield face, f"line {L.coeffs}", tuple(_value(g, L) for j, g in enumerate(q) if j != i)
            if not include_exceptional:
                continue
            for P in centers:
                if P == gi.center() or not L.contains(P):
                    continue
                M = _pencil_line(F, P)
                trip = []
                for j, g in enumerate(q):
                    if j == i:
                        continue
                    if not g.is_constant and g.center() == P:
                        trip.append(restrict_to_line(g, M))
                    else:
                        trip.append(g.value if g.is_constant else g.value_at(P))
                yield face, f"exceptional curve over {P}", tuple(trip)


def boundary4(c, include_exceptional: bool = True) -> Chain:
    """Boundary of an admissible degree-4 cycle as a chain of canonical Cycle3.

    include_exceptional=False keeps only the line faces; that variant does not
    satisfy d o d = 0 and is kept for comparison only.
    """
    out = Chain()
    for face, _, trip in boundary4_faces(c, include_exceptional):
        t = _face_term(trip)
        if t is not None:
            out.add(t, face.sign)
    return out


# -- point classes ---------------------------------------------------------------


def point_list(p: int) -> list:
    return [Point2(a, b) for a in range(2, p) for b in range(2, p)]


def point_class(pt: Point2, scheme: PointClassScheme, p: int) -> int:
    """PRODUCT: a*b in F_p^x; FULLQUOTIENT: index of pt in point_list(p)."""
    if scheme is PointClassScheme.PRODUCT:
        return pt.a * pt.b % p
    return (pt.a - 2) * (p - 2) + (pt.b - 2)


def n_point_classes(p: int, scheme: PointClassScheme) -> int:
    # PRODUCT classes are indexed by 1..p-1, column k-1 for class k
    return p - 1 if scheme is PointClassScheme.PRODUCT else (p - 2) ** 2


def _class_column(pt, scheme, p):
    k = point_class(pt, scheme, p)
    return k - 1 if scheme is PointClassScheme.PRODUCT else k


def point_relations(p: int, scheme: PointClassScheme = PointClassScheme.FULLQUOTIENT) -> SparseIntMatrix:
    """Relations [a,b] + [a,c] - [a,bc] among point columns (points with a
    coordinate 1 count as zero). Empty under PRODUCT, where the indexing by
    products already identifies what these relations identify."""
    n = n_point_classes(p, scheme)
    if scheme is PointClassScheme.PRODUCT:
        return SparseIntMatrix(0, n)
    rows, seen = [], set()
    for a in range(2, p):
        for b in range(1, p):
            for c in range(1, p):
                r = {}
                for y, s in ((b, 1), (c, 1), (b * c % p, -1)):
                    if y != 1:
                        k = _class_column(Point2(a, y), scheme, p)
                        r[k] = r.get(k, 0) + s
                key = tuple(sorted((k, v) for k, v in r.items() if v))
                if key and key not in seen:
                    seen.add(key)
                    rows.append(dict(key))
    return SparseIntMatrix.from_sparse_rows(rows, n)


def boundary3_matrix(cycles, scheme: PointClassScheme = PointClassScheme.FULLQUOTIENT) -> SparseIntMatrix:
    """Rows = cycles, columns = point classes."""
    cycles = list(cycles)
    p = cycles[0].p if cycles else 2
    rows = []
    for c in cycles:
        r = {}
        for pt, v in boundary3(c).items():
            k = _class_column(pt, scheme, p)
            r[k] = r.get(k, 0) + v
        rows.append(r)
    return SparseIntMatrix.from_sparse_rows(rows, n_point_classes(p, scheme))


def grassmannian_kernel(cycles, scheme: PointClassScheme = PointClassScheme.FULLQUOTIENT, p: int | None = None) -> list:
    """Integer basis (Hermite form) of the combinations of cycles whose
    boundary vanishes in the point-class group of the scheme."""
    cycles = list(cycles)
    n = len(cycles)
    if n == 0:
        return []
    p = p or cycles[0].p
    B = boundary3_matrix(cycles, scheme)
    R = point_relations(p, scheme)
    if B.n_cols == 0:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    K = relative_kernel_basis(B.sparse_rows(), R, B.n_cols)
    if n > HNF_KERNEL_LIMIT:
        return [[u.get(i, 0) for i in range(n)] for u in K]
    L = RowLattice(n)
    for u in K:
        L.add_sparse(u)
    return L.reduced_basis()
