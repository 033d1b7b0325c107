"""Exact integer linear algebra on Python ints.

Convention: rows are relations, columns are generators. kernel_basis(M)
returns the right kernel {v : M v = 0}; left_kernel_basis(M) returns
{u : u M = 0}.

Hermite forms are built incrementally (RowLattice): each new row is reduced
against the pivot rows, and a pivot clash is resolved with an extended gcd
step, which keeps the basis unimodularly equivalent to the rows added so far.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class ResourceLimitError(RuntimeError):
    """Intermediate entries grew past the configured bit bound."""


def xgcd(a: int, b: int):
    """(g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


class SparseIntMatrix:
    """Integer matrix stored as {(row, col): value} without zeros."""

    def __init__(self, n_rows: int, n_cols: int, entries=None):
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.entries = {}
        if entries:
            # either {(row, col): value} or an iterable of (row, col, value)
            triples = ((r, c, v) for (r, c), v in entries.items()) if isinstance(entries, dict) else entries
            for r, c, v in triples:
                self._add(r, c, v)

    def _add(self, r, c, v):
        if not (0 <= r < self.n_rows and 0 <= c < self.n_cols):
            raise IndexError(f"entry ({r}, {c}) outside {self.n_rows}x{self.n_cols}")
        v = self.entries.get((r, c), 0) + int(v)
        if v:
            self.entries[(r, c)] = v
        else:
            self.entries.pop((r, c), None)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]], n_cols: int | None = None):
        rows = [list(r) for r in rows]
        if n_cols is None:
            n_cols = len(rows[0]) if rows else 0
        M = cls(len(rows), n_cols)
        for i, r in enumerate(rows):
            if len(r) != n_cols:
                raise ValueError("ragged rows")
            for j, v in enumerate(r):
                if v:
                    M.entries[(i, j)] = int(v)
        return M

    @classmethod
    def from_sparse_rows(cls, rows: Iterable[dict], n_cols: int):
        rows = list(rows)
        M = cls(len(rows), n_cols)
        for i, r in enumerate(rows):
            for j, v in r.items():
                M._add(i, j, v)
        return M

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self):
        return len(self.entries)

    def to_dense(self) -> list:
        out = [[0] * self.n_cols for _ in range(self.n_rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def sparse_rows(self) -> list:
        rows = [dict() for _ in range(self.n_rows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def transpose(self) -> "SparseIntMatrix":
        M = SparseIntMatrix(self.n_cols, self.n_rows)
        M.entries = {(c, r): v for (r, c), v in self.entries.items()}
        return M

    def matvec(self, v: Sequence[int]) -> list:
        out = [0] * self.n_rows
        for (r, c), x in self.entries.items():
            out[r] += x * v[c]
        return out

    def vecmat(self, u: Sequence[int]) -> list:
        out = [0] * self.n_cols
        for (r, c), x in self.entries.items():
            out[c] += u[r] * x
        return out

    def __eq__(self, other):
        return isinstance(other, SparseIntMatrix) and self.shape == other.shape and self.entries == other.entries

    def __repr__(self):
        return f"SparseIntMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"

    # triplet format: header "rows cols nnz", then "row col value" per line
    def write_triplets(self, fh):
        fh.write(f"{self.n_rows} {self.n_cols} {self.nnz}\n")
        for (r, c), v in sorted(self.entries.items()):
            fh.write(f"{r} {c} {v}\n")

    @classmethod
    def read_triplets(cls, fh) -> "SparseIntMatrix":
        lines = [ln for ln in (raw.strip() for raw in fh) if ln and not ln.startswith("#")]
        if not lines:
            raise ValueError("empty matrix file")
        try:
            n_rows, n_cols, nnz = (int(t) for t in lines[0].split())
        except ValueError as e:
            raise ValueError(f"bad header {lines[0]!r}, expected 'rows cols nnz'") from e
        if len(lines) - 1 != nnz:
            raise ValueError(f"header announces {nnz} entries, found {len(lines) - 1}")
        M = cls(n_rows, n_cols)
        for ln in lines[1:]:
            r, c, v = (int(t) for t in ln.split())
            if (r, c) in M.entries:
                raise ValueError(f"duplicate entry ({r}, {c})")
            M._add(r, c, v)
        return M


@dataclass(frozen=True)
class AbelianGroupStructure:
    free_rank: int
    torsion: tuple = field(default=())

    def __post_init__(self):
        t = tuple(int(d) for d in self.torsion)
        if any(d < 2 for d in t):
            raise ValueError("invariant factors must be >= 2")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError(f"{t} is not a divisibility chain")
        object.__setattr__(self, "torsion", t)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self):
        """Group order, or None if infinite."""
        if self.free_rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_dict(self):
        return {"free_rank": self.free_rank, "invariant_factors": list(self.torsion)}


class RowLattice:
    """Integer row lattice kept in row echelon (Hermite) form.

    rows maps pivot column -> row (a list); pivots are positive.
    """

    def __init__(self, n: int, bit_bound: int | None = None):
        self.n = n
        self.rows = {}
        self.bit_bound = bit_bound

    def _check(self, v):
        if self.bit_bound is not None:
            for x in v:
                if x and abs(x).bit_length() > self.bit_bound:
                    raise ResourceLimitError(f"entry exceeds {self.bit_bound} bits")

    def add(self, v) -> bool:
        """Insert v; returns True if the rank went up."""
        v = list(v)
        if len(v) != self.n:
            raise ValueError("dimension mismatch")
        rows = self.rows
        for j in range(self.n):
            b = v[j]
            if b == 0:
                continue
            r = rows.get(j)
            if r is None:
                if b < 0:
                    v = [-x for x in v]
                self._check(v)
                rows[j] = v
                return True
            a = r[j]
            if b % a == 0:
                q = b // a
                v = [x - q * y for x, y in zip(v, r)] if q else v
                continue
            g, x, y = xgcd(a, b)
            new = [x * ri + y * vi for ri, vi in zip(r, v)]
            ag, bg = a // g, b // g
            v = [ag * vi - bg * ri for ri, vi in zip(r, v)]
            self._check(new)
            rows[j] = new
        return False

    def add_sparse(self, d: dict) -> bool:
        v = [0] * self.n
        for j, x in d.items():
            v[j] += x
        return self.add(v)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def basis(self) -> list:
        return [self.rows[j] for j in sorted(self.rows)]

    def reduced_basis(self) -> list:
        """Hermite normal form: entries above each pivot reduced into [0, pivot)."""
        piv = sorted(self.rows)
        B = {j: list(self.rows[j]) for j in piv}
        for k in range(len(piv) - 1, -1, -1):
            j = piv[k]
            pj = B[j][j]
            for i in piv[:k]:
                q = B[i][j] // pj
                if q:
                    B[i] = [x - q * y for x, y in zip(B[i], B[j])]
        return [B[j] for j in piv]

    def contains(self, v) -> bool:
        v = list(v)
        for j in range(self.n):
            if v[j] == 0:
                continue
            r = self.rows.get(j)
            if r is None or v[j] % r[j]:
                return False
            q = v[j] // r[j]
            v = [x - q * y for x, y in zip(v, r)]
        return True

    def elementary_divisors(self) -> list:
        return _snf_dense(self.basis(), self.n, self.bit_bound)

    def is_full_unimodular(self) -> bool:
        return self.rank == self.n and all(self.rows[j][j] == 1 for j in self.rows)


def _rows_of(M) -> tuple:
    if isinstance(M, SparseIntMatrix):
        return M.to_dense(), M.n_cols
    rows = [list(r) for r in M]
    return rows, (len(rows[0]) if rows else 0)


def hermite_normal_form(M, bit_bound: int | None = None) -> list:
    """Nonzero rows of the row-style HNF of M."""
    rows, n = _rows_of(M)
    L = RowLattice(n, bit_bound)
    for r in rows:
        L.add(r)
    return L.reduced_basis()


def _snf_dense(rows: list, n_cols: int, bit_bound=None) -> list:
    """Elementary divisors of a dense integer matrix (rows need not be square)."""
    A = [list(r) for r in rows if any(r)]
    m = len(A)
    divisors = []
    t = 0
    while True:
        # pick the nonzero entry of smallest absolute value in the remaining block
        best = None
        for i in range(t, m):
            Ai = A[i]
            for j in range(t, n_cols):
                x = Ai[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        A[t], A[i] = A[i], A[t]
        for r in A:
            r[t], r[j] = r[j], r[t]
        while True:
            piv = A[t][t]
            done = True
            # clear column t
            for i in range(t + 1, m):
                x = A[i][t]
                if x:
                    q = x // piv
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    if A[i][t]:
                        done = False
            # clear row t
            for j in range(t + 1, n_cols):
                x = A[t][j]
                if x:
                    q = x // piv
                    for r in A:
                        r[j] -= q * r[t]
                    if A[t][j]:
                        done = False
            if bit_bound is not None:
                for r in A:
                    for x in r:
                        if x and abs(x).bit_length() > bit_bound:
                            raise ResourceLimitError(f"entry exceeds {bit_bound} bits")
            if not done:
                # move the smallest leftover into the pivot position and repeat
                best = (abs(piv), t, t)
                for i in range(t + 1, m):
                    if A[i][t] and abs(A[i][t]) < best[0]:
                        best = (abs(A[i][t]), i, t)
                for j in range(t + 1, n_cols):
                    if A[t][j] and abs(A[t][j]) < best[0]:
                        best = (abs(A[t][j]), t, j)
                _, i, j = best
                A[t], A[i] = A[i], A[t]
                for r in A:
                    r[t], r[j] = r[j], r[t]
                continue
            # divisibility: pivot must divide every remaining entry
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n_cols):
                    if A[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad])]
        divisors.append(abs(A[t][t]))
        t += 1
        if t >= m or t >= n_cols:
            break
    return divisors


def smith_normal_form(M, bit_bound: int | None = None) -> list:
    """Elementary divisors d1 | d2 | ... (positive, one per unit of rank)."""
    rows, n = _rows_of(M)
    L = RowLattice(n, bit_bound)
    for r in rows:
        L.add(r)
    return _snf_dense(L.basis(), n, bit_bound)


def rank(M) -> int:
    rows, n = _rows_of(M)
    L = RowLattice(n)
    for r in rows:
        L.add(r)
    return L.rank


def left_kernel_basis(M) -> list:
    """Basis of {u : u M = 0} (saturated), via echelon form of [M | I]."""
    rows, n = _rows_of(M)
    m = len(rows)
    L = RowLattice(n + m)
    for i, r in enumerate(rows):
        L.add(list(r) + [1 if k == i else 0 for k in range(m)])
    return [r[n:] for r in L.reduced_basis() if not any(r[:n])]


def kernel_basis(M) -> list:
    """Basis of the saturated right kernel {v : M v = 0}."""
    if isinstance(M, SparseIntMatrix):
        return left_kernel_basis(M.transpose())
    rows, n = _rows_of(M)
    return left_kernel_basis([[rows[i][j] for i in range(len(rows))] for j in range(n)]) if rows else []


def quotient_structure(n_generators: int, relations) -> AbelianGroupStructure:
    """Z^n modulo the row span of relations."""
    if isinstance(relations, RowLattice):
        L = relations
    else:
        rows, n = _rows_of(relations)
        if rows and n != n_generators:
            raise ValueError("relations must have n_generators columns")
        L = RowLattice(n_generators)
        for r in rows:
            L.add(r)
    divs = L.elementary_divisors()
    return AbelianGroupStructure(n_generators - len(divs), tuple(d for d in divs if d != 1))


def subgroup_structure(generators: Sequence[Sequence[int]], relations, n: int) -> AbelianGroupStructure:
    """Structure of the subgroup of Z^n / rowspan(relations) generated by the
    images of the given vectors: Z^k modulo {c : sum c_i g_i in rowspan}."""
    gens = [list(g) for g in generators]
    k = len(gens)
    if k == 0:
        return AbelianGroupStructure(0)
    rel_rows = relations.basis() if isinstance(relations, RowLattice) else _rows_of(relations)[0]
    stacked = gens + [list(r) for r in rel_rows]
    lk = left_kernel_basis(stacked)
    return quotient_structure(k, [u[:k] for u in lk])


def rowspace_membership(v: Sequence[int], M) -> bool:
    if isinstance(M, RowLattice):
        return M.contains(v)
    rows, n = _rows_of(M)
    if len(v) != n and rows:
        raise ValueError("dimension mismatch")
    L = RowLattice(len(v))
    for r in rows:
        L.add(r)
    return L.contains(v)


@dataclass
class DedupResult:
    matrix: SparseIntMatrix
    kept_rows: list  # original row index of each output row
    kept_cols: list  # original column index of each output column
    col_target: dict  # original col -> (output col, sign)


def dedup_rows_columns(M: SparseIntMatrix, column_map: dict | None = None) -> DedupResult:
    """Merge identified columns into their representative and drop repeated rows.

    column_map sends a column to (representative, sign); the representative
    must be a lower index. Columns that receive no merge keep their position;
    merged-away columns are removed. Duplicate rows (after merging) keep the
    lowest index. No linear-dependence elimination is attempted.
    """
    column_map = column_map or {}
    rep = {}
    for c in range(M.n_cols):
        t, s = column_map.get(c, (c, 1))
        if t > c:
            raise ValueError("column representatives must have lower index")
        rep[c] = (t, s)
    kept_cols = sorted({t for t, _ in rep.values()})
    pos = {c: i for i, c in enumerate(kept_cols)}
    col_target = {c: (pos[t], s) for c, (t, s) in rep.items()}
    rows = M.sparse_rows()
    seen = set()
    out_rows, kept_rows = [], []
    for i, r in enumerate(rows):
        nr = {}
        for c, v in r.items():
            t, s = col_target[c]
            nr[t] = nr.get(t, 0) + s * v
        key = tuple(sorted((c, v) for c, v in nr.items() if v))
        if not key or key in seen:
            continue
        seen.add(key)
        out_rows.append(dict(key))
        kept_rows.append(i)
    return DedupResult(SparseIntMatrix.from_sparse_rows(out_rows, len(kept_cols)), kept_rows, kept_cols, col_target)


def relative_kernel_basis(vectors: Sequence[dict], relations, k: int) -> list:
    """Basis of {c in Z^n : sum c_i v_i in rowspan(relations)} for n sparse
    vectors v_i in Z^k (given as {col: value} dicts).

    The relations are echelonized first; then each v_i is reduced while its
    transformation (a sparse combination of the v's) is tracked. Vectors that
    reduce to zero give kernel elements, and since the overall transformation
    is unimodular these form a basis. Returned vectors are sparse dicts.
    """
    if isinstance(relations, RowLattice):
        base = relations
        rows = {j: (list(r), {}) for j, r in base.rows.items()}
    else:
        base = RowLattice(k)
        for r in _rows_of(relations)[0]:
            base.add(r)
        rows = {j: (list(r), {}) for j, r in base.rows.items()}

    def comb(x, t, y, s):
        out = {}
        for key, val in t.items():
            out[key] = out.get(key, 0) + x * val
        for key, val in s.items():
            out[key] = out.get(key, 0) + y * val
        return {key: val for key, val in out.items() if val}

    kernel = []
    for i, d in enumerate(vectors):
        v = [0] * k
        for j, x in d.items():
            v[j] += x
        t = {i: 1}
        placed = False
        for j in range(k):
            b = v[j]
            if b == 0:
                continue
            entry = rows.get(j)
            if entry is None:
                if b < 0:
                    v = [-x for x in v]
                    t = {key: -val for key, val in t.items()}
                rows[j] = (v, t)
                placed = True
                break
            r, tr = entry
            a = r[j]
            if b % a == 0:
                q = b // a
                v = [x - q * y for x, y in zip(v, r)]
                if tr:
                    t = comb(1, t, -q, tr)
                continue
            g, x, y = xgcd(a, b)
            ag, bg = a // g, b // g
            rows[j] = ([x * ri + y * vi for ri, vi in zip(r, v)], comb(x, tr, y, t))
            v, t = [ag * vi - bg * ri for ri, vi in zip(r, v)], comb(ag, t, -bg, tr)
        if not placed:
            kernel.append(t)
    return kernel
