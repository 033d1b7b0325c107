"""Compiled degree-4 sweep: admissibility/degeneracy of all coordinate triples
and their boundaries, on precomputed integer tables.

The pure-Python predicates in cycles and boundary are the reference; these
kernels evaluate the same rules on small integer codes:

- plane points and lines are indexed by plane_points order (a line is stored
  by its coefficient triple, which is also a normalized triple);
- values in P^1 are coded 0..p-1, p for inf and p+1 for "undefined" (a
  coordinate evaluated at its own centre);
- one-variable functions are indexed by the Universe1 layout.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba as nb
import numpy as np

from .cycles import Cycle3, coordinate_candidates4
from .fraclin import ParamLine, plane_points, restrict_to_line, xy_coordinate
from .gf import INF, get_field
from .universe import get_universe


class Degree4Tables:
    def __init__(self, p: int):
        F = self.F = get_field(p)
        self.p = p
        U = self.U = get_universe(p)
        self.coords = coordinate_candidates4(F)
        allc = self.coords + [xy_coordinate(F)]
        self.m = m = len(self.coords)
        self.xy_index = m
        pts = self.points = plane_points(F)
        pidx = {q: i for i, q in enumerate(pts)}
        lines = [ParamLine(p, q) for q in pts]
        P = len(pts)
        n = m + 1
        self.isc = np.zeros(n, np.int8)
        self.cen = np.full(n, -1, np.int32)
        self.zl = np.full(n, -1, np.int32)
        self.pl = np.full(n, -1, np.int32)
        self.val = np.zeros((n, P), np.int16)
        self.rl = np.zeros((n, P), np.int32)

        def code(v):
            return p if v is INF else (p + 1 if v is None else v)

        for k, g in enumerate(allc):
            if g.is_constant:
                self.isc[k] = 1
                self.val[k, :] = g.value
                self.rl[k, :] = U.code_of(g.value)
                continue
            self.cen[k] = pidx[g.center()]
            self.zl[k] = pidx[ParamLine.from_coeffs(F, g.num).coeffs]
            self.pl[k] = pidx[ParamLine.from_coeffs(F, g.den).coeffs]
            for i, Q in enumerate(pts):
                self.val[k, i] = code(g.value_at(Q))
            for i, L in enumerate(lines):
                self.rl[k, i] = U.code_of(restrict_to_line(g, L))
        self.lconst = np.where(U.is_const[self.rl] == 1, U.const_code[self.rl], -1).astype(np.int16)
        self.inc = np.zeros((P, P), np.int8)
        for i, Q in enumerate(pts):
            for j, L in enumerate(lines):
                self.inc[i, j] = L.contains(Q)
        self.mline = np.zeros(P, np.int32)
        for i, Q in enumerate(pts):
            for L in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                if not ParamLine(p, L).contains(Q):
                    self.mline[i] = pidx[L]
                    break
        self.code2u = np.array([U.code_of(v) for v in list(range(p)) + [INF]] + [-1], np.int32)
        self.comp = U.compose_table
        self.inv = U.inverse_table
        self.u_is_const = U.is_const
        self.usize = U.size
        self.raw = (U.RAW0, U.RAW1, U.RAWINF)

    def cycle3_of_id(self, cid: int) -> Cycle3:
        f = self.U.funcs
        return Cycle3(f[cid // self.usize], f[cid % self.usize])

    def cycle3_id(self, c: Cycle3) -> int:
        i = self.U.index
        return i[c.f2] * self.usize + i[c.f3]

    def shard_bounds(self, n_shards: int | None = None):
        """Fixed contiguous ranges of the first free coordinate."""
        m = self.m
        if n_shards is None:
            n_shards = min(m, 64)
        b = np.linspace(0, m, n_shards + 1).astype(int)
        return [(int(b[k]), int(b[k + 1])) for k in range(n_shards)]


_TABLES: dict = {}
_LOCK = threading.Lock()


def get_tables(p: int) -> Degree4Tables:
    with _LOCK:
        T = _TABLES.get(p)
        if T is None:
            T = _TABLES[p] = Degree4Tables(p)
        return T


@nb.njit(cache=True, nogil=True)
def _check(q, p, isc, cen, zl, pl, val, lconst, inc):
    """0 if admissible and non-degenerate, else a failure code."""
    INFc = p
    P = val.shape[1]
    nconst = 0
    for a in range(4):
        if isc[q[a]]:
            nconst += 1
    mx = 0
    for a in range(4):
        if isc[q[a]]:
            continue
        c = 0
        for b in range(4):
            if not isc[q[b]] and cen[q[b]] == cen[q[a]]:
                c += 1
        if c > mx:
            mx = c
    if nconst + mx >= 3:
        return 1
    # zero and pole lines
    for a in range(4):
        if isc[q[a]]:
            continue
        for t in range(2):
            L = zl[q[a]] if t == 0 else pl[q[a]]
            J = 0
            one = False
            allc = True
            for b in range(4):
                v = lconst[q[b], L]
                if v < 0:
                    allc = False
                elif v == 0 or v == INFc:
                    J += 1
                elif v == 1:
                    one = True
            if J >= 2 and not one:
                if not allc:
                    return 2
                if J >= 3:
                    return 3
    # exceptional curves over centres, and their points
    for a in range(4):
        if isc[q[a]]:
            continue
        Pc = cen[q[a]]
        J = 0
        one = False
        for b in range(4):
            if not isc[q[b]] and cen[q[b]] == Pc:
                continue
            v = val[q[b], Pc]
            if v == 0 or v == INFc:
                J += 1
            elif v == 1:
                one = True
        if J >= 2 and not one:
            return 4
        for L in range(P):
            if not inc[Pc, L]:
                continue
            J = 0
            one = False
            for b in range(4):
                if not isc[q[b]] and cen[q[b]] == Pc:
                    v = lconst[q[b], L]
                else:
                    v = val[q[b], Pc]
                if v == 0 or v == INFc:
                    J += 1
                elif v == 1:
                    one = True
            if J >= 3 and not one:
                return 5
    # isolated points away from the centres
    for Q in range(P):
        iscen = False
        for a in range(4):
            if not isc[q[a]] and cen[q[a]] == Q:
                iscen = True
        if iscen:
            continue
        J = 0
        one = False
        for b in range(4):
            v = val[q[b], Q]
            if v == 0 or v == INFc:
                J += 1
            elif v == 1:
                one = True
        if J >= 3 and not one:
            return 6
    return 0


@nb.njit(cache=True, nogil=True)
def _sweep(pos, end, m, xy, p, isc, cen, zl, pl, val, lconst, inc, out):
    """Check triples with flat outer index pos..end-1 (index = a*m + b, the
    innermost coordinate c runs over all m). Stops early when the buffer cannot
    hold another full inner loop; returns (rows written, next position)."""
    q = np.zeros(4, np.int64)
    q[0] = xy
    cap = out.shape[0]
    n = 0
    while pos < end and n + m <= cap:
        q[1] = pos // m
        q[2] = pos % m
        for c in range(m):
            q[3] = c
            if _check(q, p, isc, cen, zl, pl, val, lconst, inc) == 0:
                out[n, 0] = q[1]
                out[n, 1] = q[2]
                out[n, 2] = c
                n += 1
        pos += 1
    return n, pos


@nb.njit(cache=True, nogil=True)
def _emit(t1, t2, t3, sgn, u_is_const, raw1, raw0, rawinf, comp, inv, usize, ids, cf, n):
    """Process one face triple; returns (new count, error flag)."""
    if t1 == raw1 or t2 == raw1 or t3 == raw1:
        return n, 0
    nc = u_is_const[t1] + u_is_const[t2] + u_is_const[t3]
    if nc >= 2:
        return n, 0
    if u_is_const[t1]:
        return n, 0
    if t2 == raw0 or t2 == rawinf or t3 == raw0 or t3 == rawinf:
        return n, 1
    s = inv[t1]
    ids[n] = comp[t2, s] * usize + comp[t3, s]
    cf[n] = sgn
    return n + 1, 0


@nb.njit(cache=True, nogil=True)
def _boundaries(triples, xy, isc, cen, zl, pl, val, rl, inc, mline, code2u,
                u_is_const, raw0, raw1, rawinf, comp, inv, usize, offsets, ids, cf):
    """Boundary chains of admissible cycles, cancelled and sorted by term id.

    Terms of cycle k end up in ids/cf[offsets[k]:offsets[k+1]]. Returns the
    number of stored terms, or -(k+1) if cycle k produced a term with a
    coordinate 0 or inf (an upstream admissibility bug)."""
    q = np.zeros(4, np.int64)
    q[0] = xy
    tri = np.zeros(3, np.int64)
    tid = np.zeros(64, np.int64)
    tcf = np.zeros(64, np.int64)
    total = 0
    offsets[0] = 0
    for k in range(triples.shape[0]):
        q[1] = triples[k, 0]
        q[2] = triples[k, 1]
        q[3] = triples[k, 2]
        nt = 0
        for i in range(4):
            if isc[q[i]]:
                continue
            for t in range(2):
                L = zl[q[i]] if t == 0 else pl[q[i]]
                sgn = 1 if t == 0 else -1
                if i % 2 == 1:
                    sgn = -sgn
                r = 0
                for j in range(4):
                    if j != i:
                        tri[r] = rl[q[j], L]
                        r += 1
                nt, err = _emit(tri[0], tri[1], tri[2], sgn, u_is_const, raw1, raw0, rawinf, comp, inv, usize, tid, tcf, nt)
                if err:
                    return -(k + 1)
                for j2 in range(4):
                    if isc[q[j2]]:
                        continue
                    Pc = cen[q[j2]]
                    if Pc == cen[q[i]] or not inc[Pc, L]:
                        continue
                    seen = False
                    for j3 in range(j2):
                        if not isc[q[j3]] and cen[q[j3]] == Pc:
                            seen = True
                    if seen:
                        continue
                    M = mline[Pc]
                    r = 0
                    for j in range(4):
                        if j == i:
                            continue
                        if not isc[q[j]] and cen[q[j]] == Pc:
                            tri[r] = rl[q[j], M]
                        else:
                            tri[r] = code2u[val[q[j], Pc]]
                        r += 1
                    nt, err = _emit(tri[0], tri[1], tri[2], sgn, u_is_const, raw1, raw0, rawinf, comp, inv, usize, tid, tcf, nt)
                    if err:
                        return -(k + 1)
        # insertion sort by id, then combine equal ids
        for a in range(1, nt):
            x = tid[a]
            y = tcf[a]
            b = a - 1
            while b >= 0 and tid[b] > x:
                tid[b + 1] = tid[b]
                tcf[b + 1] = tcf[b]
                b -= 1
            tid[b + 1] = x
            tcf[b + 1] = y
        a = 0
        while a < nt:
            s = 0
            b = a
            while b < nt and tid[b] == tid[a]:
                s += tcf[b]
                b += 1
            if s != 0:
                ids[total] = tid[a]
                cf[total] = s
                total += 1
            a = b
        offsets[k + 1] = total
    return total


@dataclass
class ShardResult:
    index: int
    triples: np.ndarray  # (n, 3) coordinate indices, lexicographic
    offsets: np.ndarray | None = None  # (n+1,) into ids/coefs
    ids: np.ndarray | None = None  # Cycle3 ids, see Degree4Tables.cycle3_id
    coefs: np.ndarray | None = None


class AdmissibilityBugError(RuntimeError):
    pass


def sweep_range(T: Degree4Tables, a0: int, a1: int, buffer_rows: int = 1 << 20) -> np.ndarray:
    m = T.m
    out = np.zeros((max(buffer_rows, m), 3), np.int32)
    blocks = []
    pos, end = a0 * m, a1 * m
    while pos < end:
        n, pos = _sweep(pos, end, m, T.xy_index, T.p, T.isc, T.cen, T.zl, T.pl, T.val, T.lconst, T.inc, out)
        blocks.append(out[:n].copy())
    return np.concatenate(blocks) if blocks else np.zeros((0, 3), np.int32)


def boundaries(T: Degree4Tables, triples: np.ndarray):
    n = len(triples)
    offsets = np.zeros(n + 1, np.int64)
    ids = np.zeros(max(1, 64 * n), np.int64)
    cf = np.zeros(max(1, 64 * n), np.int64)
    r0, r1, rinf = T.raw
    tot = _boundaries(np.ascontiguousarray(triples, dtype=np.int64), T.xy_index, T.isc, T.cen, T.zl, T.pl,
                      T.val, T.rl, T.inc, T.mline, T.code2u, T.u_is_const, r0, r1, rinf,
                      T.comp, T.inv, T.usize, offsets, ids, cf)
    if tot < 0:
        k = -tot - 1
        raise AdmissibilityBugError(f"boundary of cycle {triples[k].tolist()} has a coordinate 0 or inf")
    return offsets, ids[:tot].copy(), cf[:tot].copy()


def run_shard(T: Degree4Tables, index: int, bounds, with_boundary: bool = True) -> ShardResult:
    a0, a1 = bounds[index]
    tr = sweep_range(T, a0, a1)
    res = ShardResult(index, tr)
    if with_boundary:
        res.offsets, res.ids, res.coefs = boundaries(T, tr)
    return res


def iter_shards(T: Degree4Tables, threads: int = 1, with_boundary: bool = True, skip=(), bounds=None):
    """Yield ShardResults in shard order (threads only change the schedule)."""
    bounds = bounds or T.shard_bounds()
    todo = [k for k in range(len(bounds)) if k not in set(skip)]
    if threads <= 1:
        for k in todo:
            yield run_shard(T, k, bounds, with_boundary)
        return
    with ThreadPoolExecutor(threads) as ex:
        yield from ex.map(lambda k: run_shard(T, k, bounds, with_boundary), todo)
