"""Property checks run by `linchow verify`.

Each check returns a CheckResult; none of them raise on failure.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .gf import INF, FieldConfig, get_field


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


def check_field(p: int) -> CheckResult:
    F = FieldConfig(p)
    els = F.elements()
    for a, b in itertools.product(els, els):
        if F.add(a, b) != F.add(b, a) or F.mul(a, b) != F.mul(b, a):
            return CheckResult("field axioms", False, f"commutativity at {a},{b}")
        for c in els:
            if F.mul(a, F.add(b, c)) != F.add(F.mul(a, b), F.mul(a, c)):
                return CheckResult("field axioms", False, f"distributivity at {a},{b},{c}")
    for a in F.units():
        if F.mul(a, F.inv(a)) != 1 or F.inv(F.inv(a)) != a:
            return CheckResult("field axioms", False, f"inverse of {a}")
    return CheckResult("field axioms", True, f"exhaustive over F_{p}")


def check_mobius(p: int, samples: int = 2000, seed: int = 0) -> CheckResult:
    from .fraclin import all_mobius, compose1, identity1, invert_mobius, normalize1, zeros_poles1

    F = get_field(p)
    ms = all_mobius(F)
    if len(ms) != p * (p - 1) * (p + 1):
        return CheckResult("moebius group", False, f"{len(ms)} functions")
    pts = F.proj_points()
    e = identity1(F)
    for f in ms:
        if sorted(map(F.point_key, (f(x) for x in pts))) != list(range(p + 1)):
            return CheckResult("moebius group", False, f"{f!r} not bijective")
        if compose1(f, invert_mobius(f)) != e or compose1(invert_mobius(f), f) != e:
            return CheckResult("moebius group", False, f"inverse of {f!r}")
        if normalize1(F, *f.coeffs) != f:
            return CheckResult("moebius group", False, f"normalize not idempotent on {f!r}")
        z, q = zeros_poles1(f)
        if f(z) != 0 or f(q) is not INF:
            return CheckResult("moebius group", False, f"zero/pole of {f!r}")
    rng = random.Random(seed)
    for _ in range(samples):
        f, g, h = (rng.choice(ms) for _ in range(3))
        if compose1(compose1(f, g), h) != compose1(f, compose1(g, h)):
            return CheckResult("moebius group", False, "associativity")
    return CheckResult("moebius group", True, f"{len(ms)} elements")


def pointwise_admissible3(f2, f3) -> bool:
    """Oracle: along the curve t -> (t, f2(t), f3(t)) no point has two
    coordinates in {0, inf} unless a coordinate equals 1 there."""
    F = get_field(f2.p)
    if f2.is_constant and f3.is_constant:
        return False
    for t in F.proj_points():
        vals = (t, f2(t), f3(t))
        if 1 in [v for v in vals if v is not INF]:
            continue
        if sum(1 for v in vals if v is INF or v == 0) >= 2:
            return False
    return True


def check_enumerate3_oracle(p: int) -> CheckResult:
    from .cycles import admissible3, enumerate3, Cycle3
    from .universe import get_universe

    U = get_universe(p)
    fs = U.funcs
    oracle = {(a, b) for a in fs for b in fs if pointwise_admissible3(a, b)}
    got = {(c.f2, c.f3) for c in enumerate3(p)}
    if got != oracle:
        return CheckResult("enumerate3 vs pointwise oracle", False, f"{len(got ^ oracle)} differences")
    bad = sum(1 for a, b in oracle if not admissible3(Cycle3(a, b)))
    return CheckResult("enumerate3 vs pointwise oracle", bad == 0, f"{len(got)} cycles")


def random_admissible4(p: int, n: int, seed: int = 0, max_tries: int = 10**7):
    """n admissible non-degenerate degree-4 cycles drawn uniformly from the candidates."""
    from .cycles import Cycle4, admissible4, coordinate_candidates4, degenerate4_tests

    F = get_field(p)
    cands = coordinate_candidates4(F)
    rng = random.Random(seed)
    out = []
    for _ in range(max_tries):
        if len(out) >= n:
            break
        g = tuple(rng.choice(cands) for _ in range(3))
        if not degenerate4_tests(g) and admissible4(g):
            out.append(Cycle4(*g))
    return out


def _point_lattice(p: int):
    from .boundary import point_relations
    from .exactla import RowLattice

    L = RowLattice((p - 2) ** 2)
    for r in point_relations(p).to_dense():
        L.add(r)
    return L


def dd_defect(c4, p: int, lattice=None) -> list:
    """Point-class vector of boundary3(boundary4(c)) modulo the point relations
    (empty list when it vanishes)."""
    from .boundary import PointClassScheme, boundary3, boundary4, point_class

    n = (p - 2) ** 2
    if n == 0:
        return []
    vec = [0] * n
    for c3, k in boundary4(c4).items():
        for pt, v in boundary3(c3).items():
            vec[point_class(pt, PointClassScheme.FULLQUOTIENT, p)] += k * v
    L = lattice or _point_lattice(p)
    return [] if L.contains(vec) else vec


def dd_exhaustive_fast(p: int) -> tuple:
    """(failures, cycles) over every admissible degree-4 cycle, using the
    compiled boundaries and the degree-3 boundary of each distinct term."""
    from . import _fast4
    from .boundary import PointClassScheme, boundary3, point_class

    T = _fast4.get_tables(p)
    L = _point_lattice(p)
    n = (p - 2) ** 2
    b3 = {}
    bad = total = 0
    for res in _fast4.iter_shards(T):
        off = res.offsets.tolist()
        ids, cf = res.ids.tolist(), res.coefs.tolist()
        for k in range(len(res.triples)):
            total += 1
            vec = [0] * n
            for t in range(off[k], off[k + 1]):
                row = b3.get(ids[t])
                if row is None:
                    row = b3[ids[t]] = [(point_class(pt, PointClassScheme.FULLQUOTIENT, p), v)
                                        for pt, v in boundary3(T.cycle3_of_id(ids[t])).items()]
                for j, v in row:
                    vec[j] += cf[t] * v
            if n and any(vec) and not L.contains(vec):
                bad += 1
    return bad, total


def sample_admissible4_fast(p: int, n: int, seed: int = 0):
    """n cycles drawn without replacement from the compiled enumeration."""
    from . import _fast4
    from .cycles import Cycle4

    T = _fast4.get_tables(p)
    allt = [tuple(t) for res in _fast4.iter_shards(T, with_boundary=False) for t in res.triples.tolist()]
    rng = random.Random(seed)
    pick = rng.sample(allt, min(n, len(allt)))
    return [Cycle4(*(T.coords[i] for i in t)) for t in pick]


def check_dd(p: int, samples: int = 2000, seed: int = 0) -> CheckResult:
    if p <= 3:
        bad, total = dd_exhaustive_fast(p)
        cyc = sample_admissible4_fast(p, samples, seed)
        L = _point_lattice(p)
        bad_ref = sum(1 for c in cyc if dd_defect(c, p, L))
        return CheckResult("d o d = 0", bad == 0 and bad_ref == 0,
                           f"{bad} failures in all {total} cycles (compiled), {bad_ref} in {len(cyc)} sampled (reference)")
    cyc = random_admissible4(p, samples, seed)
    L = _point_lattice(p)
    bad = sum(1 for c in cyc if dd_defect(c, p, L))
    return CheckResult("d o d = 0", bad == 0, f"{bad} failures in {len(cyc)} sampled cycles")


def check_rewrites(p: int) -> CheckResult:
    from .pipeline import RunConfig, run_homology
    from .rewrite import RewriteConfig, RewriteUnsoundError

    try:
        on = run_homology(RunConfig(p))
    except RewriteUnsoundError as e:
        return CheckResult("rewrite soundness", False, str(e))
    off = run_homology(RunConfig(p, rewrite=RewriteConfig(enabled=False)))
    same = on.quotient == off.quotient
    n = sum(on.rewrites["applied"].values())
    return CheckResult("rewrite soundness", same, f"{n} steps in the row space; quotient {on.quotient} vs {off.quotient}")


def check_exactla(n_mats: int = 200, seed: int = 0) -> CheckResult:
    from .exactla import kernel_basis, rank, smith_normal_form
    from .oracles import naive_smith

    rng = random.Random(seed)
    for _ in range(n_mats):
        r, c = rng.randint(1, 8), rng.randint(1, 8)
        M = [[rng.randint(-10, 10) for _ in range(c)] for _ in range(r)]
        if smith_normal_form(M) != naive_smith(M):
            return CheckResult("exactla vs naive oracle", False, f"divisors of {M}")
        K = kernel_basis(M)
        if len(K) != c - rank(M) or any(sum(a * b for a, b in zip(row, v)) for v in K for row in M):
            return CheckResult("exactla vs naive oracle", False, f"kernel of {M}")
    return CheckResult("exactla vs naive oracle", True, f"{n_mats} random matrices")


def run_all(p: int, samples: int = 2000) -> list:
    out = [check_field(p), check_mobius(p), check_exactla()]
    if p <= 11:
        out.append(check_enumerate3_oracle(p))
    out.append(check_dd(p, samples))
    if p <= 3:
        out.append(check_rewrites(p))
    return out
