"""Column identifications and extra relations among degree-3 cycles that hold
modulo boundaries of degree-4 cycles:

- INVERT_LAST:  [x, f, g] = -[x, f, 1/g]           (columns merged with a sign)
- SPLIT_PRODUCT: [x, f, h1 h2] = [x, f, h1] + [x, f, h2]   (extra relation row)
- ROOT_OF_UNITY_TORSION: n [x, f, z] = 0 for a constant z of order n  (extra row)
- SWAP_WITH_CORRECTION: [x, g, h] = -[x, h, g] + corrections at the divisor
  of x; only applied when every correction point has a coordinate 1, so the
  corrections vanish (policy "vanishing-only").

Every applied step is checked against the degree-4 relation lattice: its
difference chain must be an integer combination of boundaries, otherwise the
run aborts with RewriteUnsoundError.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .cycles import Chain, Cycle3
from .exactla import RowLattice
from .fraclin import FracLin1, mobius_or_point, normalize1
from .gf import INF, get_field


class Rule(enum.Enum):
    SPLIT_PRODUCT = "split_product"
    INVERT_LAST = "invert_last"
    ROOT_OF_UNITY_TORSION = "root_of_unity_torsion"
    SWAP_WITH_CORRECTION = "swap_with_correction"


DEFAULT_RULES = frozenset({Rule.INVERT_LAST, Rule.ROOT_OF_UNITY_TORSION, Rule.SPLIT_PRODUCT})
CORRECTION_POLICIES = ("vanishing-only",)


class RewriteUnsoundError(RuntimeError):
    pass


class RuleNotApplicable(ValueError):
    pass


class RuleDisabled(RuntimeError):
    pass


@dataclass(frozen=True)
class RewriteConfig:
    enabled: bool = True
    rules: frozenset = DEFAULT_RULES
    correction_policy: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "rules", frozenset(Rule(r) for r in self.rules))
        if Rule.SWAP_WITH_CORRECTION in self.rules and self.correction_policy not in CORRECTION_POLICIES:
            raise ValueError("SWAP_WITH_CORRECTION needs a correction policy, one of " + ", ".join(CORRECTION_POLICIES))

    @property
    def active(self) -> frozenset:
        return self.rules if self.enabled else frozenset()

    def describe(self) -> dict:
        return {
            "enabled": self.enabled,
            "rules": sorted(r.value for r in self.rules),
            "correction_policy": self.correction_policy,
        }


@dataclass
class RewriteStep:
    rule: Rule
    term: Cycle3
    output: Chain  # what the term equals
    correction: Chain | None = None

    def difference(self) -> Chain:
        """term - output, which must be a boundary."""
        return Chain({self.term: 1}) - self.output

    def log_line(self) -> str:
        out = " ".join(f"{v:+d}*{c.encode()}" for c, v in sorted(self.output.items())) or "0"
        return f"{self.rule.value}\t{self.term.encode()}\t{out}"


def reciprocal1(g: FracLin1) -> FracLin1:
    if g.is_constant:
        return normalize1(get_field(g.p), 0, get_field(g.p).inv(g.value), 0, 1)
    a, b, c, d = g.coeffs
    return normalize1(get_field(g.p), c, d, a, b)


def invert_last(c: Cycle3) -> tuple:
    """([x, f, 1/g], -1): the term equals minus the returned cycle."""
    return Cycle3(c.f2, reciprocal1(c.f3)), -1


def invert_last_canonical(c: Cycle3) -> tuple:
    """(representative, sign) with c = sign * representative, choosing the
    smaller coefficient tuple of c and [x, f, 1/g]."""
    d, _ = invert_last(c)
    if d.key() < c.key():
        return d, -1
    return c, 1


def _poly_mul(u, v, p):
    # (u0 x + u1)(v0 x + v1), coefficients high to low
    return [u[0] * v[0] % p, (u[0] * v[1] + u[1] * v[0]) % p, u[1] * v[1] % p]


def _quad_roots(P, p):
    r = [x for x in range(p) if (P[0] * x * x + P[1] * x + P[2]) % p == 0]
    if P[0] == 0:
        r.append(INF)
    return r


def _div_linear(P, x, p):
    """Divide the quadratic P (homogeneous in [x:1]) by its linear factor at the root x."""
    if x is INF:
        return [P[1], P[2]]
    return [P[0], (P[1] + P[0] * x) % p]


def product1(h1: FracLin1, h2: FracLin1):
    """h1*h2 as a FracLin1 or raw constant if it has degree <= 1, else None."""
    p = h1.p
    F = get_field(p)

    def nd(h):
        if h.is_constant:
            return (0, h.value), (0, 1)
        return (h.a, h.b), (h.c, h.d)

    (n1, d1), (n2, d2) = nd(h1), nd(h2)
    N, D = _poly_mul(n1, n2, p), _poly_mul(d1, d2, p)
    if not any(N):
        return 0
    # treat both as homogeneous quadratics; cancel one common root if present
    common = [x for x in _quad_roots(N, p) if x in _quad_roots(D, p)]
    if not common:
        return None
    n, d = _div_linear(N, common[0], p), _div_linear(D, common[0], p)
    return mobius_or_point(F, n[0], n[1], d[0], d[1])


def root_of_unity_order(c: Cycle3):
    """n if the last coordinate is a constant of multiplicative order n, else None."""
    if not c.f3.is_constant:
        return None
    return get_field(c.p).order(c.f3.value)


def swap_with_correction(c: Cycle3, policy: str | None) -> tuple:
    """([x, h, g], -1) when the correction terms at the divisor of x vanish."""
    if policy not in CORRECTION_POLICIES:
        raise RuleDisabled("swap needs a correction policy")
    for x0 in (0, INF):
        a, b = c.f3(x0), c.f2(x0)
        if a != 1 and b != 1:
            raise RuleNotApplicable(f"correction ({a}, {b}) at x={x0} does not vanish")
    return Cycle3(c.f3, c.f2), -1


@dataclass
class RewriteResult:
    column_map: dict = field(default_factory=dict)  # col -> (representative col, sign)
    extra_rows: list = field(default_factory=list)  # sparse dict rows over original columns
    steps: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)

    def audit_lines(self) -> list:
        return [s.log_line() for s in self.steps]


def _chain_vector(chain: Chain, index: dict) -> dict:
    v = {}
    for c, x in chain.items():
        v[index[c]] = v.get(index[c], 0) + x
    return {k: x for k, x in v.items() if x}


def plan_rewrites(columns: list, config: RewriteConfig, lattice: RowLattice | None = None) -> RewriteResult:
    """Rewrites applicable to the column set (sorted Cycle3 list).

    If lattice (the degree-4 relation lattice over the same columns) is given,
    every step is checked for membership; a failing step raises.
    """
    res = RewriteResult()
    rules = config.active
    index = {c: i for i, c in enumerate(columns)}
    counts = {r.value: 0 for r in rules}

    def check(step: RewriteStep):
        if lattice is not None:
            vec = [0] * len(columns)
            for k, x in _chain_vector(step.difference(), index).items():
                vec[k] = x
            if not lattice.contains(vec):
                raise RewriteUnsoundError(f"{step.rule.value} on {step.term.encode()} is not a consequence of the degree-4 boundaries")
        res.steps.append(step)
        counts[step.rule.value] += 1

    if Rule.INVERT_LAST in rules:
        for c in columns:
            d, sign = invert_last(c)
            if d not in index:
                continue
            if d == c:
                # g = 1/g: the identity reads 2 [x, f, g] = 0
                check(RewriteStep(Rule.INVERT_LAST, c, Chain({c: -1})))
                res.extra_rows.append({index[c]: 2})
                continue
            if d.key() < c.key():
                check(RewriteStep(Rule.INVERT_LAST, c, Chain({d: sign})))
                res.column_map[index[c]] = (index[d], sign)
    if Rule.SWAP_WITH_CORRECTION in rules:
        for c in columns:
            try:
                d, sign = swap_with_correction(c, config.correction_policy)
            except RuleNotApplicable:
                continue
            if d not in index or d == c:
                continue
            check(RewriteStep(Rule.SWAP_WITH_CORRECTION, c, Chain({d: sign})))
            res.extra_rows.append({index[c]: 1, index[d]: 1})
    if Rule.ROOT_OF_UNITY_TORSION in rules:
        for c in columns:
            n = root_of_unity_order(c)
            if n is None:
                continue
            check(RewriteStep(Rule.ROOT_OF_UNITY_TORSION, c, Chain({c: 1 - n})))
            res.extra_rows.append({index[c]: n})
    if Rule.SPLIT_PRODUCT in rules:
        by_f = {}
        for c in columns:
            by_f.setdefault(c.f2, []).append(c)
        for f, cs in by_f.items():
            for i, c1 in enumerate(cs):
                for c2 in cs[i:]:
                    h = product1(c1.f3, c2.f3)
                    if h is None or h is INF or (not isinstance(h, FracLin1) and h in (0, 1)):
                        continue
                    if not isinstance(h, FracLin1):
                        h = normalize1(get_field(f.p), 0, h, 0, 1)
                    target = Cycle3(f, h)
                    if target not in index:
                        continue
                    step = RewriteStep(Rule.SPLIT_PRODUCT, target, Chain({c1: 1}) + Chain({c2: 1}))
                    if not step.difference():
                        continue
                    check(step)
                    res.extra_rows.append(_chain_vector(step.difference(), index))
    res.counts = counts
    return res
