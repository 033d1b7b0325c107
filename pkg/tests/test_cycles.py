import itertools

import pytest

from linchow.cycles import (
    Chain,
    ConstantFirstCoordinateError,
    Cycle3,
    Cycle4,
    Point2,
    admissibility4_failure,
    admissible3,
    admissible4,
    canonicalize3,
    coordinate_candidates4,
    degenerate4_tests,
    enumerate3,
    enumerate4,
)
from linchow.fraclin import constant1, identity1, normalize1, normalize2, xy_coordinate
from linchow.gf import get_field
from linchow.properties import check_enumerate3_oracle, pointwise_admissible3


def f1(p, a, b, c, d):
    return normalize1(get_field(p), a, b, c, d)


def test_canonicalize_identity_and_mobius():
    F = get_field(2)
    x = identity1(F)
    c = canonicalize3(x, f1(2, 1, 0, 1, 1), f1(2, 1, 1, 0, 1))
    assert c == Cycle3(f1(2, 1, 0, 1, 1), f1(2, 1, 1, 0, 1))
    # ((x+1)/x, x, x+1): substitute the inverse of (x+1)/x, which is 1/(x+1)
    c = canonicalize3(f1(2, 1, 1, 1, 0), x, f1(2, 1, 1, 0, 1))
    assert c.pretty() == "[x, 1/(x+1), x/(x+1)]"
    for t in F.proj_points():
        s = f1(2, 0, 1, 1, 1)(t)
        assert f1(2, 1, 1, 1, 0)(s) == t


def test_canonicalize_rejects_constant_first():
    F = get_field(3)
    with pytest.raises(ConstantFirstCoordinateError):
        canonicalize3(constant1(F, 2), identity1(F), identity1(F))


def test_admissible3_examples():
    F2, F3 = get_field(2), get_field(3)
    assert admissible3(Cycle3(f1(2, 1, 1, 0, 1), f1(2, 1, 1, 1, 0)))
    x = identity1(F2)
    assert not admissible3(Cycle3(x, x))
    assert not admissible3(Cycle3(identity1(F3), f1(3, 2, 1, 1, 1)))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_enumerate3_matches_pointwise_oracle(p):
    r = check_enumerate3_oracle(p)
    assert r.ok, r.detail


def test_pointwise_oracle_by_hand_p2():
    F = get_field(2)
    x = identity1(F)
    assert pointwise_admissible3(f1(2, 1, 1, 0, 1), f1(2, 1, 1, 1, 0))
    assert not pointwise_admissible3(x, x)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_enumerate3_sorted_unique_threads(p):
    a = enumerate3(p)
    assert [c.key() for c in a] == sorted(c.key() for c in a)
    assert len(set(a)) == len(a)
    assert enumerate3(p, threads=4) == a


def test_cycle3_roundtrip_and_pretty():
    F = get_field(5)
    for c in enumerate3(5)[:200]:
        assert Cycle3.decode(c.encode(), F) == c
    c = Cycle3.decode("0,2,0,1|1,4,1,1", F)
    assert c.pretty() == "[x, 2, (x+4)/(x+1)]"


def test_chain_arithmetic():
    a, b = Point2(2, 3), Point2(3, 2)
    c = Chain({a: 1}) + Chain({b: -1, a: 1})
    assert c == {a: 2, b: -1}
    assert c - c == Chain() and not (c - c)
    assert c.scaled(3)[a] == 6 and len(c) == 2


# -- degree 4 -------------------------------------------------------------------


def test_candidate_counts():
    assert len(coordinate_candidates4(get_field(2))) == 42
    assert len(coordinate_candidates4(get_field(3))) == 313


def test_degeneracy_examples_p3():
    F = get_field(3)
    xy = xy_coordinate(F)
    n2 = lambda a, b: normalize2(F, a, b)
    # every coordinate a function of x/y
    v = degenerate4_tests((xy, n2((0, 1, 0), (1, 1, 0)), n2((1, 2, 0), (1, 0, 0)), n2((2, 1, 0), (0, 1, 0))))
    assert v.degenerate and "x/y" in v.reasons[0]
    # three coordinates independent of y
    v = degenerate4_tests((xy, n2((1, 0, 1), (0, 0, 1)), n2((1, 0, 2), (1, 0, 1)), n2((1, 0, 0), (1, 0, 2))))
    assert v.degenerate and "independent of one variable" in v.reasons[0]
    # three coordinates functions of x+2y
    g = (n2((1, 2, 1), (0, 0, 1)), n2((1, 2, 0), (1, 2, 2)), n2((1, 2, 2), (1, 2, 1)))
    v = degenerate4_tests((xy,) + g)
    assert v.degenerate and "linear form" in v.reasons[0]
    for h in g:
        # constant along each line x+2y = const
        for s in range(3):
            vals = {h.value_at(((s - 2 * y) % 3, y, 1)) for y in range(3)} - {None}
            assert len(vals) <= 1
    ok = (xy, n2((1, 0, 1), (0, 1, 1)), n2((1, 1, 1), (0, 1, 0)), n2((1, 2, 1), (1, 0, 0)))
    assert not degenerate4_tests(ok)


def test_admissible4_counterexample():
    F = get_field(3)
    q = (xy_coordinate(F), normalize2(F, (1, 0, 1), (0, 1, 1)),
         normalize2(F, (1, 1, 1), (0, 1, 0)), normalize2(F, (1, 2, 1), (1, 0, 0)))
    assert not degenerate4_tests(q)
    assert not admissible4(q)
    assert "curve face" in admissibility4_failure(q)


def test_enumerate4_reference_matches_compiled_p2():
    F = get_field(2)
    C = coordinate_candidates4(F)
    ref = [g for g in itertools.product(C, repeat=3) if not degenerate4_tests(g) and admissible4(g)]
    fast = list(enumerate4(2, keep_empty_boundary=True))
    assert len(fast) == len(ref) == 2496
    assert [c.coordinates() for c in fast] == [(xy_coordinate(F),) + g for g in ref]


def test_enumerate4_sorted_unique_p2():
    cyc = list(enumerate4(2))
    assert len(cyc) == 1984
    keys = [c.encode() for c in cyc]
    assert len(set(keys)) == len(keys)
    F = get_field(2)
    assert all(Cycle4.decode(k, F) == c for k, c in zip(keys, cyc))
    assert list(enumerate4(2, threads=3)) == cyc
