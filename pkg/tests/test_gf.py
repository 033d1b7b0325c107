import pytest

from linchow.gf import INF, FieldConfig, get_field, is_prime
from linchow.properties import check_field


def test_addition_examples():
    assert get_field(2).add(1, 1) == 0
    assert get_field(3).add(2, 2) == 1
    assert get_field(11).add(7, 9) == 5


def test_inverse_examples():
    assert get_field(3).inv(2) == 2
    for p in (2, 3, 5, 7, 31):
        assert get_field(p).inv(1) == 1
    # brute-force scan
    assert get_field(7).inv(3) == next(b for b in range(1, 7) if 3 * b % 7 == 1) == 5


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        get_field(5).inv(0)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 31])
def test_field_axioms(p):
    assert check_field(p).ok


@pytest.mark.parametrize("bad", [0, 1, 4, 9, 37, -3])
def test_rejects_non_primes_and_large(bad):
    with pytest.raises(ValueError):
        FieldConfig(bad)


def test_projective_line_and_orders():
    F = get_field(5)
    assert F.proj_points() == [0, 1, 2, 3, 4, INF]
    assert F.point_key(INF) == 5
    assert [F.order(a) for a in F.units()] == [1, 4, 4, 2]
    assert is_prime(31) and not is_prime(33)
