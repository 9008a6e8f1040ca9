from itertools import product
from math import comb

import numpy as np
import pytest

from grassgeo.errors import DegenerateWeights, TooLarge
from grassgeo.grassmann import Shape
from grassgeo.topology import (
    borel_weil_dim,
    cell_count,
    energy_critical_check,
    euler_characteristic,
    kodaira_n,
    orthogonal_coherent_count,
    seven_numbers,
)

SMALL = [(n, m) for n in range(1, 7) for m in range(1, 7) if n + m <= 12]


def brute_partitions(n, m):
    """All nonincreasing n-tuples over 0..m, by exhaustive product."""
    return [p for p in product(range(m + 1), repeat=n) if all(a >= b for a, b in zip(p, p[1:]))]


@pytest.mark.parametrize(
    "fn", [euler_characteristic, cell_count, borel_weil_dim, kodaira_n, orthogonal_coherent_count]
)
@pytest.mark.parametrize("shape,expected", [((1, 1), 2), ((1, 2), 3), ((2, 2), 6), ((2, 3), 10)])
def test_invariant_examples(fn, shape, expected):
    assert fn(Shape(*shape)) == expected


def test_cells_for_single_row():
    for m in range(1, 8):
        assert cell_count(Shape(1, m)) == m + 1


def test_cells_square_two_listed():
    assert sorted(brute_partitions(2, 2)) == [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]


@pytest.mark.parametrize("n,m", SMALL)
def test_routes_agree(n, m):
    s = Shape(n, m)
    expected = comb(n + m, n)
    assert euler_characteristic(s) == expected
    assert cell_count(s) == expected
    assert borel_weil_dim(s) == expected
    assert kodaira_n(s) == expected
    if n + m <= 8:
        assert cell_count(s) == len(brute_partitions(n, m))
        assert orthogonal_coherent_count(s) == expected


@pytest.mark.parametrize("n,m", [(1, 4), (2, 5), (3, 4)])
def test_invariants_symmetric(n, m):
    for fn in [euler_characteristic, cell_count, borel_weil_dim, kodaira_n]:
        assert fn(Shape(n, m)) == fn(Shape(m, n))


def test_wide_integers():
    assert euler_characteristic(Shape(40, 40)) == comb(80, 40)
    assert cell_count(Shape(40, 40)) == comb(80, 40)
    assert borel_weil_dim(Shape(30, 35)) == comb(65, 30)


def test_enumeration_limit():
    with pytest.raises(TooLarge):
        orthogonal_coherent_count(Shape(10, 11))


def test_energy_on_projective_line():
    count, certified = energy_critical_check(Shape(1, 1), [0.0, 1.0])
    assert (count, certified) == (2, True)


def test_energy_square():
    count, certified = energy_critical_check(Shape(2, 2), [1, 2, 3, 4])
    assert (count, certified) == (6, True)


def test_energy_degenerate_weights():
    with pytest.raises(DegenerateWeights):
        energy_critical_check(Shape(2, 2), [1, 1, 2, 3])


@pytest.mark.parametrize("n,m", [(1, 2), (2, 2), (2, 3)])
def test_energy_count_independent_of_weights(n, m):
    rng = np.random.default_rng(n * 7 + m)
    for _ in range(5):
        a = rng.standard_normal(n + m) * 3
        count, certified = energy_critical_check(Shape(n, m), a, samples=10, seed=int(rng.integers(1 << 30)))
        assert count == comb(n + m, n) and certified


@pytest.mark.parametrize("shape,value", [((1, 1), 2), ((2, 2), 6), ((2, 3), 10)])
def test_seven_numbers(shape, value):
    report = seven_numbers(Shape(*shape), np.arange(1, sum(shape) + 1))
    assert report.all_equal
    assert report.values == (value,) * 7
    assert report.to_dict()["all_equal"] is True
