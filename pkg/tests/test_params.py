import math
from fractions import Fraction

import pytest

from tightpaths.params import (RunConstants, default_omega, degree_thresholds, derive_params, disc_cap, l_one,
                               log_sq, p_zero, p_zero_exact, time_cap)


@pytest.mark.parametrize("k,j,expect", [(7, 4, (1, 1, 2, 2)), (3, 2, (1, 1, 2, 0)), (4, 2, (2, 0, 1, 0))])
def test_partition_constants(k, j, expect):
    P = derive_params(100, k, j)
    assert (P.a, P.r, P.s, P.b) == expect


def test_identities_exhaustive():
    for k in range(3, 13):
        for j in range(2, k):
            P = derive_params(1000, k, j)
            assert P.a + P.r * (k - j) == j
            assert P.s == math.ceil(j / (k - j))
            assert P.b == k - j - P.a == P.s * (k - j) - j
            assert 1 <= P.a <= k - j


@pytest.mark.parametrize("n,k,j,bad", [(10, 3, 3, "j"), (10, 3, 0, "j"), (3, 3, 2, "n")])
def test_rejects_bad_input(n, k, j, bad):
    with pytest.raises(ValueError):
        derive_params(n, k, j)


@pytest.mark.parametrize("n,k,j,expect", [(100, 3, 2, Fraction(1, 100)), (20, 7, 4, Fraction(1, 3420)),
                                          (10, 4, 2, Fraction(1, 45))])
def test_p_zero(n, k, j, expect):
    P = derive_params(n, k, j)
    assert p_zero_exact(P) == expect
    assert p_zero(P) == pytest.approx(float(expect))


def test_l_one_examples():
    assert l_one(derive_params(1000, 3, 2), 4) == pytest.approx(750)
    assert l_one(derive_params(1000, 4, 2), 4) == pytest.approx(250)
    assert l_one(derive_params(1000, 4, 2), 1 + 1e-12) == pytest.approx(0, abs=1e-6)


def test_vertex_count():
    P = derive_params(100, 7, 4)
    assert P.v(0) == 4 and P.v(4) == 16
    assert P.batch_size == 3


def test_run_constants_validation():
    with pytest.raises(ValueError):
        RunConstants(c=1.0)
    with pytest.raises(ValueError):
        RunConstants(c=4, delta=0.3, eps=0.3)
    with pytest.raises(ValueError):
        RunConstants(c=4, c_chain=(3, 2))
    with pytest.raises(ValueError):
        RunConstants(c=4, eps=0.05, c_chain=(2, 30))  # eps * c_{j-1} >= 1
    with pytest.raises(ValueError):
        RunConstants(c=4, p0_fraction=1.2)


def test_probabilities_split():
    P = derive_params(2000, 3, 2)
    rc = RunConstants(c=4, omega=5)
    p, p1, p2 = rc.probabilities(P)
    assert p == pytest.approx(4 * p_zero(P))
    assert p1 == pytest.approx((1 - 1 / 5) * p)
    assert p1 + p2 == pytest.approx(p)
    assert 1 - (1 - p1) * (1 - p2) <= p


def test_caps_and_defaults():
    P = derive_params(2000, 3, 2)
    rc = RunConstants(c=4)
    assert disc_cap(P, rc) == math.ceil(0.05**2 * 2000**2)
    assert time_cap(P, rc) == math.ceil(0.05**2 * 2000**3)
    assert len(degree_thresholds(P, rc)) == 2
    assert degree_thresholds(P, rc)[0] == pytest.approx(0.05 * 2.0 * 2000**2)
    assert log_sq(2000) == math.ceil(math.log(2000) ** 2)
    assert default_omega(10) == 3.0
    assert rc.trunk_fraction == pytest.approx(0.85)
