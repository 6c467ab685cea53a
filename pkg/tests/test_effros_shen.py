import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frnorms.constants import structural_constants
from frnorms.effros_shen import (
    GOLDEN,
    SQRT2_MINUS_1,
    SQRT3_MINUS_1,
    ContinuedFraction,
    baire_distance,
    cf_expand,
    continuity_probe,
    convergent_residual,
    convergent_table,
    convergents,
    es_constant,
    es_level,
    es_weight_t,
    eventually_periodic_theta,
    periodic_theta,
)
from frnorms.errors import InputError, RationalityError, WeightError


def test_module_constants_are_the_advertised_irrationals():
    assert GOLDEN == (math.sqrt(5) - 1) / 2
    assert SQRT2_MINUS_1 == math.sqrt(2) - 1
    assert SQRT3_MINUS_1 == math.sqrt(3) - 1


def test_expansion_examples():
    assert cf_expand(SQRT2_MINUS_1, 4).r == (0, 2, 2, 2, 2)
    assert cf_expand(GOLDEN, 5).r == (0, 1, 1, 1, 1, 1)
    assert cf_expand(math.pi - 3.0, 3).r == (0, 7, 15, 1)


def test_rational_inputs_are_rejected():
    with pytest.raises(RationalityError):
        cf_expand(0.5, 5)
    # 3/7 terminates after a few Gauss steps
    with pytest.raises(RationalityError):
        cf_expand(3.0 / 7.0, 10)
    # out-of-range inputs are a different failure
    with pytest.raises(InputError):
        cf_expand(0.0, 1)
    with pytest.raises(InputError):
        cf_expand(2.0, 3)
    with pytest.raises(InputError):
        cf_expand(GOLDEN, 0)


def test_continued_fraction_validation():
    ContinuedFraction((0, 1, 2))
    ContinuedFraction((3, 1))  # r_0 > 0 is allowed by the container
    with pytest.raises(InputError):
        ContinuedFraction((3,))  # needs r_0 and r_1
    with pytest.raises(InputError):
        ContinuedFraction((-1, 2))
    with pytest.raises(InputError):
        ContinuedFraction((0, 0, 2))
    cf = ContinuedFraction((0, 1, 2, 3))
    assert cf.depth == 3
    assert cf.tail == (1, 2, 3)


def test_fibonacci_convergents():
    cf = ContinuedFraction((0, 1, 1, 1, 1, 1))
    t = convergent_table(cf)
    assert t.p == (0, 1, 1, 2, 3, 5)
    assert t.q == (1, 1, 2, 3, 5, 8)
    assert convergents(cf, 0) == (0, 1)
    assert convergents(cf, 1) == (1, 1)
    assert convergents(cf, 5) == (5, 8)
    with pytest.raises(IndexError):
        convergents(cf, 6)
    with pytest.raises(IndexError):
        convergents(cf, -1)


def test_first_convergents_seed_correctly():
    cf = ContinuedFraction((2, 7))
    t = convergent_table(cf)
    # p_0/q_0 = r_0, p_1/q_1 = (r_0 r_1 + 1)/r_1
    assert (t.p[0], t.q[0]) == (2, 1)
    assert (t.p[1], t.q[1]) == (15, 7)


def test_convergent_overflow_detection():
    big = ContinuedFraction((0,) + (2**31,) * 3)
    with pytest.raises(InputError):
        convergent_table(big)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=2, max_size=12))
def test_convergent_identities(terms):
    cf = ContinuedFraction((0, *terms))
    t = convergent_table(cf)
    n = cf.depth
    # determinant identity, exact in integers
    for k in range(1, n + 1):
        assert t.p[k] * t.q[k - 1] - t.p[k - 1] * t.q[k] == (-1) ** (k - 1)
    # denominators strictly increase from index 1 on
    for k in range(2, n + 1):
        assert t.q[k] > t.q[k - 1]
    # convergents approximate the exact finite value at the classical rate
    from fractions import Fraction

    x = Fraction(0)
    for a in reversed(terms):
        x = 1 / (a + x)
    for k in range(1, n + 1):
        err = abs(x - Fraction(t.p[k], t.q[k]))
        assert err < Fraction(1, t.q[k] ** 2)


def test_periodic_values():
    theta, cf = periodic_theta((1,), 6)
    assert abs(theta - GOLDEN) < 1e-15
    assert cf.r == (0, 1, 1, 1, 1, 1, 1)
    theta, _ = periodic_theta((2,), 5)
    assert abs(theta - SQRT2_MINUS_1) < 1e-15
    theta, _ = periodic_theta((1, 2), 5)
    assert abs(theta - SQRT3_MINUS_1) < 1e-15


def test_eventually_periodic_values():
    # [0; 1, 2, 2, 2, ...] = 1/(1 + sqrt(2) - 1) = 1/sqrt(2)
    theta, cf = eventually_periodic_theta((1,), (2,), 5)
    assert abs(theta - 1.0 / math.sqrt(2)) < 1e-15
    assert cf.r == (0, 1, 2, 2, 2, 2)
    # pure periodic via empty prefix matches periodic_theta
    t1, c1 = eventually_periodic_theta((), (1,), 4)
    t2, c2 = periodic_theta((1,), 4)
    assert t1 == t2 and c1.r == c2.r


def test_baire_distance_examples():
    assert baire_distance((0, 1, 1), (0, 1, 1)) == 0.0
    assert baire_distance((0, 1, 1), (0, 1, 2)) == 2.0**-3
    assert baire_distance((0, 1), (1, 1)) == 2.0**-1
    # proper prefix: first disagreement just past the shared terms
    assert baire_distance((0, 1), (0, 1, 1)) == 2.0**-3
    assert baire_distance(ContinuedFraction((0, 2)).r, ContinuedFraction((0, 1)).r) == 0.25


def test_weight_parameter_values_for_golden():
    # t(theta, 1) = theta for the golden ratio
    assert abs(es_weight_t(GOLDEN, 1) - GOLDEN) < 1e-14
    # t(theta, 2) = 3 - sqrt(5)
    assert abs(es_weight_t(GOLDEN, 2) - (3.0 - math.sqrt(5))) < 1e-14
    with pytest.raises(ValueError):
        es_weight_t(GOLDEN, 0)


def test_weight_parameter_recurrence_and_range():
    for theta in (GOLDEN, SQRT2_MINUS_1, SQRT3_MINUS_1):
        cf = cf_expand(theta, 12)
        t = convergent_table(cf)
        for n in range(1, 11):
            tn = es_weight_t(theta, n, cf=cf)
            assert 0.0 < tn < 1.0
            # 1 - t_n = (-1)^n q_{n-1} (theta q_n - p_n)
            resid = convergent_residual(theta, t.q[n], t.p[n])
            want = (-1.0) ** n * t.q[n - 1] * resid
            assert abs((1.0 - tn) - want) < 1e-12


def test_residual_signs_alternate():
    # even convergents approach from below, so theta q - p > 0 there
    cf = cf_expand(SQRT2_MINUS_1, 10)
    t = convergent_table(cf)
    for n in range(1, 10):
        resid = convergent_residual(SQRT2_MINUS_1, t.q[n], t.p[n])
        assert resid != 0.0
        assert (resid > 0) == (n % 2 == 0)


def test_residual_is_compensated():
    # naive evaluation loses most digits once q is large; the compensated
    # form keeps the small residual accurate
    cf = cf_expand(SQRT2_MINUS_1, 9)
    t = convergent_table(cf)
    q, p = t.q[9], t.p[9]
    resid = convergent_residual(SQRT2_MINUS_1, q, p)
    import fractions

    exact = fractions.Fraction(SQRT2_MINUS_1) * q - p
    assert abs(resid - float(exact)) < 1e-18 * q


def test_golden_level_structure():
    lvl = es_level(GOLDEN, 2)
    assert lvl.n == 2
    assert lvl.r_n == 1
    # Fibonacci dimensions q_2 = 2, q_1 = 1
    assert lvl.shape.dims == (2, 1)
    assert lvl.p == (0, 1, 1) and lvl.q == (1, 1, 2)
    b = lvl.subalgebra
    assert [pt.terms for pt in b.partitions] == [((1, 1), (1, 1)), ((1, 1),)]
    assert b.groups == (((1, 1), (2, 1)), ((1, 2),))
    assert not b.trivially_grouped
    assert abs(sum(lvl.weight.weights) - 1.0) < 1e-15
    assert abs(lvl.t - (3.0 - math.sqrt(5))) < 1e-14
    with pytest.raises(ValueError):
        es_level(GOLDEN, 1)


def test_level_weights_follow_the_parameter():
    for theta in (GOLDEN, SQRT2_MINUS_1):
        for n in (2, 3, 4):
            lvl = es_level(theta, n)
            t = lvl.t
            assert lvl.weight.weights == (t, 1.0 - t)
            assert lvl.shape.num_summands == 2


def test_level_depth_guard():
    cf = cf_expand(GOLDEN, 3)
    with pytest.raises(InputError):
        es_level(GOLDEN, 4, cf=cf)


def test_golden_constant_level_2():
    # closed form (sqrt(5) - 1)/4 at level 2 for the golden ratio
    want = (math.sqrt(5.0) - 1.0) / 4.0
    assert abs(es_constant(GOLDEN, 2) - want) < 1e-14


def test_sqrt2_constant_level_2():
    assert abs(es_constant(SQRT2_MINUS_1, 2) - 0.09763107293781766) < 1e-15


def test_constant_oracle_identity():
    """The closed form agrees with the structural bound of the level."""
    for theta in (GOLDEN, SQRT2_MINUS_1, SQRT3_MINUS_1):
        for n in range(2, 7):
            lvl = es_level(theta, n)
            c = structural_constants(lvl.subalgebra, lvl.weight)
            assert abs(c.bound - es_constant(theta, n)) < 1e-12
            assert c.theorem == "cross-summand"


def test_periodic_inputs_give_level_independent_constants():
    """For a periodic expansion the residual ratio over two levels is the
    squared period contraction, so the constant is the same at every level."""
    for theta, want in (
        (GOLDEN, GOLDEN / 2.0),
        (SQRT2_MINUS_1, 0.09763107293781766),
    ):
        # theta itself carries an O(eps) representation error that the
        # residuals amplify by q_N, so deep levels drift at the 1e-11 scale
        vals = [es_constant(theta, n) for n in range(2, 9)]
        assert all(abs(vv - want) < 5e-10 for vv in vals)
        assert all(0.0 < vv <= 1.0 for vv in vals)


def test_aperiodic_prefix_makes_constants_level_dependent():
    theta, cf = eventually_periodic_theta((3, 1, 2), (1,), 9)
    vals = [es_constant(theta, n, cf=cf) for n in range(2, 8)]
    assert len(set(round(vv, 6) for vv in vals)) > 1
    assert all(0.0 < vv <= 1.0 for vv in vals)


def test_continuity_probe_shapes_and_self_entry():
    etas = [GOLDEN, SQRT2_MINUS_1]
    rep = continuity_probe(GOLDEN, etas, 4)
    assert rep.theta == GOLDEN
    assert rep.level == 4
    assert len(rep.entries) == 2
    selfe = rep.entries[0]
    assert selfe.eta == GOLDEN
    assert selfe.agreement_depth == 5  # all N + 1 terms agree
    assert selfe.baire == 0.0
    assert selfe.gap == 0.0
    assert selfe.lipschitz_ratio == 0.0
    assert selfe.constant_theta == selfe.constant_eta


def test_continuity_probe_detects_disagreement():
    # eta = 1 - theta = (3 - sqrt(5))/2 has expansion [0; 2, 1, 1, ...];
    # the probe compares tail terms, which disagree immediately
    eta = 1.0 - GOLDEN
    rep = continuity_probe(GOLDEN, [eta], 4)
    e = rep.entries[0]
    assert e.agreement_depth == 0
    assert e.baire == 2.0**-1
    assert e.gap > 0.0
    assert e.lipschitz_ratio == e.gap / abs(GOLDEN - eta)


def test_continuity_probe_converges_along_convergent_tails():
    # perturbations that share ever longer golden prefixes
    theta = GOLDEN
    etas = []
    for k in (3, 5, 7):
        eta, _ = eventually_periodic_theta((1,) * k, (2,), 10)
        etas.append(eta)
    rep = continuity_probe(theta, etas, 2)
    gaps = [e.gap for e in rep.entries]
    dists = [abs(theta - e.eta) for e in rep.entries]
    # closer inputs give closer constants
    assert dists[0] > dists[1] > dists[2]
    assert gaps[0] >= gaps[1] >= gaps[2]
    # both readings of the alternative formula are reported
    for e in rep.entries:
        assert e.constant_eta_mixed > 0.0
        assert e.constant_eta > 0.0


def test_probe_perturbation_cfs_override():
    eta, eta_cf = periodic_theta((2,), 6)
    rep = continuity_probe(GOLDEN, [eta], 5, perturbation_cfs=[eta_cf])
    assert rep.entries[0].agreement_depth == 0
    with pytest.raises(InputError):
        continuity_probe(GOLDEN, [eta], 6, perturbation_cfs=[eta_cf])
