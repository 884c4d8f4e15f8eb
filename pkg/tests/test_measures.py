import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonabelian_roth.errors import BadExponent, EmptySet, NegativeMeasure, NotInNextLevel, StepOutOfRange
from nonabelian_roth.groups import cyclic, dihedral, generated_subgroup, product_set, quaternion8
from nonabelian_roth.measures import (
    FunctionVec,
    MeasureVec,
    act_left,
    act_left_measure,
    act_right,
    act_right_measure,
    constant,
    convolve_fn_measure,
    convolve_measure_fn,
    convolve_measures,
    haar_defect_bound,
    indicator,
    inner_product,
    lp_norm,
    pair,
    point_mass,
    tilde,
    tv_haar_defect,
    tv_haar_defect_left,
    uniform_measure,
)
from nonabelian_roth.msys import subgroup_chain_system

from strategies import elements, groups, subsets

reals = st.floats(-3, 3, allow_nan=False)


def functions(G):
    return st.lists(reals, min_size=G.order, max_size=G.order).map(lambda v: FunctionVec(G, np.array(v)))


def measures(G):
    return st.lists(st.floats(0, 2), min_size=G.order, max_size=G.order).map(
        lambda v: MeasureVec(G, np.array(v)))


def naive_conv(f, mu):
    g = f.group
    return [sum(f.values[g.mul[x, g.inv[y]]] * mu.weights[y] for y in range(g.order)) for x in range(g.order)]


def test_uniform_measure():
    g = cyclic(6)
    A = g.subset([0, 2, 4])
    mu = uniform_measure(A)
    assert mu.total == pytest.approx(1.0)
    assert mu.of(A) == pytest.approx(1.0)
    with pytest.raises(EmptySet):
        uniform_measure(g.empty())


def test_convolution_with_point_mass_is_translation():
    g = dihedral(4)
    f = FunctionVec(g, np.arange(8.0))
    for t in range(8):
        # f * delta_t (x) = f(x t^-1)
        assert np.allclose(convolve_fn_measure(f, point_mass(g, t)).values, act_right(int(g.inv[t]), f).values)
        # delta_t * f (x) = f(t^-1 x)
        assert np.allclose(convolve_measure_fn(point_mass(g, t), f).values, act_left(t, f).values)


def test_indicator_of_subgroup_convolved_with_its_measure():
    g = quaternion8()
    H = generated_subgroup(g.subset([2]))
    out = convolve_fn_measure(indicator(H), uniform_measure(H)).values
    assert np.allclose(out, H.bits.astype(float))


@given(st.data())
def test_convolution_matches_naive(data):
    G = data.draw(groups(max_order=12))
    f = data.draw(functions(G))
    mu = data.draw(measures(G))
    assert np.allclose(convolve_fn_measure(f, mu).values, naive_conv(f, mu), atol=1e-9)


@given(st.data())
def test_adjoint_identity(data):
    G = data.draw(groups())
    f = data.draw(functions(G))
    mu = data.draw(measures(G))
    nu = data.draw(measures(G))
    lhs = pair(nu, convolve_fn_measure(f, mu))
    rhs = pair(mu, convolve_fn_measure(tilde(f), nu))
    assert math.isclose(lhs, rhs, abs_tol=1e-9)


@given(st.data())
def test_support_of_convolved_measures(data):
    G = data.draw(groups())
    A = data.draw(subsets(G, min_size=1))
    B = data.draw(subsets(G, min_size=1))
    supp = convolve_measures(uniform_measure(A), uniform_measure(B)).support()
    assert supp == product_set(A, B)


@given(st.data())
def test_measure_convolution_is_associative(data):
    G = data.draw(groups(max_order=12))
    a, b, c = (data.draw(measures(G)) for _ in range(3))
    left = convolve_measures(convolve_measures(a, b), c).weights
    right = convolve_measures(a, convolve_measures(b, c)).weights
    assert np.allclose(left, right, atol=1e-9)


@given(st.data())
def test_actions_compose(data):
    G = data.draw(groups())
    f = data.draw(functions(G))
    x, y = data.draw(elements(G)), data.draw(elements(G))
    xy = int(G.mul[x, y])
    # right action: rho_x rho_y = rho_{xy}, left: lambda_x lambda_y = lambda_{xy}
    assert np.allclose(act_right(x, act_right(y, f)).values, act_right(xy, f).values)
    assert np.allclose(act_left(x, act_left(y, f)).values, act_left(xy, f).values)


@given(st.data())
def test_measure_actions_preserve_mass(data):
    G = data.draw(groups())
    mu = data.draw(measures(G))
    x = data.draw(elements(G))
    assert act_right_measure(x, mu).total == pytest.approx(mu.total)
    assert act_left_measure(x, mu).total == pytest.approx(mu.total)
    assert np.allclose(tilde(tilde(mu)).weights, mu.weights)


@given(st.data())
def test_lp_norms_are_monotone(data):
    G = data.draw(groups())
    f = data.draw(functions(G))
    A = data.draw(subsets(G, min_size=1))
    mu = uniform_measure(A)
    n1, n2, n4 = (lp_norm(f, mu, p) for p in (1, 2, 4))
    ninf = lp_norm(f, mu, math.inf)
    assert n1 <= n2 + 1e-9 <= n4 + 2e-9 <= ninf + 3e-9
    assert inner_product(f, f, mu) == pytest.approx(n2 ** 2, abs=1e-9)


def test_norm_errors():
    g = cyclic(3)
    f = constant(g, 1.0)
    with pytest.raises(BadExponent):
        lp_norm(f, uniform_measure(g.full()), 0.5)
    with pytest.raises(NegativeMeasure):
        lp_norm(f, MeasureVec(g, np.array([1.0, -1.0, 0.0])), 2)


def test_haar_defect_vanishes_for_subgroups():
    g = dihedral(6)
    H = generated_subgroup(g.subset([1]))
    sys = subgroup_chain_system([g.full(), H, g.identity_set()])
    for x in H.elements():
        assert tv_haar_defect(sys, 0, x) == 0
        assert tv_haar_defect_left(sys, 0, x) == 0
    assert haar_defect_bound(0.0) == 0
    with pytest.raises(StepOutOfRange):
        tv_haar_defect(sys, 3, 0)
    outside = (g.full() - H).elements()[0]
    with pytest.raises(NotInNextLevel):
        tv_haar_defect(sys, 0, outside)


def test_csv_export():
    g = cyclic(3)
    text = uniform_measure(g.full()).to_csv()
    assert text.splitlines()[0].startswith("element")
    assert len(text.splitlines()) == 4
