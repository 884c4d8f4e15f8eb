import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonabelian_roth.croot_sisask import (
    SamplerConfig,
    almost_periods,
    almost_periods_report,
    bogolioubov_neighbourhood,
    build_system,
    conjugate_intersection,
    left_relative_almost_periods,
    left_relative_almost_periods_report,
    period_defects,
    relative_almost_periods,
    relative_almost_periods_report,
)
from nonabelian_roth.errors import (
    EmptySet,
    NotSymmetricNeighbourhood,
    PreconditionViolated,
    ZeroFunction,
)
from nonabelian_roth.groups import (
    catalog_group,
    conjugate_set,
    cyclic,
    dihedral,
    generated_subgroup,
    is_symmetric_neighbourhood,
    power_set_k,
    random_symmetric_neighbourhood,
)
from nonabelian_roth.measures import FunctionVec, indicator
from nonabelian_roth.msys import subgroup_chain_system, verify_system

from strategies import groups, subsets, symmetric_neighbourhoods


def naive_defect(f, X, t, p):
    g = f.group
    F = [sum(f.values[g.mul[x, g.inv[y]]] for y in X.elements()) / X.card for x in range(g.order)]
    return (sum(abs(F[int(g.mul[y, g.inv[t]])] - F[y]) ** p for y in range(g.order)) / g.order) ** (1 / p)


def test_sampler_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(eta=0)
    with pytest.raises(ValueError):
        SamplerConfig(p=1.5)
    with pytest.raises(ValueError):
        SamplerConfig(mode="guess")
    a = SamplerConfig(seed=4).rng(2).integers(0, 10**9, 4)
    b = SamplerConfig(seed=4).rng(2).integers(0, 10**9, 4)
    assert np.array_equal(a, b)


@given(st.data())
def test_period_defects_match_naive(data):
    G = data.draw(groups(max_order=12))
    A = data.draw(subsets(G, min_size=1))
    X = data.draw(subsets(G, min_size=1))
    p = data.draw(st.sampled_from([2.0, 3.0]))
    d = period_defects(indicator(A), X, p)
    for t in range(G.order):
        assert math.isclose(d[t], naive_defect(indicator(A), X, t, p), abs_tol=1e-9)


@given(st.data())
def test_almost_periods_exhaustive(data):
    G = data.draw(groups())
    A = data.draw(subsets(G, min_size=1))
    X = data.draw(subsets(G, min_size=1))
    cfg = SamplerConfig(eta=data.draw(st.sampled_from([0.1, 0.3, 0.6])))
    rep = almost_periods_report(indicator(A), X, cfg)
    T = rep.T
    assert is_symmetric_neighbourhood(T)
    d = period_defects(indicator(A), X, cfg.p)
    for t in range(G.order):
        inside = max(d[t], d[G.inv[t]]) <= rep.threshold + 1e-12
        assert (t in T) == inside


@given(st.data())
def test_montecarlo_periods_are_exact_periods(data):
    G = data.draw(groups())
    A = data.draw(subsets(G, min_size=1))
    X = data.draw(subsets(G, min_size=1))
    seed = data.draw(st.integers(0, 2**32))
    mc = SamplerConfig(eta=0.5, mode="montecarlo", seed=seed, k=8, n_samples=16)
    T_mc = almost_periods(indicator(A), X, mc)
    T_ex = almost_periods(indicator(A), X, SamplerConfig(eta=0.5))
    assert T_mc <= T_ex
    assert is_symmetric_neighbourhood(T_mc)
    assert almost_periods(indicator(A), X, mc) == T_mc


def test_almost_period_errors():
    G = cyclic(5)
    with pytest.raises(EmptySet):
        almost_periods(indicator(G.full()), G.empty(), SamplerConfig())
    with pytest.raises(ZeroFunction):
        almost_periods(FunctionVec(G, np.zeros(5)), G.full(), SamplerConfig())


@given(st.data())
def test_bogolioubov_certifies(data):
    G = data.draw(groups(max_order=24))
    X = data.draw(symmetric_neighbourhoods(G))
    k = data.draw(st.sampled_from([2, 3, 9]))
    res = bogolioubov_neighbourhood(X, k, SamplerConfig(seed=data.draw(st.integers(0, 99))))
    assert res.certified
    assert is_symmetric_neighbourhood(res.S)
    assert power_set_k(res.S, k) <= power_set_k(X, 4)


def test_bogolioubov_requires_neighbourhood():
    G = cyclic(7)
    with pytest.raises(NotSymmetricNeighbourhood):
        bogolioubov_neighbourhood(G.subset([1, 6]), 2)


@given(st.data())
def test_conjugate_intersection(data):
    G = data.draw(groups(max_order=24, abelian=False))
    S = data.draw(symmetric_neighbourhoods(G))
    g = data.draw(st.integers(0, G.order - 1))
    h = data.draw(st.integers(0, G.order - 1))
    X = conjugate_intersection(S, g, h).S
    S4 = power_set_k(S, 4)
    assert is_symmetric_neighbourhood(X)
    assert power_set_k(X, 4) <= (conjugate_set(g, S4) & conjugate_set(h, S4))


@pytest.mark.parametrize("name", ["C24", "D12", "S4", "Q8xC2", "C3xD8"])
@pytest.mark.parametrize("mode", ["exhaustive", "montecarlo"])
def test_build_system(name, mode):
    G = catalog_group(name)
    rng = np.random.default_rng(7)
    X = random_symmetric_neighbourhood(G, 0.4, rng)
    log = []
    sys, S = build_system(X, 1, 0.25, SamplerConfig(seed=3, mode=mode), log=log)
    assert verify_system(sys).ok
    assert sys.r == 1
    assert sys.Bplus(0) <= power_set_k(X, 4)
    assert power_set_k(S, 4) <= sys.tail
    assert len(log) == 2 and all("j" in row for row in log)


def _two_step(G, H, K):
    return subgroup_chain_system([G.full(), H, K], 1 / 64)


@pytest.mark.parametrize("side", ["right", "left"])
def test_relative_periods_certified(side):
    G = dihedral(12)
    H = generated_subgroup(G.subset([2]))   # rotations by even steps
    K = generated_subgroup(G.subset([4]))
    sys = _two_step(G, H, K)
    rng = np.random.default_rng(0)
    A = G.subset(rng.choice(G.order, 9, replace=False).tolist())
    f = FunctionVec(G, rng.random(G.order))
    report = (relative_almost_periods_report if side == "right" else left_relative_almost_periods_report)
    rep = report(sys, K, f, A, 0.5, 2.0)
    T = rep.T
    assert is_symmetric_neighbourhood(T)
    assert T <= power_set_k(K, 2)
    assert rep.sup_defect_T4 <= rep.threshold + 1e-9
    # naive recomputation over T^4 against mu_{B_1}
    B1 = sys.B(1).elements()
    mu = A.elements()
    if side == "right":
        F = [sum(f.values[G.mul[x, G.inv[y]]] for y in mu) / len(mu) for x in range(G.order)]
    else:
        F = [sum(f.values[G.mul[G.inv[y], x]] for y in mu) / len(mu) for x in range(G.order)]
    for t in power_set_k(T, 4).elements():
        if side == "right":
            moved = [F[int(G.mul[y, G.inv[t]])] for y in B1]
        else:
            moved = [F[int(G.mul[G.inv[t], y])] for y in B1]
        norm = (sum((m - F[y]) ** 2 for m, y in zip(moved, B1)) / len(B1)) ** 0.5
        assert norm <= rep.threshold + 1e-9


def test_relative_periods_montecarlo_subset():
    G = cyclic(48)
    H = generated_subgroup(G.subset([2]))
    K = generated_subgroup(G.subset([8]))
    sys = _two_step(G, H, K)
    A = G.subset(range(0, 48, 3))
    f = indicator(G.subset(range(0, 48, 5)))
    ex = relative_almost_periods(sys, K, f, A, 0.5, 2.0)
    mc = relative_almost_periods(sys, K, f, A, 0.5, 2.0, cfg=SamplerConfig(mode="montecarlo", seed=2))
    assert mc <= ex
    left = left_relative_almost_periods(sys, K, f, A, 0.5, 2.0)
    assert left == ex  # abelian: both sides agree


def test_relative_preconditions():
    G = cyclic(16)
    H = generated_subgroup(G.subset([2]))
    K = generated_subgroup(G.subset([4]))
    sys = _two_step(G, H, K)
    with pytest.raises(PreconditionViolated):
        relative_almost_periods(sys, G.full(), indicator(G.full()), G.full(), 0.5, 2.0)
    one_step = subgroup_chain_system([G.full(), H], 0.0)
    with pytest.raises(PreconditionViolated):
        relative_almost_periods(one_step, K, indicator(G.full()), G.full(), 0.5, 2.0)
