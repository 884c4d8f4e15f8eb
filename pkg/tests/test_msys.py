import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonabelian_roth.errors import (
    BadIndices,
    GlueConditionViolated,
    NotAbelian,
    NotNested,
    NotSubgroup,
    TailNotContained,
    TailNotSymmetric,
)
from nonabelian_roth.groups import (
    catalog,
    catalog_group,
    cyclic,
    direct_product,
    generated_subgroup,
    is_subgroup,
    symmetric,
)
from nonabelian_roth.measures import haar_defect_bound, tv_haar_defect, tv_haar_defect_left
from nonabelian_roth.msys import (
    BohrSpec,
    MultiplicativeSystem,
    abelian_structure,
    bohr_set,
    bohr_system,
    character_values,
    conjugate_system,
    glue,
    group_system,
    subgroup_chain_system,
    trivial_action_system,
    truncate,
    verify_system,
)

from strategies import elements, groups


def subgroup_chains(G):
    """All chains G >= <x> >= <x^k> >= 1 for x ranging over G."""
    out = []
    for x in range(G.order):
        H = generated_subgroup(G.subset([x]))
        for k in (2, 3):
            y = x
            for _ in range(k - 1):
                y = int(G.mul[y, x])
            K = generated_subgroup(G.subset([y]))
            out.append([G.full(), H, K, G.identity_set()])
    return out


def test_group_and_trivial_systems():
    G = symmetric(3)
    assert verify_system(group_system(G, 2)).ok
    A = G.subset([0, 1, 2])
    sys = trivial_action_system(A)
    assert sys.r == 0 and sys.tail.card == 1
    assert verify_system(sys).ok


def test_closure_failure_has_witness():
    G = cyclic(8)
    B = G.subset([0, 1, 7])
    sys = MultiplicativeSystem(G, ((B, B, B),), B, 0.0)
    rep = verify_system(sys)
    assert not rep.ok
    names = [c.name for c in rep.failures()]
    assert "closure" in names
    w = next(c for c in rep.failures() if c.name == "closure").witness
    assert w["element"] not in B.elements()


def test_cardinality_uses_exact_ratio():
    G = cyclic(12)
    H = generated_subgroup(G.subset([2]))
    K = generated_subgroup(G.subset([4]))
    sys = MultiplicativeSystem(G, ((H, K, K),), G.identity_set(), 0.5)
    assert not verify_system(sys).ok
    assert verify_system(sys, epsilon=1.0).ok  # 6 <= 2 * 3 exactly


def test_symmetry_failure():
    G = cyclic(5)
    bad = G.subset([0, 1])
    sys = MultiplicativeSystem(G, ((G.full(), G.full(), G.full()),), bad, 0.0)
    rep = verify_system(sys)
    assert [c.name for c in rep.failures()] == ["symmetric_neighbourhoods"]


@pytest.mark.parametrize("name,G", catalog(max_order=24))
def test_subgroup_chain_systems_verify(name, G):
    for chain in subgroup_chains(G)[:12]:
        sys = subgroup_chain_system(chain, 0.0)
        assert verify_system(sys).ok
        for x in sys.level(1).elements():
            assert tv_haar_defect(sys, 0, x) == 0


def test_subgroup_chain_errors():
    G = cyclic(6)
    with pytest.raises(NotSubgroup):
        subgroup_chain_system([G.full(), G.subset([0, 1])])
    H2 = generated_subgroup(G.subset([3]))
    H3 = generated_subgroup(G.subset([2]))
    with pytest.raises(NotNested):
        subgroup_chain_system([G.full(), H2, H3])


def test_truncate_and_errors():
    G = cyclic(16)
    chain = [generated_subgroup(G.subset([2 ** k % 16])) for k in range(5)]
    sys = subgroup_chain_system(chain)
    t = truncate(sys, 1, 2, chain[3])
    assert t.r == 1 and t.B(0) == chain[1] and t.tail == chain[3]
    assert verify_system(t).ok
    with pytest.raises(BadIndices):
        truncate(sys, 2, 1, chain[3])
    with pytest.raises(TailNotContained):
        truncate(sys, 0, 1, chain[0])
    with pytest.raises(TailNotSymmetric):
        truncate(sys, 0, 1, G.subset([4]))


def test_glue():
    G = cyclic(16)
    chain = [generated_subgroup(G.subset([2 ** k % 16])) for k in range(5)]
    a = subgroup_chain_system(chain[:3], 0.1)
    b = subgroup_chain_system(chain[2:], 0.2)
    g = glue(a, b)
    assert g.r == 3 and g.epsilon == 0.2
    assert verify_system(g).ok
    with pytest.raises(GlueConditionViolated):
        glue(b, a)


@given(st.data())
def test_conjugate_system_verifies(data):
    G = data.draw(groups(abelian=False))
    chains = subgroup_chains(G)
    chain = data.draw(st.sampled_from(chains))
    g = data.draw(elements(G))
    sys = conjugate_system(g, subgroup_chain_system(chain))
    assert verify_system(sys).ok
    assert all(is_subgroup(c) for _, c in sys.components())


def test_round_trip_serialisation():
    G = catalog_group("D6")
    sys = subgroup_chain_system(subgroup_chains(G)[5], 0.125)
    back = MultiplicativeSystem.from_dict(G, sys.to_dict())
    assert back.same_sets(sys) and back.epsilon == sys.epsilon
    assert "MultiplicativeSystem" in repr(sys)


@pytest.mark.parametrize("name,G", catalog(max_order=24, abelian=True))
def test_abelian_structure_is_an_isomorphism(name, G):
    st_ = abelian_structure(G)
    assert int(np.prod(st_.orders)) == G.order
    for x in range(G.order):
        for y in range(G.order):
            lhs = st_.coords[G.mul[x, y]]
            rhs = (st_.coords[x] + st_.coords[y]) % np.array(st_.orders)
            assert np.array_equal(lhs, rhs)


def test_characters_are_homomorphisms():
    G = direct_product(cyclic(2), cyclic(6))
    st_ = abelian_structure(G)
    freq = tuple(1 for _ in st_.orders)
    chi = character_values(G, freq)
    for x in range(G.order):
        for y in range(G.order):
            assert cmath.isclose(chi[G.mul[x, y]], chi[x] * chi[y], abs_tol=1e-12)


def test_bohr_set_matches_definition():
    G = cyclic(20)
    B = bohr_set(BohrSpec(G, (3,), 0.9))
    expect = [x for x in range(20) if abs(cmath.exp(2j * cmath.pi * 3 * x / 20) - 1) <= 0.9 + 1e-12]
    assert B.elements() == expect
    assert bohr_set(BohrSpec(G, (1,), 2.0)).card == 20
    with pytest.raises(NotAbelian):
        BohrSpec(symmetric(3), (1,), 1.0)


@given(n=st.integers(8, 96), width=st.floats(0.2, 2.0), eps=st.sampled_from([0.05, 0.25, 0.5, 1.0]))
def test_bohr_systems_verify(n, width, eps):
    G = cyclic(n)
    sys, l, j = bohr_system(BohrSpec(G, (1,), width), eps)
    assert verify_system(sys).ok
    assert 0 <= j < l
    bound = haar_defect_bound(eps)
    for x in sys.level(1).elements():
        assert tv_haar_defect(sys, 0, x) <= bound + 1e-12
        assert tv_haar_defect_left(sys, 0, x) <= bound + 1e-12


def test_bohr_system_two_frequencies():
    G = direct_product(cyclic(6), cyclic(6))
    spec = BohrSpec(G, [(1, 1), (1, 5)], 1.2)
    sys, l, j = bohr_system(spec, 0.5)
    assert verify_system(sys).ok
