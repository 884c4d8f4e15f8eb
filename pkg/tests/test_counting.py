import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonabelian_roth.counting import (
    CSV_HEADER,
    EquationKind,
    best_coset_translate,
    count_triples,
    density_table,
    is_solution_free,
    largest_abelian_subgroup,
    max_solution_free,
)
from nonabelian_roth.errors import CapExceeded, NotSubgroup
from nonabelian_roth.groups import (
    Subset,
    catalog,
    catalog_group,
    cyclic,
    dihedral,
    has_distinct_squares,
    is_subgroup,
    left_translate,
    quaternion8,
    symmetric,
)

from strategies import elements, groups, subsets

SQ, INV = EquationKind.SQUARE, EquationKind.INVARIANT


def triple_loop(A, eq):
    g = A.group
    els = A.elements()
    total = nontrivial = 0
    for x, y, z in itertools.product(els, repeat=3):
        if eq is SQ:
            ok = g.mul[x, z] == g.sq[y]
        else:
            ok = z == g.m(y, int(g.inv[x]), y)
        if ok:
            total += 1
            nontrivial += x != y
    return total, nontrivial


def brute_max(G, eq):
    best = 0
    for mask in range(1 << G.order):
        A = Subset(G, np.array([(mask >> i) & 1 for i in range(G.order)], dtype=bool))
        if A.card > best and is_solution_free(A, eq):
            best = A.card
    return best


def test_equation_parse():
    assert EquationKind.parse("square") is SQ
    assert EquationKind.parse("INVARIANT") is INV
    with pytest.raises(ValueError):
        EquationKind.parse("cube")


def test_cyclic7_example():
    A = cyclic(7).subset([0, 1, 3])
    assert count_triples(A, SQ) == triple_loop(A, SQ) == (3, 0)


def test_full_group_counts():
    for _, g in catalog(max_order=24):
        assert count_triples(g.full(), SQ)[0] == g.order ** 2
        assert count_triples(g.full(), INV)[0] == g.order ** 2


def test_solution_free_examples():
    assert is_solution_free(cyclic(5).empty())
    assert is_solution_free(cyclic(5).subset([2]))
    assert is_solution_free(cyclic(5).subset([0, 1]))
    for N in (3, 4, 6):
        odd = cyclic(2 * N).subset(range(1, 2 * N, 2))
        assert not is_solution_free(odd)


@given(st.data())
def test_pair_loop_matches_triple_loop(data):
    G = data.draw(groups())
    A = data.draw(subsets(G))
    eq = data.draw(st.sampled_from([SQ, INV]))
    assert count_triples(A, eq) == triple_loop(A, eq)


@given(st.data())
def test_invariant_count_is_translation_invariant(data):
    G = data.draw(groups(abelian=False))
    A = data.draw(subsets(G))
    t = data.draw(elements(G))
    assert count_triples(left_translate(t, A), INV) == count_triples(A, INV)


@given(st.data())
def test_abelian_equations_coincide(data):
    G = data.draw(groups(abelian=True))
    A = data.draw(subsets(G))
    assert count_triples(A, SQ) == count_triples(A, INV)


@pytest.mark.parametrize("G,eq", [(cyclic(4), SQ), (quaternion8(), INV), (cyclic(7), SQ), (dihedral(3), SQ),
                                  (dihedral(4), INV), (quaternion8(), SQ)])
def test_search_matches_full_enumeration(G, eq):
    rep = max_solution_free(G, eq)
    assert rep.exhaustive
    assert rep.best_size == brute_max(G, eq)
    assert is_solution_free(rep.best_set, eq)


def test_search_trivial_and_report():
    rep = max_solution_free(cyclic(1))
    assert rep.best_size == 1 and rep.exhaustive
    d = rep.to_dict()
    assert d["best_size"] == 1 and d["best_set"] == [0]
    assert len(rep.csv_row()) == len(CSV_HEADER)


def test_search_budget_flag():
    rep = max_solution_free(catalog_group("C24"), SQ, budget=5)
    assert not rep.exhaustive
    assert is_solution_free(rep.best_set)


@pytest.mark.parametrize("name,G", catalog(max_order=16))
def test_solution_free_sets_have_only_trivial_triples(name, G):
    rep = max_solution_free(G, SQ)
    A = rep.best_set
    assert has_distinct_squares(A)
    assert count_triples(A, SQ) == (A.card, 0)


@given(st.data())
def test_best_coset_translate(data):
    G = data.draw(groups(abelian=False))
    H = largest_abelian_subgroup(G)
    A = data.draw(subsets(G))
    t, size = best_coset_translate(A, H)
    counts = [len(set(left_translate(s, H).elements()) & set(A.elements())) for s in range(G.order)]
    assert size == max(counts) and counts[t] == size
    assert size * G.order >= A.card * H.card


def test_best_coset_translate_trivial_cases():
    G = dihedral(4)
    H = G.subset([0, 1, 2, 3])
    assert best_coset_translate(H, H)[1] == 4
    assert best_coset_translate(G.full(), H)[1] == 4
    with pytest.raises(NotSubgroup):
        best_coset_translate(H, G.subset([0, 1]))


@pytest.mark.parametrize("G,size", [(symmetric(3), 3), (quaternion8(), 4), (dihedral(4), 4),
                                    (catalog_group("A4"), 4), (symmetric(4), 4), (dihedral(6), 6),
                                    (cyclic(12), 12)])
def test_largest_abelian_subgroup(G, size):
    H = largest_abelian_subgroup(G)
    assert is_subgroup(H) and H.card == size
    assert np.all(G.mul[np.ix_(H.ids, H.ids)] == G.mul[np.ix_(H.ids, H.ids)].T)


def test_largest_abelian_subgroup_cap():
    with pytest.raises(CapExceeded):
        largest_abelian_subgroup(symmetric(5), cap=100)


def test_density_table_rows():
    rows = density_table(catalog(max_order=6), SQ)
    assert all(len(r) == len(CSV_HEADER) for r in rows)
    assert all(0 < r[4] <= 1 for r in rows)

