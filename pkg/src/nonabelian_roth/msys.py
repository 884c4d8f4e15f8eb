"""Multiplicative systems: the data type, its exact axiom verifier, the
truncation / gluing / conjugation operations, and the example constructions
(subgroup chains, trivial action sets, Bohr sets in abelian groups).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    BadIndices,
    GlueConditionViolated,
    GroupMismatch,
    NotAbelian,
    NotNested,
    NotSubgroup,
    PigeonholeExhausted,
    TailNotContained,
    TailNotSymmetric,
)
from .groups import (
    GroupTable,
    Subset,
    conjugate_set,
    inverse_set,
    is_subgroup,
    is_symmetric_neighbourhood,
    power_set_k,
    product_set,
)

COMPONENTS = ("Bplus", "B", "Bminus")


@dataclass(frozen=True, eq=False)
class MultiplicativeSystem:
    """(B_{0+}, B_0, B_{0-}; ...; B_{r+}, B_r, B_{r-}; B_{r+1}) with closure parameter epsilon."""

    group: GroupTable
    steps: tuple
    tail: Subset
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(tuple(s) for s in self.steps))
        for step in self.steps:
            if len(step) != 3:
                raise ValueError("each step is a (Bplus, B, Bminus) triple")
            for comp in step:
                if comp.group.order != self.group.order:
                    raise GroupMismatch("component from a different group")

    @property
    def r(self) -> int:
        return len(self.steps) - 1

    def level(self, i: int) -> Subset:
        """B_i: the middle component at step i, or the tail when i = r + 1."""
        return self.tail if i == self.r + 1 else self.steps[i][1]

    def Bplus(self, i: int) -> Subset:
        return self.steps[i][0]

    def B(self, i: int) -> Subset:
        return self.steps[i][1]

    def Bminus(self, i: int) -> Subset:
        return self.steps[i][2]

    def components(self) -> list[tuple[str, Subset]]:
        out = []
        for i, (p, b, m) in enumerate(self.steps):
            out += [(f"B{i}+", p), (f"B{i}", b), (f"B{i}-", m)]
        out.append((f"B{self.r + 1}", self.tail))
        return out

    def with_epsilon(self, epsilon: float) -> "MultiplicativeSystem":
        return MultiplicativeSystem(self.group, self.steps, self.tail, epsilon)

    def same_sets(self, other: "MultiplicativeSystem") -> bool:
        return [s for _, s in self.components()] == [s for _, s in other.components()]

    def to_dict(self) -> dict:
        return {
            "group": self.group.name,
            "group_hash": self.group.table_hash,
            "epsilon": self.epsilon,
            "r": self.r,
            "steps": [{k: c.to_hex() for k, c in zip(COMPONENTS, step)} for step in self.steps],
            "tail": self.tail.to_hex(),
        }

    @classmethod
    def from_dict(cls, group: GroupTable, data: dict) -> "MultiplicativeSystem":
        steps = [tuple(Subset.from_hex(group, s[k]) for k in COMPONENTS) for s in data["steps"]]
        return cls(group, tuple(steps), Subset.from_hex(group, data["tail"]), float(data["epsilon"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __repr__(self):
        sizes = "; ".join(f"{p.card},{b.card},{m.card}" for p, b, m in self.steps)
        return f"MultiplicativeSystem({self.group.name}, eps={self.epsilon:g}, [{sizes}; {self.tail.card}])"


@dataclass
class AxiomCheck:
    name: str
    passed: bool
    witness: dict | None = None

    def to_dict(self):
        return {"axiom": self.name, "passed": self.passed, "witness": self.witness}


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    epsilon: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[AxiomCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {"ok": self.ok, "epsilon": self.epsilon, "checks": [c.to_dict() for c in self.checks]}

    def __bool__(self):
        return self.ok


def _leq_ratio(big: int, small: int, epsilon: float) -> bool:
    # big <= (1 + eps) * small, exactly
    return Fraction(big) <= (1 + Fraction(epsilon)) * small


def verify_system(sys: MultiplicativeSystem, epsilon: float | None = None) -> VerificationReport:
    """Check the three axioms exactly; failures carry a witness."""
    eps = sys.epsilon if epsilon is None else epsilon
    g = sys.group
    rep = VerificationReport(epsilon=eps)
    comps = sys.components()

    # 1. symmetric neighbourhoods of the identity
    bad = None
    for name, c in comps:
        if g.id_elem not in c:
            bad = {"component": name, "element": g.id_elem, "reason": "identity missing"}
            break
        inv = inverse_set(c)
        if inv != c:
            x = int((c - inv).ids[0]) if (c - inv).card else int((inv - c).ids[0])
            bad = {"component": name, "element": x, "reason": "not closed under inverses"}
            break
    rep.checks.append(AxiomCheck("symmetric_neighbourhoods", bad is None, bad))

    # 2. nesting
    bad = None
    for (n1, c1), (n2, c2) in zip(comps, comps[1:]):
        if not c2 <= c1:
            bad = {"outer": n1, "inner": n2, "element": int((c2 - c1).ids[0])}
            break
    rep.checks.append(AxiomCheck("nesting", bad is None, bad))

    # 3. closure: B_{i-} <= y B_i x <= B_{i+} for x, y in B_{i+1}; cardinality ratios
    bad = None
    for i, (bp, b, bm) in enumerate(sys.steps):
        nxt = sys.level(i + 1).ids
        b_ids, bm_ids = b.ids, bm.ids
        for y in nxt:
            # products y b x, shape (|B|, |nxt|)
            yb = g.mul[y, b_ids]
            prod = g.mul[yb[:, None], nxt[None, :]]
            ok_plus = bp.bits[prod].all(axis=0)
            if not ok_plus.all():
                j = int(np.argmin(ok_plus))
                col = prod[:, j]
                off = int(col[~bp.bits[col]][0])
                bad = {"step": i, "x": int(nxt[j]), "y": int(y), "element": off,
                       "reason": "y B_i x not inside B_i+"}
                break
            # c in y B_i x  iff  y^-1 c x^-1 in B_i
            pre = g.mul[g.mul[g.inv[y], bm_ids][:, None], g.inv[nxt][None, :]]
            ok_minus = b.bits[pre].all(axis=0)
            if not ok_minus.all():
                j = int(np.argmin(ok_minus))
                miss = bm_ids[~b.bits[pre[:, j]]]
                bad = {"step": i, "x": int(nxt[j]), "y": int(y), "element": int(miss[0]),
                       "reason": "B_i- not inside y B_i x"}
                break
        if bad:
            break
    rep.checks.append(AxiomCheck("closure", bad is None, bad))

    bad = None
    for i, (bp, b, bm) in enumerate(sys.steps):
        if not _leq_ratio(bp.card, b.card, eps) or not _leq_ratio(b.card, bm.card, eps):
            bad = {"step": i, "sizes": [bp.card, b.card, bm.card], "epsilon": eps}
            break
    rep.checks.append(AxiomCheck("cardinality", bad is None, bad))
    return rep


# ---------------------------------------------------------------------------
# basic operations
# ---------------------------------------------------------------------------

def truncate(sys: MultiplicativeSystem, l: int, m: int, Bstar: Subset) -> MultiplicativeSystem:
    if not 0 <= l <= m <= sys.r:
        raise BadIndices(f"need 0 <= l <= m <= r, got l={l}, m={m}, r={sys.r}")
    if not Bstar <= sys.level(m + 1):
        raise TailNotContained(f"new tail is not inside B_{m + 1}")
    if not is_symmetric_neighbourhood(Bstar):
        raise TailNotSymmetric("new tail is not a symmetric neighbourhood of the identity")
    return MultiplicativeSystem(sys.group, sys.steps[l:m + 1], Bstar, sys.epsilon)


def glue(sys: MultiplicativeSystem, sys2: MultiplicativeSystem) -> MultiplicativeSystem:
    if sys.group.table_hash != sys2.group.table_hash:
        raise GroupMismatch("cannot glue systems from different groups")
    if not sys2.steps[0][0] <= sys.tail:
        raise GlueConditionViolated("B'_{0+} is not inside B_{r+1}")
    return MultiplicativeSystem(sys.group, sys.steps + sys2.steps, sys2.tail,
                                max(sys.epsilon, sys2.epsilon))


def conjugate_system(g_elem: int, sys: MultiplicativeSystem) -> MultiplicativeSystem:
    steps = tuple(tuple(conjugate_set(g_elem, c) for c in step) for step in sys.steps)
    return MultiplicativeSystem(sys.group, steps, conjugate_set(g_elem, sys.tail), sys.epsilon)


def subgroup_chain_system(chain: Sequence[Subset], epsilon: float = 0.0) -> MultiplicativeSystem:
    """(H_0,H_0,H_0; ...; H_r,H_r,H_r; H_{r+1}) for H_0 >= ... >= H_{r+1}."""
    if len(chain) < 2:
        raise BadIndices("a chain needs at least two subgroups")
    for k, H in enumerate(chain):
        if not is_subgroup(H):
            raise NotSubgroup(f"chain entry {k} is not a subgroup", index=k)
    for k in range(len(chain) - 1):
        if not chain[k + 1] <= chain[k]:
            raise NotNested(f"chain entry {k + 1} is not inside entry {k}", index=k + 1)
    steps = tuple((H, H, H) for H in chain[:-1])
    return MultiplicativeSystem(chain[0].group, steps, chain[-1], epsilon)


def trivial_action_system(A: Subset, epsilon: float = 0.0) -> MultiplicativeSystem:
    return MultiplicativeSystem(A.group, ((A, A, A),), A.group.identity_set(), epsilon)


def group_system(group: GroupTable, r: int = 0, epsilon: float = 0.0) -> MultiplicativeSystem:
    G = group.full()
    return MultiplicativeSystem(group, tuple((G, G, G) for _ in range(r + 1)), G, epsilon)


# ---------------------------------------------------------------------------
# abelian groups: cyclic decomposition, characters, Bohr sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AbelianStructure:
    """An explicit isomorphism G = Z/n_1 x ... x Z/n_k (x = prod g_j^{c_j})."""

    generators: tuple
    orders: tuple
    coords: np.ndarray  # (|G|, k)


def _quotient(group: GroupTable, K: Subset):
    """Quotient of an abelian group by a subgroup: (table, coset label per element, reps)."""
    label = -np.ones(group.order, dtype=np.int64)
    reps = []
    for x in range(group.order):
        if label[x] < 0:
            coset = group.mul[x, K.ids]
            label[coset] = len(reps)
            reps.append(x)
    q = len(reps)
    table = np.empty((q, q), dtype=np.int64)
    for a in range(q):
        table[a] = label[group.mul[reps[a], reps]]
    return table, label, reps


def _basis(group: GroupTable) -> list[tuple[int, int]]:
    """Independent generators (element, order) of an abelian group, largest order first."""
    if group.order == 1:
        return []
    orders = [group.element_order(x) for x in range(group.order)]
    n = max(orders)
    a = orders.index(n)
    cyc = [group.id_elem]
    for _ in range(n - 1):
        cyc.append(int(group.mul[cyc[-1], a]))
    K = group.subset(cyc)
    if K.card == group.order:
        return [(a, n)]
    from .groups import from_table
    table, label, reps = _quotient(group, K)
    Q = from_table(table, name="quotient")
    out = [(a, n)]
    pos = {x: k for k, x in enumerate(cyc)}
    for qb, m in _basis(Q):
        b = reps[qb]
        bm = group.id_elem
        for _ in range(m):
            bm = int(group.mul[bm, b])
        t = pos[bm]  # b^m = a^t, and m divides t since a has maximal order
        assert t % m == 0
        fix = cyc[(-(t // m)) % n]
        out.append((int(group.mul[b, fix]), m))
    return out


def abelian_structure(group: GroupTable) -> AbelianStructure:
    if not group.abelian:
        raise NotAbelian(f"{group.name} is not abelian")
    cached = getattr(group, "_abelian_structure", None)
    if cached is not None:
        return cached
    basis = _basis(group)
    gens = tuple(b for b, _ in basis)
    orders = tuple(m for _, m in basis)
    coords = np.zeros((group.order, len(gens)), dtype=np.int64)
    # enumerate prod g_j^{c_j}
    elems = np.array([group.id_elem])
    combos = np.zeros((1, 0), dtype=np.int64)
    for j, (gj, nj) in enumerate(zip(gens, orders)):
        powers = [group.id_elem]
        for _ in range(nj - 1):
            powers.append(int(group.mul[powers[-1], gj]))
        powers = np.array(powers)
        elems = group.mul[elems[:, None], powers[None, :]].ravel()
        combos = np.concatenate([np.repeat(combos, nj, axis=0),
                                 np.tile(np.arange(nj), len(combos))[:, None]], axis=1)
    if len(np.unique(elems)) != group.order:
        raise AssertionError("abelian basis is not independent")
    coords[elems] = combos
    st = AbelianStructure(gens, orders, coords)
    object.__setattr__(group, "_abelian_structure", st)
    return st


def character_values(group: GroupTable, freq) -> np.ndarray:
    """gamma(x) for every x, with freq a tuple of residues (or an int for a cyclic group)."""
    st = abelian_structure(group)
    if isinstance(freq, (int, np.integer)):
        freq = (int(freq),)
    freq = tuple(int(f) for f in freq)
    if len(freq) != len(st.orders):
        if group.order == 1 and all(f == 0 for f in freq):
            return np.ones(1, dtype=complex)
        raise ValueError(f"frequency {freq} does not match factor orders {st.orders}")
    phase = np.zeros(group.order)
    for j, (f, n) in enumerate(zip(freq, st.orders)):
        phase += (f % n) * st.coords[:, j] / n
    return np.exp(2j * np.pi * phase)


@dataclass(frozen=True)
class BohrSpec:
    group: GroupTable
    frequencies: tuple
    width: float

    def __post_init__(self):
        if not self.group.abelian:
            raise NotAbelian(f"Bohr sets need an abelian group, got {self.group.name}")
        if not 0 < self.width <= 2:
            raise ValueError("Bohr width must lie in (0, 2]")
        object.__setattr__(self, "frequencies", tuple(self.frequencies))


# |gamma(x) - 1| <= delta is decided with this absolute slack so that widths
# given as exact chord lengths include their endpoint.
_BOHR_TOL = 1e-12


def bohr_set(spec: BohrSpec, width: float | None = None) -> Subset:
    g = spec.group
    if not g.abelian:
        raise NotAbelian(f"{g.name} is not abelian")
    delta = spec.width if width is None else width
    keep = np.ones(g.order, dtype=bool)
    for freq in spec.frequencies:
        keep &= np.abs(character_values(g, freq) - 1) <= delta + _BOHR_TOL
    return Subset(g, keep)


def _sumset_power(B: Subset, j: int) -> Subset:
    return B.group.identity_set() if j == 0 else power_set_k(B, j)


def bohr_system(spec: BohrSpec, epsilon: float, max_l: int | None = None):
    """Scan l = 1, 2, ... and j = 0..l-1 for a verified 1-step system built from
    B_1 = Bohr(G, delta/l) and B_0 = j B_1 + Bohr(G, delta).

    Returns (system, l, j).
    """
    g = spec.group
    if not g.abelian:
        raise NotAbelian(f"{g.name} is not abelian")
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    base = bohr_set(spec)
    cap = max_l if max_l is not None else 4 * g.order + 4
    for l in range(1, cap + 1):
        B1 = bohr_set(spec, spec.width / l)
        for j in range(l):
            B0 = product_set(_sumset_power(B1, j), base)
            B0p = product_set(B1, B0)
            if not _leq_ratio(B0p.card, B0.card, epsilon):
                continue
            if not product_set(product_set(B0, B1), B1) <= B0p:
                continue
            Bm = _bohr_inner(B0, B1, base, j, epsilon)
            if Bm is None:
                continue
            sys = MultiplicativeSystem(g, ((B0p, B0, Bm),), B1, epsilon)
            if verify_system(sys).ok:
                return sys, l, j
    raise PigeonholeExhausted(f"no Bohr system found with l <= {cap}")


def _bohr_inner(B0: Subset, B1: Subset, base: Subset, j: int, epsilon: float) -> Subset | None:
    twoB1 = product_set(B1, B1)
    # dilate candidates (j-1) B_1 + Bohr(delta), ..., Bohr(delta)
    for jj in range(j - 1, -1, -1):
        cand = product_set(_sumset_power(B1, jj), base)
        if product_set(cand, twoB1) <= B0 and _leq_ratio(B0.card, cand.card, epsilon):
            return cand
    # fallback: every z with z + B_1 + B_1 inside B_0
    g = B0.group
    ok = np.array([bool(B0.bits[g.mul[z, twoB1.ids]].all()) for z in range(g.order)])
    cand = Subset(g, ok)
    if g.id_elem in cand and _leq_ratio(B0.card, cand.card, epsilon):
        return cand
    return None
