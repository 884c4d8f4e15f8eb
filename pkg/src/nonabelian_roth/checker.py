"""Independent recomputation of increment outcomes.

Works from the serialised form (hex subsets, plain dicts) with plain Python
loops over the multiplication table. Nothing here calls the convolution code,
so agreement with the production path is a genuine cross-check.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .groups import GroupTable, Subset


def _ids(G: GroupTable, hexstr: str) -> list[int]:
    return Subset.from_hex(G, hexstr).elements()


def _right_density(G, A: set, B: list, x: int) -> float:
    # (1_A * mu_B)(x) = |{y in B : x y^-1 in A}| / |B|
    return sum(1 for y in B if int(G.mul[x, G.inv[y]]) in A) / len(B)


def _left_density(G, A: set, B: list, x: int) -> float:
    # (mu_B * 1_A)(x) = |{y in B : y^-1 x in A}| / |B|
    return sum(1 for y in B if int(G.mul[G.inv[y], x]) in A) / len(B)


def _products(G, X: list, Y: list) -> set:
    return {int(G.mul[x, y]) for x in X for y in Y}


class _Cmp:
    def __init__(self, measured: dict, tol: float):
        self.measured = measured
        self.tol = tol
        self.failures: list[str] = []

    def __call__(self, key: str, value: float):
        if key not in self.measured:
            self.failures.append(f"missing measured key {key}")
        elif not abs(float(self.measured[key]) - float(value)) <= self.tol:
            self.failures.append(f"{key}: claimed {self.measured[key]!r}, recomputed {value!r}")

    def require(self, cond: bool, msg: str):
        if not cond:
            self.failures.append(msg)


def _check_l2(G, out: dict, chk: _Cmp, side: str, c_slack: float):
    ctx = out["context"]
    A = _ids(G, ctx["A"])
    Z = _ids(G, ctx["Z"])
    T = _ids(G, ctx["T"])
    Aset = set(A)
    chk.require(Aset <= set(Z), "A is not inside Z")
    dens = _right_density if side == "right" else _left_density
    vals = {x: dens(G, Aset, T, x) for x in Z}
    alpha = len(A) / len(Z)
    D = sum((v - alpha) ** 2 for v in vals.values()) / len(Z)
    m = sum(vals.values()) / len(Z)
    norm2 = sum(v * v for v in vals.values()) / len(Z)
    z = out["witness"]["z"]
    chk.require(z in vals, "z is not in Z")
    top = max(vals.values())
    chk.require(z in vals and abs(vals[z] - top) <= chk.tol, "z is not the argmax")
    eta = float(chk.measured.get("eta", 0.0))
    eps = float(chk.measured.get("epsilon", 0.0))
    chk("alpha", alpha)
    chk("D", D)
    chk("m", m)
    chk("norm2", norm2)
    chk("value", top)
    chk("bound_exact", (D + 2 * alpha * m - alpha * alpha) / m)
    chk("bound_slack", alpha * (1 + eta) - c_slack * eps)
    chk.require(top >= (D + 2 * alpha * m - alpha * alpha) / m - chk.tol, "value below the exact bound")
    chk.require(top >= alpha * (1 + eta) - c_slack * eps - chk.tol, "value below the slack bound")
    chk.require(D >= eta * alpha * alpha - chk.tol, "energy hypothesis fails")
    return alpha, D


def _l1(G, A: list, B: list, side: str, alpha: float) -> float:
    dens = _right_density if side == "right" else _left_density
    Aset = set(A)
    return sum(abs(dens(G, Aset, B, a) - alpha) for a in A) / len(A)


def _check_equalise_extra(G, out: dict, chk: _Cmp, side: str, alpha: float, D: float):
    ctx = out["context"]
    A = _ids(G, ctx["A"])
    l1 = _l1(G, A, _ids(G, ctx["B0p"]), side, alpha)
    chk("l1", l1)
    eta_req = float(chk.measured.get("eta_req", 0.0))
    chk.require(l1 > eta_req * alpha, "L1 bound holds, so no increment was due")
    eta_eff = min(1.0, D / (alpha * alpha))
    chk("eta_eff", eta_eff)
    chk("eta_ratio", eta_eff / (eta_req * eta_req))


def _check_l1_holds(G, out: dict, chk: _Cmp):
    ctx = out["context"]
    A = _ids(G, ctx["A"])
    alpha = len(A) / Subset.from_hex(G, ctx["Z"]).card
    eta = float(chk.measured.get("eta", 0.0))
    l1 = _l1(G, A, _ids(G, ctx["B0p"]), out["witness"]["side"], alpha)
    chk("alpha", alpha)
    chk("l1", l1)
    chk("bound", eta * alpha)
    chk.require(l1 <= eta * alpha + 1e-12, "L1 bound fails")


def _check_anchor(G, out: dict, chk: _Cmp):
    ctx = out["context"]
    A = _ids(G, ctx["A"])
    Aset = set(A)
    Z = _ids(G, ctx["Z"])
    X = _ids(G, ctx["X"])
    B0p = _ids(G, ctx["B0p"])
    B1p = _ids(G, ctx["B1p"])
    alpha = len(A) / len(Z)
    eta = float(chk.measured.get("eta", 0.0))
    eps = float(chk.measured.get("epsilon", 0.0))
    R = {a: _right_density(G, Aset, B0p, a) for a in A}
    L = {a: _left_density(G, Aset, B0p, a) for a in A}
    S = [a for a in A if abs(R[a] - alpha) <= eta * alpha + 1e-12 and abs(L[a] - alpha) <= eta * alpha + 1e-12]
    chk.require(S == _ids(G, ctx["S"]), "S differs from its definition")
    X2 = _products(G, X, X)
    hits = {}
    for s1 in S:
        hits[s1] = sum(1 for s in S
                       if int(G.mul[G.inv[s1], s]) in X2 and int(G.mul[s, G.inv[s1]]) in X2)
    a = out["witness"]["a"]
    chk.require(a in hits, "anchor is not in S")
    if a not in hits:
        return
    chk.require(hits[a] == max(hits.values()), "anchor is not the argmax of the hit count")
    required = math.ceil(Fraction(len(X) ** 2 * len(S)) / ((1 + Fraction(eps)) ** 2 * len(Z) ** 2))
    X4 = _products(G, X2, X2)
    window = {G.m(a, x, a) for x in X4}
    sq_S = {int(G.sq[s]) for s in S}
    sq_A = {int(G.sq[s]) for s in A}
    win1 = {G.m(a, y, a) for y in B1p}
    chk("alpha", alpha)
    chk("mu_S", len(S) / len(A))
    chk("hits", hits[a])
    chk("hits_required", required)
    chk("sq_hits", len(sq_S & window))
    chk("right_density", R[a])
    chk("left_density", L[a])
    chk("squares_density", len(sq_A & win1) / len(B1p))
    chk("density_floor", alpha * (1 - eta))
    chk("l1_right", _l1(G, A, B0p, "right", alpha))
    chk("l1_left", _l1(G, A, B0p, "left", alpha))
    chk.require(2 * len(S) >= len(A), "mu_A(S) < 1/2")
    chk.require(hits[a] >= required, "hit count below the averaging bound")
    chk.require(len(sq_S & window) >= hits[a], "fewer squares than hits")


def _check_u2_base(G, out: dict, chk: _Cmp):
    ctx = out["context"]
    U, V, W = (_ids(G, ctx[k]) for k in ("U", "V", "W"))
    B0, B1 = _ids(G, ctx["B0"]), _ids(G, ctx["B1"])
    Wset = set(W)
    count = sum(1 for u in U for v in V if int(G.mul[u, v]) in Wset)
    mu_U, mu_V, mu_W = len(U) / len(B0), len(V) / len(B0), len(W) / len(B1)
    chk("count", count)
    chk("inner", count / (len(V) * len(B1)))
    chk("mu_U", mu_U)
    chk("mu_V", mu_V)
    chk("mu_W", mu_W)
    chk("threshold", 0.5 * mu_U * mu_V * mu_W)
    first_case = 2 * count * len(B0) ** 2 >= len(U) * len(V) ** 2 * len(W)
    return first_case, count


def _check_u2_increment(G, out: dict, chk: _Cmp, c_slack: float):
    ctx = out["context"]
    U, V = _ids(G, ctx["U"]), _ids(G, ctx["V"])
    B0 = _ids(G, ctx["B0"])
    BR0, BL0 = _ids(G, ctx["BR0"]), _ids(G, ctx["BL0"])
    mu_U, mu_V = len(U) / len(B0), len(V) / len(B0)
    Uset, Vset, B0set = set(U), set(V), set(B0)
    f = {x: _right_density(G, Vset, BR0, x) - (mu_V if x in B0set else 0.0) for x in B0}
    g = {x: _left_density(G, Uset, BL0, x) - (mu_U if x in B0set else 0.0) for x in B0}
    nf = sum(v * v for v in f.values()) / len(B0)
    ng = sum(v * v for v in g.values()) / len(B0)
    eps = float(chk.measured.get("epsilon", 0.0))
    bound = 0.5 * mu_U * mu_U - c_slack * eps
    chk("norm_f2", nf)
    chk("norm_g2", ng)
    chk("dichotomy_bound", bound)
    chk("eta_u2", min(1.0, eps * mu_U))
    chk("p", 2 + math.log(1 / float(chk.measured.get("mu_W", 1.0))))
    for key in ("R", "L"):
        if key in ctx:
            chk(f"{key}_density", Subset.from_hex(G, ctx[key]).density())
    if out["kind"] == "LEFT_SYSTEM_INCREMENT":
        chk.require(ng >= bound, "left branch taken without the left norm bound")
        chk.require(_ids(G, ctx["T"]) == BL0, "left increment does not use B^L_0")
        chk.require(_ids(G, ctx["A"]) == U, "left increment is not on U")
    else:
        chk.require(ng < bound <= nf, "right branch taken out of order")
        chk.require(_ids(G, ctx["T"]) == BR0, "right increment does not use B^R_0")
        chk.require(_ids(G, ctx["A"]) == V, "right increment is not on V")
    return ng if out["kind"] == "LEFT_SYSTEM_INCREMENT" else nf


def check_outcome(G: GroupTable, out: dict, c_slack: float = 4.0, tol: float = 1e-9) -> list[str]:
    """Failures found when recomputing one serialised outcome (empty list = all reproduced)."""
    chk = _Cmp(out.get("measured", {}), tol)
    kind = out.get("kind")
    try:
        if kind == "L1_BOUND_HOLDS":
            _check_l1_holds(G, out, chk)
        elif kind in ("RIGHT_INCREMENT", "LEFT_INCREMENT"):
            side = "right" if kind == "RIGHT_INCREMENT" else "left"
            alpha, D = _check_l2(G, out, chk, side, c_slack)
            if "l1" in chk.measured:
                _check_equalise_extra(G, out, chk, side, alpha, D)
        elif kind == "ANCHOR_FOUND":
            _check_anchor(G, out, chk)
        elif kind == "COUNT_LOWER_BOUND":
            first, count = _check_u2_base(G, out, chk)
            chk.require(first, "count case claimed below the threshold")
            chk.require(out["witness"].get("count") == count, "witness count differs")
        elif kind in ("LEFT_SYSTEM_INCREMENT", "RIGHT_SYSTEM_INCREMENT"):
            first, _ = _check_u2_base(G, out, chk)
            chk.require(not first, "increment claimed although the count case holds")
            norm2 = _check_u2_increment(G, out, chk, c_slack)
            side = "left" if kind == "LEFT_SYSTEM_INCREMENT" else "right"
            alpha, _ = _check_l2(G, out, chk, side, c_slack)
            chk.require(abs(float(chk.measured.get("eta", -1)) - min(1.0, norm2 / (alpha * alpha))) <= tol,
                        "eta used for the increment differs from the norm ratio")
        else:
            chk.failures.append(f"unknown outcome kind {kind!r}")
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        chk.failures.append(f"malformed outcome: {exc!r}")
    return chk.failures
