"""The density-increment machinery: energy increments, equalisation, the
squares anchor, the two dichotomy propositions and the iteration that ends in
a certificate.

Every outcome carries the subsets it was computed from (``context``) and the
numbers backing its claim (``measured``) so that ``checker`` can recompute
them by a different route.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .checker import check_outcome
from .config import RunConfig
from .counting import count_triples
from .croot_sisask import (
    SamplerConfig,
    bogolioubov_neighbourhood,
    build_system,
    conjugate_intersection,
    left_relative_almost_periods_report,
    relative_almost_periods_report,
)
from .errors import (
    BoundViolated,
    CertificationFailed,
    DegenerateInput,
    DichotomyFailed,
    DistinctSquaresViolated,
    HypothesisNotMet,
    InclusionViolated,
    InvalidSystem,
    SBelowHalf,
    SlackViolated,
)
from .groups import (
    GroupTable,
    Subset,
    conjugate_set,
    has_distinct_squares,
    is_symmetric_neighbourhood,
    left_translate,
    power_set_k,
    right_translate,
    square_image,
    two_sided,
)
from .measures import (
    FunctionVec,
    convolve_fn_measure,
    convolve_measure_fn,
    indicator,
    uniform_measure,
)
from .msys import MultiplicativeSystem, truncate, verify_system

L1_BOUND_HOLDS = "L1_BOUND_HOLDS"
RIGHT_INCREMENT = "RIGHT_INCREMENT"
LEFT_INCREMENT = "LEFT_INCREMENT"
ANCHOR_FOUND = "ANCHOR_FOUND"
COUNT_LOWER_BOUND = "COUNT_LOWER_BOUND"
LEFT_SYSTEM_INCREMENT = "LEFT_SYSTEM_INCREMENT"
RIGHT_SYSTEM_INCREMENT = "RIGHT_SYSTEM_INCREMENT"

TRIPLE_COUNT = "TRIPLE_COUNT"
INCREMENT_CHAIN_EXHAUSTED = "INCREMENT_CHAIN_EXHAUSTED"

_EPS_CMP = 1e-12


@dataclass
class IncrementOutcome:
    kind: str
    witness: dict
    measured: dict
    context: dict = field(default_factory=dict)
    system: MultiplicativeSystem | None = None
    S: Subset | None = None

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "witness": {k: _plain(v) for k, v in self.witness.items()},
            "measured": {k: float(v) for k, v in self.measured.items()},
            "context": {k: v.to_hex() for k, v in self.context.items()},
        }
        if self.system is not None:
            d["system"] = self.system.to_dict()
        if self.S is not None:
            d["S"] = self.S.to_hex()
        return d


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def _require(cond: bool, exc, msg: str, **details):
    if not cond:
        raise exc(msg, **details)


# ---------------------------------------------------------------------------
# energy increments
# ---------------------------------------------------------------------------

def _l2(side: str, sys: MultiplicativeSystem, A: Subset, t: int, eta: float,
        c_slack: float, tol: float) -> IncrementOutcome:
    g = sys.group
    B0, T = sys.B(0), sys.level(1)
    if side == "right":
        Z = left_translate(t, B0)
        F = convolve_fn_measure(indicator(A), uniform_measure(T)).values
    else:
        Z = right_translate(B0, int(g.inv[t]))
        F = convolve_measure_fn(uniform_measure(T), indicator(A)).values
    _require(A <= Z, InclusionViolated, "A is not inside Z")
    _require(A.card > 0, DegenerateInput, "A is empty")
    alpha = A.card / Z.card
    vals = F[Z.ids]
    D = float(np.mean((vals - alpha) ** 2))
    m = float(np.mean(vals))
    norm2 = float(np.mean(vals ** 2))
    if D < eta * alpha * alpha - _EPS_CMP:
        raise HypothesisNotMet("L2 energy below eta * alpha^2", D=D, required=eta * alpha * alpha)
    if abs(norm2 - (D + 2 * alpha * m - alpha * alpha)) > tol:
        raise CertificationFailed("energy identity fails", norm2=norm2, D=D, m=m)
    j = int(np.argmax(vals))
    z = int(Z.ids[j])
    value = float(vals[j])
    bound_exact = (D + 2 * alpha * m - alpha * alpha) / m
    bound_slack = alpha * (1 + eta) - c_slack * sys.epsilon
    measured = {"alpha": alpha, "eta": eta, "D": D, "m": m, "norm2": norm2, "value": value,
                "bound_exact": bound_exact, "bound_slack": bound_slack, "epsilon": sys.epsilon}
    if value < bound_exact - tol:
        raise BoundViolated("maximum below the exact energy bound", **measured)
    if value < bound_slack - tol:
        raise SlackViolated("maximum below alpha(1+eta) - c_slack*eps", **measured)
    kind = RIGHT_INCREMENT if side == "right" else LEFT_INCREMENT
    return IncrementOutcome(kind, {"z": z, "side": side}, measured, {"A": A, "Z": Z, "T": T})


def l2_increment_right(sys: MultiplicativeSystem, A: Subset, g_elem: int, eta: float,
                       c_slack: float = 4.0, tol: float = 1e-9) -> IncrementOutcome:
    """z maximising 1_A * mu_{B_1} over Z = g B_0; its value is at least alpha(1+eta) - c_slack*eps."""
    return _l2("right", sys, A, g_elem, eta, c_slack, tol)


def l2_increment_left(sys: MultiplicativeSystem, A: Subset, h_elem: int, eta: float,
                      c_slack: float = 4.0, tol: float = 1e-9) -> IncrementOutcome:
    """z maximising mu_{B_1} * 1_A over Z = B_0 h^-1."""
    return _l2("left", sys, A, h_elem, eta, c_slack, tol)


# ---------------------------------------------------------------------------
# equalisation
# ---------------------------------------------------------------------------

def _side_conv(side: str, A: Subset, B: Subset) -> np.ndarray:
    if side == "right":
        return convolve_fn_measure(indicator(A), uniform_measure(B)).values
    return convolve_measure_fn(uniform_measure(B), indicator(A)).values


def _equalise(side, sysB, sysBp, A, g_elem, h_elem, eta, c_slack, tol) -> IncrementOutcome:
    G = sysB.group
    Z = two_sided(g_elem, sysB.B(0), int(G.inv[h_elem]))
    _require(A <= Z, InclusionViolated, "A is not inside g B_0 h^-1")
    _require(A.card > 0, DegenerateInput, "A is empty")
    pivot = h_elem if side == "right" else g_elem
    _require(sysBp.B(0) <= conjugate_set(pivot, sysB.level(1)), InclusionViolated,
             "B'_0 is not inside the conjugated B_1", side=side)
    alpha = A.card / Z.card
    B0p = sysBp.B(0)
    F0 = _side_conv(side, A, B0p)
    l1 = float(np.mean(np.abs(F0[A.ids] - alpha)))
    if l1 <= eta * alpha + _EPS_CMP:
        return IncrementOutcome(L1_BOUND_HOLDS, {"side": side},
                                {"alpha": alpha, "eta": eta, "l1": l1, "bound": eta * alpha},
                                {"A": A, "Z": Z, "B0p": B0p})
    # conjugate B so that Z is a one-sided translate of its B_0
    conj = MultiplicativeSystem(G, (tuple(conjugate_set(pivot, c) for c in sysB.steps[0]),),
                                sysBp.level(1), sysB.epsilon)
    rep = verify_system(conj)
    _require(rep.ok, InvalidSystem, "conjugated system fails an axiom", report=rep.to_dict())
    F1 = _side_conv(side, A, sysBp.level(1))
    D1 = float(np.mean((F1[Z.ids] - alpha) ** 2))
    eta_eff = min(1.0, D1 / (alpha * alpha))
    if eta_eff <= 0:
        raise SlackViolated("no L2 energy although the L1 bound fails", l1=l1, alpha=alpha)
    if side == "right":
        out = l2_increment_right(conj, A, G.m(g_elem, int(G.inv[h_elem])), eta_eff, c_slack, tol)
    else:
        out = l2_increment_left(conj, A, G.m(h_elem, int(G.inv[g_elem])), eta_eff, c_slack, tol)
    out.measured.update({"l1": l1, "eta_req": eta, "eta_eff": eta_eff, "eta_ratio": eta_eff / (eta * eta)})
    out.context["B0p"] = B0p
    return out


def equalise_right(sysB, sysBp, A, g_elem, h_elem, eta, c_slack=4.0, tol=1e-9) -> IncrementOutcome:
    """Either ||1_A * mu_{B'_0} - alpha 1_Z||_{L_1(mu_A)} <= eta alpha, or a right increment."""
    return _equalise("right", sysB, sysBp, A, g_elem, h_elem, eta, c_slack, tol)


def equalise_left(sysB, sysBp, A, g_elem, h_elem, eta, c_slack=4.0, tol=1e-9) -> IncrementOutcome:
    """Either ||mu_{B'_0} * 1_A - alpha 1_Z||_{L_1(mu_A)} <= eta alpha, or a left increment."""
    return _equalise("left", sysB, sysBp, A, g_elem, h_elem, eta, c_slack, tol)


# ---------------------------------------------------------------------------
# squares anchor and the first proposition
# ---------------------------------------------------------------------------

def square_hits(S: Subset, X: Subset) -> np.ndarray:
    """hits[s'] = #{s in S : sX meets s'X and Xs meets Xs'} (zero off S)."""
    g = S.group
    X2 = power_set_k(X, 2)
    ids = S.ids
    both = X2.bits[g.ldiv[np.ix_(ids, ids)]] & X2.bits[g.div[np.ix_(ids, ids)]]
    out = np.zeros(g.order, dtype=np.int64)
    out[ids] = both.sum(axis=0)
    return out


def select_square_anchor(sysB: MultiplicativeSystem, S: Subset, X: Subset, g_elem: int, h_elem: int):
    """Returns (anchor, hit_count, required, squares_in_anchor_window)."""
    G = sysB.group
    Z = two_sided(g_elem, sysB.B(0), int(G.inv[h_elem]))
    _require(S <= Z, InclusionViolated, "S is not inside g B_0 h^-1")
    _require(has_distinct_squares(S), DistinctSquaresViolated, "S does not have distinct squares")
    _require(is_symmetric_neighbourhood(X), InclusionViolated, "X is not a symmetric neighbourhood")
    _require(X <= (conjugate_set(g_elem, sysB.level(1)) & conjugate_set(h_elem, sysB.level(1))),
             InclusionViolated, "X is not inside gB_1g^-1 cap hB_1h^-1")
    _require(S.card > 0, DegenerateInput, "S is empty")
    hits = square_hits(S, X)
    a = int(S.ids[np.argmax(hits[S.ids])])
    h = int(hits[a])
    eps = Fraction(sysB.epsilon)
    req_frac = Fraction(X.card ** 2 * S.card) / ((1 + eps) ** 2 * sysB.B(0).card ** 2)
    required = math.ceil(req_frac)
    if h < required:
        raise BoundViolated("square anchor hit count below the averaging bound", hits=h, required=required)
    window = two_sided(a, power_set_k(X, 4), a)
    sq_count = (square_image(S) & window).card
    if sq_count < h:
        raise BoundViolated("fewer squares in a X^4 a than hits", squares=sq_count, hits=h)
    return a, h, required, sq_count


def u1_step(sysB: MultiplicativeSystem, sysBp: MultiplicativeSystem, A: Subset, X: Subset,
            g_elem: int, h_elem: int, eta: float, c_slack: float = 4.0, tol: float = 1e-9) -> IncrementOutcome:
    G = sysB.group
    _require(has_distinct_squares(A), DistinctSquaresViolated, "A does not have distinct squares")
    Z = two_sided(g_elem, sysB.B(0), int(G.inv[h_elem]))
    _require(A <= Z, InclusionViolated, "A is not inside g B_0 h^-1")
    B1 = sysB.level(1)
    _require(sysBp.B(0) <= (conjugate_set(g_elem, B1) & conjugate_set(h_elem, B1)), InclusionViolated,
             "B'_0 is not inside gB_1g^-1 cap hB_1h^-1")
    _require(is_symmetric_neighbourhood(X), InclusionViolated, "X is not a symmetric neighbourhood")
    _require(power_set_k(X, 4) <= sysBp.level(1), InclusionViolated, "X^4 is not inside B'_1")
    right = equalise_right(sysB, sysBp, A, g_elem, h_elem, eta / 4, c_slack, tol)
    if right.kind != L1_BOUND_HOLDS:
        return right
    left = equalise_left(sysB, sysBp, A, g_elem, h_elem, eta / 4, c_slack, tol)
    if left.kind != L1_BOUND_HOLDS:
        return left
    alpha = A.card / Z.card
    B0p, B1p = sysBp.B(0), sysBp.level(1)
    FR = _side_conv("right", A, B0p)
    FL = _side_conv("left", A, B0p)
    good = (np.abs(FR - alpha) <= eta * alpha + _EPS_CMP) & (np.abs(FL - alpha) <= eta * alpha + _EPS_CMP)
    S = Subset(G, A.bits & good)
    mu_S = S.card / A.card
    if 2 * S.card < A.card:
        raise SBelowHalf("mu_A(S) < 1/2", mu_S=mu_S)
    a, hits, required, sq_count = select_square_anchor(sysB, S, X, g_elem, h_elem)
    window = two_sided(a, B1p, a)
    squares_density = (square_image(A) & window).card / B1p.card
    measured = {"alpha": alpha, "eta": eta, "l1_right": right.measured["l1"], "l1_left": left.measured["l1"],
                "mu_S": mu_S, "hits": hits, "hits_required": required, "sq_hits": sq_count,
                "right_density": float(FR[a]), "left_density": float(FL[a]),
                "squares_density": squares_density, "density_floor": alpha * (1 - eta),
                "epsilon": sysB.epsilon}
    for key in ("right_density", "left_density"):
        if measured[key] < measured["density_floor"] - tol:
            raise BoundViolated(f"{key} below alpha(1-eta)", **measured)
    ctx = {"A": A, "Z": Z, "S": S, "X": X, "B0p": B0p, "B1p": B1p}
    return IncrementOutcome(ANCHOR_FOUND, {"a": a}, measured, ctx)


# ---------------------------------------------------------------------------
# second proposition
# ---------------------------------------------------------------------------

def pair_count(U: Subset, V: Subset, W: Subset) -> int:
    """#{(u, v) in U x V : uv in W}."""
    g = U.group
    if not U.card or not V.card:
        return 0
    return int(W.bits[g.mul[np.ix_(U.ids, V.ids)]].sum())


def u2_step(sys2: MultiplicativeSystem, X: Subset, U: Subset, V: Subset, W: Subset,
            c_slack: float = 4.0, tol: float = 1e-9, sampler: SamplerConfig | None = None,
            task: int = 0) -> IncrementOutcome:
    G = sys2.group
    _require(sys2.r == 1, InvalidSystem, "a 2-step system is required")
    _require(is_symmetric_neighbourhood(X), InclusionViolated, "X is not a symmetric neighbourhood")
    _require(power_set_k(X, 4) <= sys2.level(2), InclusionViolated, "X^4 is not inside B_2")
    _require(U <= sys2.Bminus(0) and V <= sys2.Bminus(0), InclusionViolated, "U, V must lie in B_{0-}")
    _require(W <= sys2.Bminus(1), InclusionViolated, "W must lie in B_{1-}")
    _require(U.card == V.card and U.card > 0, DegenerateInput, "U and V need equal positive size")
    _require(W.card > 0, DegenerateInput, "W is empty")
    B0, B1 = sys2.B(0), sys2.B(1)
    pairs = pair_count(U, V, W)
    inner = pairs / (V.card * B1.card)
    conv = convolve_fn_measure(indicator(U), uniform_measure(V)).values
    if abs(float(conv[W.ids].sum()) / B1.card - inner) > tol:
        raise CertificationFailed("inner product and pair count disagree")
    mu_U, mu_V, mu_W = U.card / B0.card, V.card / B0.card, W.card / B1.card
    threshold = 0.5 * mu_U * mu_V * mu_W
    base = {"inner": inner, "threshold": threshold, "mu_U": mu_U, "mu_V": mu_V, "mu_W": mu_W,
            "count": pairs}
    ctx = {"U": U, "V": V, "W": W, "B0": B0, "B1": B1}
    # exact comparison: pairs/(|V||B1|) >= |U||V||W| / (2 |B0|^2 |B1|)
    if 2 * pairs * B0.card ** 2 >= U.card * V.card ** 2 * W.card:
        return IncrementOutcome(COUNT_LOWER_BOUND, {"count": pairs}, base, ctx)

    sampler = sampler or SamplerConfig()
    eps = sys2.epsilon
    alpha = mu_U
    eta = min(1.0, eps * alpha)
    p = 2 + math.log(1 / mu_W)
    T = bogolioubov_neighbourhood(X, 8, sampler, task).S
    rep_R = relative_almost_periods_report(sys2, T, indicator(U), V, eta, p, sampler.rel_slack, sampler, task)
    sysR, S_R = build_system(rep_R.T, 0, eps, sampler, task=task + 1)
    f = FunctionVec(G, convolve_fn_measure(indicator(V), uniform_measure(sysR.B(0))).values
                    - mu_V * B0.bits)
    # the left pass reuses eta and p
    rep_L = left_relative_almost_periods_report(sys2, T, f, U, eta, p, sampler.rel_slack, sampler, task + 2)
    sysL, S_L = build_system(rep_L.T, 0, eps, sampler, task=task + 3)
    gfun = convolve_measure_fn(uniform_measure(sysL.B(0)), indicator(U)).values - mu_U * B0.bits
    norm_f2 = float(np.mean(f.values[B0.ids] ** 2))
    norm_g2 = float(np.mean(gfun[B0.ids] ** 2))
    bound = 0.5 * alpha * alpha - c_slack * eps
    base.update({"norm_f2": norm_f2, "norm_g2": norm_g2, "dichotomy_bound": bound, "eta_u2": eta, "p": p,
                 "R_density": rep_R.density, "L_density": rep_L.density})
    ctx.update({"BR0": sysR.B(0), "BL0": sysL.B(0), "R": rep_R.T, "L": rep_L.T})
    step0 = sys2.steps[0]
    if norm_g2 >= bound:
        inner_sys = MultiplicativeSystem(G, (step0,), sysL.B(0), eps)
        kind, new_sys, S_new, A_set = LEFT_SYSTEM_INCREMENT, sysL, S_L, U
        norm2 = norm_g2
    elif norm_f2 >= bound:
        inner_sys = MultiplicativeSystem(G, (step0,), sysR.B(0), eps)
        kind, new_sys, S_new, A_set = RIGHT_SYSTEM_INCREMENT, sysR, S_R, V
        norm2 = norm_f2
    else:
        raise DichotomyFailed("neither ||f||^2 nor ||g||^2 reaches 1/2 alpha^2 - c_slack*eps", **base)
    rep = verify_system(inner_sys)
    _require(rep.ok, InvalidSystem, "(B_{0+}, B_0, B_{0-}; B^*_0) fails an axiom", report=rep.to_dict())
    eta_eff = min(1.0, norm2 / (alpha * alpha))
    if kind == LEFT_SYSTEM_INCREMENT:
        inc = l2_increment_left(inner_sys, A_set, G.id_elem, eta_eff, c_slack, tol)
    else:
        inc = l2_increment_right(inner_sys, A_set, G.id_elem, eta_eff, c_slack, tol)
    measured = dict(base)
    measured.update(inc.measured)
    ctx.update(inc.context)
    return IncrementOutcome(kind, dict(inc.witness), measured, ctx, system=new_sys, S=S_new)


# ---------------------------------------------------------------------------
# the iteration
# ---------------------------------------------------------------------------

@dataclass
class IterationState:
    i: int
    system: MultiplicativeSystem
    X: Subset
    g: int
    h: int
    A_i: Subset
    alpha_i: float
    delta_i: float

    def to_dict(self) -> dict:
        return {"i": self.i, "system": self.system.to_dict(), "X": self.X.to_hex(), "g": self.g, "h": self.h,
                "A_i": self.A_i.to_hex(), "alpha_i": self.alpha_i, "delta_i": self.delta_i}


@dataclass
class Certificate:
    kind: str
    group: GroupTable
    A: Subset
    config: RunConfig
    chain: list
    triples_lower_bound: int | None = None
    anchor: int | None = None
    U: Subset | None = None
    V: Subset | None = None
    W: Subset | None = None

    def to_dict(self) -> dict:
        return {
            "format": "nonabelian-roth-certificate/1",
            "kind": self.kind,
            "group": self.group.name,
            "group_order": self.group.order,
            "group_hash": self.group.table_hash,
            "A": self.A.to_hex(),
            "config": self.config.to_dict(),
            "config_hash": config_hash(self.config),
            "chain": self.chain,
            "triples_lower_bound": self.triples_lower_bound,
            "anchor": self.anchor,
            "U": self.U.to_hex() if self.U is not None else None,
            "V": self.V.to_hex() if self.V is not None else None,
            "W": self.W.to_hex() if self.W is not None else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(json.dumps(cfg.to_dict(), sort_keys=True).encode()).hexdigest()


def accept(G: GroupTable, out: IncrementOutcome, cfg: RunConfig) -> dict:
    """Serialise an outcome after the independent checker reproduces it."""
    d = out.to_dict()
    failures = check_outcome(G, d, cfg.c_slack, cfg.tolerance)
    if failures:
        raise CertificationFailed("checker could not reproduce an outcome", kind=out.kind, failures=failures)
    return d


def trim_to(S: Subset, size: int) -> Subset:
    """Drop elements in ascending id order until |S| = size."""
    drop = S.card - size
    if drop <= 0:
        return S
    bits = S.bits.copy()
    bits[S.ids[:drop]] = False
    return Subset(S.group, bits)


def build_uvw(A_i: Subset, a: int, B0minus: Subset, B1minus: Subset):
    g = A_i.group
    ai = int(g.inv[a])
    U_t = left_translate(ai, A_i) & B0minus
    V_t = right_translate(A_i, ai) & B0minus
    n = min(U_t.card, V_t.card)
    W = two_sided(ai, square_image(A_i), ai) & B1minus
    return trim_to(U_t, n), trim_to(V_t, n), W


def injection_images(A: Subset, a: int, U: Subset, V: Subset, W: Subset):
    """All (a r, a s a, t a) for (r, t) in U x V with s = r t in W."""
    g = A.group
    out = []
    for r in U.ids.tolist():
        for t in V.ids.tolist():
            s = int(g.mul[r, t])
            if W.bits[s]:
                out.append((int(g.mul[a, r]), g.m(a, s, a), int(g.mul[t, a]), r, s, t))
    return out


def verify_injection(A: Subset, a: int, U: Subset, V: Subset, W: Subset) -> int:
    g = A.group
    sq = square_image(A)
    imgs = injection_images(A, a, U, V, W)
    seen = set()
    for x, y, z, r, s, t in imgs:
        if not (A.bits[x] and A.bits[z] and sq.bits[y]):
            raise CertificationFailed("injection image leaves A x squares x A", r=r, s=s, t=t)
        if int(g.mul[x, z]) != y:
            raise CertificationFailed("(ar)(ta) != asa", r=r, s=s, t=t)
        seen.add((x, y, z))
    if len(seen) != len(imgs):
        raise CertificationFailed("map is not injective")
    return len(imgs)


def sampler_from(cfg: RunConfig) -> SamplerConfig:
    return SamplerConfig(seed=cfg.seed, mode=cfg.mode, k=cfg.samples, n_samples=cfg.n_samples,
                         c_p=cfg.c_p, c_eta=cfg.c_eta, max_retries=cfg.max_retries)


def run_iteration(G: GroupTable, A: Subset, cfg: RunConfig | None = None) -> Certificate:
    cfg = cfg or RunConfig()
    if A.group.table_hash != G.table_hash:
        raise InclusionViolated("A lives in a different group")
    _require(A.card > 0, DegenerateInput, "A is empty")
    _require(has_distinct_squares(A), DistinctSquaresViolated, "A does not have distinct squares")
    alpha = A.card / G.order
    eps = cfg.epsilon(alpha)
    eta = cfg.c
    tol = cfg.tolerance
    cap = cfg.step_cap(alpha)
    sampler = sampler_from(cfg)
    full = G.full()
    sysB = MultiplicativeSystem(G, ((full, full, full),), full, eps)
    X, g_e, h_e = full, G.id_elem, G.id_elem
    chain = []
    for i in range(cap):
        Z = two_sided(g_e, sysB.B(0), int(G.inv[h_e]))
        A_i = A & Z
        alpha_i = A_i.card / Z.card
        if not power_set_k(X, 4) <= sysB.level(1):
            raise CertificationFailed("X_i^4 is not inside B_1", step=i)
        state = IterationState(i, sysB, X, g_e, h_e, A_i, alpha_i, X.density())
        record = state.to_dict()
        task = 100 * i
        Y = conjugate_intersection(X, g_e, h_e, sampler, task).S
        sysP, S_i = build_system(Y, 1, eps, sampler, task=task + 10)
        record["system_prime"] = sysP.to_dict()
        record["S"] = S_i.to_hex()
        sysBp = truncate(sysP, 0, 0, sysP.Bminus(1))
        o1 = u1_step(sysB, sysBp, A_i, S_i, g_e, h_e, eta, cfg.c_slack, tol)
        record["u1"] = accept(G, o1, cfg)
        if o1.kind in (RIGHT_INCREMENT, LEFT_INCREMENT):
            z = o1.witness["z"]
            new_sys = truncate(sysP, 1, 1, sysP.tail)
            if o1.kind == LEFT_INCREMENT:
                g_n, h_n = G.id_elem, int(G.inv[z])
                witnessed = right_translate(sysP.Bminus(1), z) & A_i
            else:
                g_n, h_n = z, G.id_elem
                witnessed = left_translate(z, sysP.Bminus(1)) & A_i
            record["claim"] = _claim(A, new_sys, g_n, h_n, witnessed, alpha_i, cfg)
            chain.append(record)
            sysB, X, g_e, h_e = new_sys, S_i, g_n, h_n
            continue
        a = o1.witness["a"]
        U, V, W = build_uvw(A_i, a, sysP.Bminus(0), sysP.Bminus(1))
        record["anchor"] = {"a": a, "B0minus": sysP.Bminus(0).to_hex(), "B1minus": sysP.Bminus(1).to_hex(),
                            "U": U.to_hex(), "V": V.to_hex(), "W": W.to_hex()}
        o2 = u2_step(sysP, S_i, U, V, W, cfg.c_slack, tol, sampler, task + 50)
        record["u2"] = accept(G, o2, cfg)
        if o2.kind == COUNT_LOWER_BOUND:
            count = verify_injection(A, a, U, V, W)
            if count != o2.witness["count"]:
                raise CertificationFailed("injection size differs from the pair count")
            total = count_triples(A)[0]
            if count > total:
                raise CertificationFailed("lower bound exceeds the brute-force count")
            chain.append(record)
            return Certificate(TRIPLE_COUNT, G, A, cfg, chain, count, a, U, V, W)
        z = o2.witness["z"]
        new_sys = o2.system
        if o2.kind == LEFT_SYSTEM_INCREMENT:
            g_n, h_n = a, int(G.inv[z])
            witnessed = left_translate(a, right_translate(new_sys.B(0), z) & U)
        else:
            g_n, h_n = z, int(G.inv[a])
            witnessed = right_translate(left_translate(z, new_sys.B(0)) & V, a)
        record["claim"] = _claim(A, new_sys, g_n, h_n, witnessed, alpha_i, cfg)
        chain.append(record)
        sysB, X, g_e, h_e = new_sys, o2.S, g_n, h_n
    return Certificate(INCREMENT_CHAIN_EXHAUSTED, G, A, cfg, chain)


def _claim(A: Subset, new_sys: MultiplicativeSystem, g_n: int, h_n: int, witnessed: Subset,
           alpha_i: float, cfg: RunConfig) -> dict:
    """The next density, checked exactly against the witnessed sub-count."""
    G = A.group
    Z = two_sided(g_n, new_sys.B(0), int(G.inv[h_n]))
    A_next = A & Z
    if not witnessed <= A_next:
        raise CertificationFailed("witnessed elements fall outside the next window")
    alpha_next = A_next.card / Z.card
    ratio = alpha_next / alpha_i
    return {"alpha_next": alpha_next, "witnessed": witnessed.card, "window": Z.card, "ratio": ratio,
            "c_inc_met": bool(ratio >= 1 + cfg.c_inc)}
