"""Almost-periodicity and the neighbourhoods built from it.

Everything here is decided by exact sweeps at desk scale.  The Monte-Carlo mode
follows the sampling argument (good k-tuples, then translates of good tuples
that are again good) and keeps only candidates that pass the exact test, so
its output is always a subset of the exhaustive output.
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    CertificationFailed,
    EmptySet,
    PigeonholeExhausted,
    PreconditionViolated,
    RetriesExhausted,
    ZeroFunction,
    NotSymmetricNeighbourhood,
)
from .groups import (
    Subset,
    conjugate_set,
    is_symmetric_neighbourhood,
    power_set_k,
    product_of,
    product_set,
)
from .measures import FunctionVec, convolve_fn_measure, convolve_measure_fn, indicator, lp_norm, uniform_measure
from .msys import MultiplicativeSystem, verify_system

MODES = ("exhaustive", "montecarlo")
_TOL = 1e-12


@dataclass(frozen=True)
class SamplerConfig:
    eta: float = 0.25
    p: float = 2.0
    k: int = 16
    seed: int = 0
    mode: str = "exhaustive"
    validation_threshold: float | None = None
    n_samples: int = 64
    c_p: float = 1.0
    c_eta: float = 0.25
    max_retries: int = 8
    # explicit factor standing in for (1 + O(eps/p)); None means 1 + eps
    rel_slack: float | None = None

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if not self.p >= 2:
            raise ValueError(f"p must be >= 2, got {self.p}")
        if self.k < 1 or self.n_samples < 1:
            raise ValueError("k and n_samples must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    def rng(self, task: int) -> np.random.Generator:
        return np.random.default_rng([self.seed & (2**64 - 1), task])


@dataclass
class NeighbourhoodResult:
    S: Subset
    density: float
    certified: bool
    log: dict = field(default_factory=dict)


@dataclass
class PeriodReport:
    T: Subset
    defects: np.ndarray
    threshold: float
    density: float
    eta: float
    p: float


def _shift_matrix(F: np.ndarray, g) -> np.ndarray:
    # column t holds rho_{t^-1} F, i.e. y -> F(y t^-1)
    return F[g.div]


def _lp_rows(diff: np.ndarray, weights: np.ndarray, p: float) -> np.ndarray:
    """L_p norms of the columns of diff against each row of weights."""
    return (weights @ np.abs(diff) ** p) ** (1.0 / p)


def period_defects(f: FunctionVec, X: Subset, p: float) -> np.ndarray:
    """||rho_{x^-1}(f * mu_X) - f * mu_X||_{L_p(mu_G)} for every x."""
    g = f.group
    F = convolve_fn_measure(f, uniform_measure(X)).values
    w = np.full((1, g.order), 1.0 / g.order)
    return _lp_rows(_shift_matrix(F, g) - F[:, None], w, p)[0]


def almost_periods_report(f: FunctionVec, X: Subset, cfg: SamplerConfig, task: int = 0) -> PeriodReport:
    if X.is_empty():
        raise EmptySet("almost periods of a convolution with an empty set")
    if not np.any(f.values):
        raise ZeroFunction("f is identically zero")
    g = f.group
    norm = lp_norm(f, uniform_measure(g.full()), cfg.p)
    thr = cfg.validation_threshold if cfg.validation_threshold is not None else cfg.eta * norm
    d = period_defects(f, X, cfg.p)
    d = np.maximum(d, d[g.inv])
    exact = d <= thr + _TOL
    if cfg.mode == "exhaustive":
        keep = exact
    else:
        keep = _mc_candidates(f, X, cfg, thr, task) & exact
        keep = keep | keep[g.inv]
        keep[g.id_elem] = True
    T = Subset(g, keep)
    return PeriodReport(T, d, thr, T.density(), cfg.eta, cfg.p)


def almost_periods(f: FunctionVec, X: Subset, cfg: SamplerConfig, task: int = 0) -> Subset:
    """All x with ||rho_{x^-1}(f*mu_X) - f*mu_X||_{L_p(mu_G)} <= eta ||f||_{L_p(mu_G)}."""
    return almost_periods_report(f, X, cfg, task).T


def _mc_candidates(f: FunctionVec, X: Subset, cfg: SamplerConfig, thr: float, task: int) -> np.ndarray:
    g = f.group
    rng = cfg.rng(task)
    F = convolve_fn_measure(f, uniform_measure(X)).values
    xs = X.ids
    w = np.full((1, g.order), 1.0 / g.order)
    found = np.zeros(g.order, dtype=bool)
    for _ in range(cfg.n_samples):
        z = rng.choice(xs, size=cfg.k)
        # (1/k) sum_i rho_{z_i^-1} f
        approx = f.values[g.div[:, z]].mean(axis=1)
        if _lp_rows((approx - F)[:, None], w, cfg.p)[0] > thr / 2 + _TOL:
            continue
        # z t is again a tuple from X whose approximant is rho_{t^-1} of ours
        inX = X.bits[g.mul[z, :]].all(axis=0)
        shifted = _lp_rows(approx[g.div] - F[:, None], w, cfg.p)[0]
        found |= inX & (shifted <= thr / 2 + _TOL)
    return found


# ---------------------------------------------------------------------------
# Bogolioubov-type neighbourhoods
# ---------------------------------------------------------------------------

def _correlation(F: np.ndarray, X: Subset) -> np.ndarray:
    """<rho_{x^-1} F, 1_X> in counting measure, for every x."""
    g = X.group
    return F[g.div[X.ids, :]].sum(axis=0)


def bogolioubov_neighbourhood(X: Subset, k: int, cfg: SamplerConfig | None = None, task: int = 0) -> NeighbourhoodResult:
    """A symmetric neighbourhood S with S^k inside X^4, certified exactly."""
    if not is_symmetric_neighbourhood(X):
        raise NotSymmetricNeighbourhood("X must contain the identity and be closed under inverses")
    if k < 1:
        raise ValueError("k must be >= 1")
    cfg = cfg or SamplerConfig()
    g = X.group
    delta = X.density()
    p = cfg.c_p * math.log(2 / delta) + 2
    eta = min(1.0, cfg.c_eta / k)
    X2 = product_set(X, X)
    X4 = product_set(X2, X2)
    f = indicator(X2)
    F = convolve_fn_measure(f, uniform_measure(X)).values
    corr = _correlation(F, X)
    good_corr = (corr > X.card / 2) & (corr[g.inv] > X.card / 2)
    trace = []
    samples = cfg.k
    for attempt in range(cfg.max_retries + 1):
        scfg = replace(cfg, eta=eta, p=p, k=samples, validation_threshold=None)
        T = almost_periods(f, X, scfg, task=task * 1000 + attempt)
        S = Subset(g, T.bits & good_corr)
        ok = power_set_k(S, k) <= X4
        trace.append({"attempt": attempt, "eta": eta, "p": p, "samples": samples,
                      "T": T.card, "S": S.card, "certified": bool(ok)})
        if ok:
            return NeighbourhoodResult(S, S.density(), True,
                                       {"k": k, "delta": delta, "retries": attempt, "trace": trace})
        eta /= 2
        samples *= 2
    raise RetriesExhausted(f"S^{k} inside X^4 not certified after {cfg.max_retries} retries", trace=trace)


def conjugate_intersection(S: Subset, g_elem: int, h_elem: int, cfg: SamplerConfig | None = None,
                           task: int = 0) -> NeighbourhoodResult:
    """X := gR^2g^-1 cap hR^2h^-1 with R^8 inside S^4, so X^4 lies in gS^4g^-1 cap hS^4h^-1."""
    nab = bogolioubov_neighbourhood(S, 8, cfg, task)
    R = nab.S
    R2 = product_set(R, R)
    X = conjugate_set(g_elem, R2) & conjugate_set(h_elem, R2)
    S4 = power_set_k(S, 4)
    target = conjugate_set(g_elem, S4) & conjugate_set(h_elem, S4)
    ok = power_set_k(X, 4) <= target and is_symmetric_neighbourhood(X)
    if not ok:
        raise CertificationFailed("X^4 is not inside the conjugate intersection")
    return NeighbourhoodResult(X, X.density(), True,
                               {"R": R.card, "R_density": nab.density, "nab": nab.log})


# ---------------------------------------------------------------------------
# multiplicative systems from dense sets
# ---------------------------------------------------------------------------

def _two_sided_power(S18: Subset, M: Subset) -> Subset:
    return product_of(S18, M, S18)


def build_system(X: Subset, r: int, epsilon: float, cfg: SamplerConfig | None = None,
                 log: list | None = None, task: int = 0):
    """An (r+1)-step epsilon-closed system with B_{0+} inside X^4 and S^4 inside the tail.

    Returns (system, S).
    """
    if not is_symmetric_neighbourhood(X):
        raise NotSymmetricNeighbourhood("X must contain the identity and be closed under inverses")
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    if r < 0:
        raise ValueError("r must be >= 0")
    cfg = cfg or SamplerConfig()
    g = X.group
    S_i = bogolioubov_neighbourhood(X, 9, cfg, task).S
    steps = []
    for i in range(r + 1):
        delta_i = S_i.density()
        l_i = 18 * (math.ceil(math.log(1 / delta_i) / math.log1p(epsilon)) + 2)
        S_next = bogolioubov_neighbourhood(S_i, l_i, cfg, task * 100 + i + 1).S
        S18 = power_set_k(S_next, 18)
        S9 = power_set_k(S_next, 9)
        # M_j = S^{18j} S_i S^{18j}, scanned smallest j first
        M = _two_sided_power(S18, S_i)
        chosen = None
        for j in range(1, l_i // 18):
            M_next = _two_sided_power(S18, M)
            if _leq(M_next.card, M.card, epsilon):
                chosen = j
                break
            M = M_next
        if chosen is None:
            raise PigeonholeExhausted(f"no pigeonhole index found at level {i}", level=i, l=l_i)
        Bm = M
        B = product_of(S9, Bm, S9)
        Bp = product_of(S9, B, S9)
        steps.append((Bp, B, Bm))
        if log is not None:
            log.append({"level": i, "l": l_i, "j": chosen, "delta": delta_i,
                        "sizes": [Bp.card, B.card, Bm.card], "S_next": S_next.card})
        S_i = S_next
    S = S_i
    tail = power_set_k(S, 4)
    sys = MultiplicativeSystem(g, tuple(steps), tail, epsilon)
    X4 = power_set_k(X, 4)
    rep = verify_system(sys)
    if not rep.ok:
        raise CertificationFailed("constructed system fails an axiom", report=rep.to_dict())
    if not steps[0][0] <= X4:
        raise CertificationFailed("B_{0+} is not inside X^4")
    return sys, S


def _leq(big: int, small: int, epsilon: float) -> bool:
    return Fraction(big) <= (1 + Fraction(epsilon)) * small


# ---------------------------------------------------------------------------
# relative almost periods on a 2-step system
# ---------------------------------------------------------------------------

@dataclass
class RelativePeriodReport:
    T: Subset
    threshold: float
    per_t_bound: float
    sup_defect_T4: float
    density: float
    side: str


def _relative_setup(sys: MultiplicativeSystem, X: Subset, A: Subset):
    if sys.r < 1:
        raise PreconditionViolated("a 2-step system is required")
    if A.is_empty():
        raise EmptySet("A is empty")
    if not is_symmetric_neighbourhood(X):
        raise NotSymmetricNeighbourhood("X must be a symmetric neighbourhood")
    if not power_set_k(X, 8) <= sys.level(2):
        raise PreconditionViolated("X^8 is not inside B_2")
    if not A <= sys.Bminus(0):
        raise PreconditionViolated("A is not inside B_{0-}")


def _relative(sys, X, f, A, eta, p, slack, side, cfg, task) -> RelativePeriodReport:
    _relative_setup(sys, X, A)
    g = sys.group
    B1 = sys.B(1)
    fmax = lp_norm(f, uniform_measure(sys.Bplus(0)), math.inf)
    factor = slack if slack is not None else 1 + sys.epsilon
    thr = eta * factor * fmax
    mu = uniform_measure(A)
    if side == "right":
        F = convolve_fn_measure(f, mu).values
        shift = lambda tids: F[g.div[:, tids]]  # noqa: E731  rho_{t^-1} F
        # L_p(rho_x mu_B1): weight of y is mu_B1(y x)
        weights_for = lambda xids: B1.bits[g.mul[:, xids].T] / B1.card  # noqa: E731
    else:
        F = convolve_measure_fn(mu, f).values
        shift = lambda tids: F[g.ldiv[:, tids]]  # noqa: E731  lambda_t F: y -> F(t^-1 y)
        weights_for = lambda xids: B1.bits[g.mul[xids, :]] / B1.card  # noqa: E731
    X2 = product_set(X, X)
    X6 = power_set_k(X, 6)
    cand = X2.ids
    W = weights_for(X6.ids)
    D = shift(cand) - F[:, None]
    sup = _lp_rows(D, W, p).max(axis=0)
    ok_t = np.zeros(g.order, dtype=bool)
    ok_t[cand] = sup <= thr / 4 + _TOL
    keep = ok_t & ok_t[g.inv]
    if cfg is not None and cfg.mode == "montecarlo":
        keep &= _mc_relative(sys, f, A, F, thr, p, side, cfg, task)
        keep = keep | keep[g.inv]
        keep[g.id_elem] = True
    T = Subset(g, keep)
    # every t in T^4 must satisfy the full bound in L_p(mu_B1)
    T4 = power_set_k(T, 4)
    w1 = (B1.bits / B1.card)[None, :]
    d4 = _lp_rows(shift(T4.ids) - F[:, None], w1, p)[0]
    worst = float(d4.max())
    if worst > thr + 1e-9:
        raise CertificationFailed("a product of four periods breaks the relative bound", worst=worst, thr=thr)
    return RelativePeriodReport(T, thr, thr / 4, worst, T.density(), side)


def _mc_relative(sys, f, A, F, thr, p, side, cfg, task) -> np.ndarray:
    g = sys.group
    rng = cfg.rng(10_000 + task)
    w = (sys.Bplus(1).bits / sys.Bplus(1).card)[None, :]
    found = np.zeros(g.order, dtype=bool)
    for _ in range(cfg.n_samples):
        z = rng.choice(A.ids, size=cfg.k)
        if side == "right":
            approx = f.values[g.div[:, z]].mean(axis=1)
            inA = A.bits[g.mul[z, :]].all(axis=0)
            shifted = approx[g.div] - F[:, None]
        else:
            approx = f.values[g.ldiv[:, z]].mean(axis=1)
            inA = A.bits[g.mul[:, z]].all(axis=1)
            shifted = approx[g.ldiv] - F[:, None]
        if _lp_rows((approx - F)[:, None], w, p)[0] > thr / 8 + _TOL:
            continue
        found |= inA & (_lp_rows(shifted, w, p)[0] <= thr / 8 + _TOL)
    return found


def relative_almost_periods_report(sys, X, f, A, eta, p, slack=None, cfg=None, task=0) -> RelativePeriodReport:
    return _relative(sys, X, f, A, eta, p, slack, "right", cfg, task)


def left_relative_almost_periods_report(sys, X, f, A, eta, p, slack=None, cfg=None, task=0) -> RelativePeriodReport:
    return _relative(sys, X, f, A, eta, p, slack, "left", cfg, task)


def relative_almost_periods(sys, X, f, A, eta, p, slack=None, cfg=None, task=0) -> Subset:
    """T inside X^2 with ||rho_{t^-1}(f*mu_A) - f*mu_A||_{L_p(mu_B1)} <= eta*slack*||f||_inf for t in T^4."""
    return _relative(sys, X, f, A, eta, p, slack, "right", cfg, task).T


def left_relative_almost_periods(sys, X, f, A, eta, p, slack=None, cfg=None, task=0) -> Subset:
    """Mirror image: ||lambda_t(mu_A*f) - mu_A*f||_{L_p(mu_B1)} bounded for t in T^4."""
    return _relative(sys, X, f, A, eta, p, slack, "left", cfg, task).T
