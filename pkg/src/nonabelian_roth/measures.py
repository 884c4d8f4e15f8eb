"""Real-valued functions and measures on a finite group.

Conventions::

    f * mu (x) = sum_y f(x y^-1) mu(y)          (average of f over x A^-1 when mu = mu_A)
    mu * f (x) = sum_y f(y^-1 x) mu(y)
    rho_x f (y) = f(y x),   lambda_x f (y) = f(x^-1 y),   f~(x) = f(x^-1)
    rho_x(mu)(A) = mu(A x), lambda_x(mu)(A) = mu(x A)

Convolutions are direct O(|G|^2) gathers over the precomputed quotient tables.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadExponent, EmptySet, GroupMismatch, NegativeMeasure, NotInNextLevel, StepOutOfRange
from .groups import GroupTable, Subset


@dataclass(frozen=True, eq=False)
class FunctionVec:
    group: GroupTable
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.group.order,):
            raise ValueError("function length must equal the group order")
        object.__setattr__(self, "values", v)

    def __add__(self, other):
        _same(self, other)
        return FunctionVec(self.group, self.values + other.values)

    def __sub__(self, other):
        _same(self, other)
        return FunctionVec(self.group, self.values - other.values)

    def __mul__(self, c: float):
        return FunctionVec(self.group, self.values * c)

    __rmul__ = __mul__

    def __call__(self, x: int) -> float:
        return float(self.values[x])

    def to_csv(self) -> str:
        return _csv_rows(self.values)


@dataclass(frozen=True, eq=False)
class MeasureVec:
    group: GroupTable
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.group.order,):
            raise ValueError("measure length must equal the group order")
        object.__setattr__(self, "weights", w)

    @property
    def total(self) -> float:
        return float(np.abs(self.weights).sum())

    def __sub__(self, other):
        _same(self, other)
        return MeasureVec(self.group, self.weights - other.weights)

    def __add__(self, other):
        _same(self, other)
        return MeasureVec(self.group, self.weights + other.weights)

    def __mul__(self, c: float):
        return MeasureVec(self.group, self.weights * c)

    __rmul__ = __mul__

    def of(self, A: Subset) -> float:
        """mu(A)."""
        return float(self.weights[A.bits].sum())

    def support(self) -> Subset:
        return Subset(self.group, self.weights != 0)

    def to_csv(self) -> str:
        return _csv_rows(self.weights)


def _csv_rows(vals) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["element", "value"])
    for i, v in enumerate(vals):
        w.writerow([i, repr(float(v))])
    return buf.getvalue()


def _same(a, b):
    if a.group is not b.group and a.group.table_hash != b.group.table_hash:
        raise GroupMismatch("operands live in different groups")


def indicator(A: Subset) -> FunctionVec:
    return FunctionVec(A.group, A.bits.astype(float))


def constant(group: GroupTable, c: float = 1.0) -> FunctionVec:
    return FunctionVec(group, np.full(group.order, float(c)))


def uniform_measure(A: Subset) -> MeasureVec:
    if A.card == 0:
        raise EmptySet("uniform measure on an empty set")
    return MeasureVec(A.group, A.bits / A.card)


def point_mass(group: GroupTable, x: int) -> MeasureVec:
    w = np.zeros(group.order)
    w[x] = 1.0
    return MeasureVec(group, w)


def convolve_fn_measure(f: FunctionVec, mu: MeasureVec) -> FunctionVec:
    _same(f, mu)
    g = f.group
    return FunctionVec(g, f.values[g.div] @ mu.weights)


def convolve_measure_fn(mu: MeasureVec, f: FunctionVec) -> FunctionVec:
    _same(f, mu)
    g = f.group
    return FunctionVec(g, f.values[g.ldiv] @ mu.weights)


def convolve_measures(mu: MeasureVec, nu: MeasureVec) -> MeasureVec:
    _same(mu, nu)
    g = mu.group
    w = np.bincount(g.mul.ravel(), weights=np.outer(mu.weights, nu.weights).ravel(), minlength=g.order)
    return MeasureVec(g, w)


def _check_measure(mu: MeasureVec):
    if np.any(mu.weights < 0):
        raise NegativeMeasure("L_p norms need a non-negative measure")


def lp_norm(f: FunctionVec, mu: MeasureVec, p: float) -> float:
    _same(f, mu)
    _check_measure(mu)
    if p == math.inf:
        supp = mu.weights > 0
        return float(np.abs(f.values[supp]).max()) if supp.any() else 0.0
    if not p >= 1:
        raise BadExponent(f"exponent {p} is not >= 1")
    return float((np.abs(f.values) ** p @ mu.weights) ** (1.0 / p))


def inner_product(f: FunctionVec, h: FunctionVec, mu: MeasureVec) -> float:
    _same(f, h)
    _same(f, mu)
    _check_measure(mu)
    return float(np.sum(f.values * h.values * mu.weights))


def pair(mu: MeasureVec, f: FunctionVec) -> float:
    """<mu, f> = integral of f against mu (real scalars)."""
    _same(f, mu)
    return float(f.values @ mu.weights)


def act_right(x: int, f: FunctionVec) -> FunctionVec:
    g = f.group
    return FunctionVec(g, f.values[g.mul[:, x]])


def act_left(x: int, f: FunctionVec) -> FunctionVec:
    g = f.group
    return FunctionVec(g, f.values[g.mul[g.inv[x], :]])


def act_right_measure(x: int, mu: MeasureVec) -> MeasureVec:
    g = mu.group
    return MeasureVec(g, mu.weights[g.mul[:, x]])


def act_left_measure(x: int, mu: MeasureVec) -> MeasureVec:
    g = mu.group
    return MeasureVec(g, mu.weights[g.mul[x, :]])


def tilde(obj):
    g = obj.group
    if isinstance(obj, MeasureVec):
        return MeasureVec(g, obj.weights[g.inv])
    return FunctionVec(g, obj.values[g.inv])


def tv_norm(mu: MeasureVec) -> float:
    return mu.total


def tv_haar_defect(sys, i: int, x: int) -> float:
    """Total variation of rho_{x^-1}(mu_{B_i}) - mu_{B_i} for x in B_{i+1}."""
    if not 0 <= i <= sys.r:
        raise StepOutOfRange(f"step {i} outside 0..{sys.r}", i=i, r=sys.r)
    nxt = sys.level(i + 1)
    if x not in nxt:
        raise NotInNextLevel(f"element {x} is not in B_{i + 1}", x=int(x), i=i)
    mu = uniform_measure(sys.steps[i][1])
    return (act_right_measure(int(sys.group.inv[x]), mu) - mu).total


def tv_haar_defect_left(sys, i: int, x: int) -> float:
    """Total variation of lambda_x(mu_{B_i}) - mu_{B_i} for x in B_{i+1}."""
    if not 0 <= i <= sys.r:
        raise StepOutOfRange(f"step {i} outside 0..{sys.r}", i=i, r=sys.r)
    if x not in sys.level(i + 1):
        raise NotInNextLevel(f"element {x} is not in B_{i + 1}", x=int(x), i=i)
    mu = uniform_measure(sys.steps[i][1])
    return (act_left_measure(x, mu) - mu).total


def haar_defect_bound(epsilon: float) -> float:
    return 2 * epsilon / (1 + epsilon)
