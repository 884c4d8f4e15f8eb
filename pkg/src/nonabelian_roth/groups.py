"""Finite groups as multiplication tables, and subsets of them as bit-vectors.

Element ids are dense integers ``0..order-1`` and id 0 is always the identity.
All objects here are immutable once built.
"""
from __future__ import annotations

import hashlib
import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ClosureTooLarge,
    DescriptorError,
    GroupMismatch,
    NonAssociative,
    NotLatinSquare,
)

FULL_ASSOC_CAP = 512
SAMPLED_ASSOC_CAP = 5040
CLOSURE_CAP = 5040
_ASSOC_SAMPLES = 20000


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class GroupTable:
    """A finite group given by its Cayley table (identity has id 0)."""

    order: int
    mul: np.ndarray
    inv: np.ndarray
    sq: np.ndarray
    name: str
    abelian: bool
    id_elem: int = 0
    labels: tuple = field(default=(), repr=False)

    def __len__(self):
        return self.order

    @property
    def elements(self) -> range:
        return range(self.order)

    def m(self, *xs: int) -> int:
        """Product of the given elements, left to right."""
        out = self.id_elem
        for x in xs:
            out = int(self.mul[out, x])
        return out

    def conj(self, g: int, x: int) -> int:
        return int(self.mul[self.mul[g, x], self.inv[g]])

    def element_order(self, x: int) -> int:
        k, y = 1, int(x)
        while y != self.id_elem:
            y = int(self.mul[y, x])
            k += 1
        return k

    @cached_property
    def div(self) -> np.ndarray:
        # div[x, y] = x y^-1
        return _frozen(self.mul[:, self.inv])

    @cached_property
    def ldiv(self) -> np.ndarray:
        # ldiv[x, y] = y^-1 x
        return _frozen(self.mul[self.inv, :].T)

    @cached_property
    def table_hash(self) -> str:
        h = hashlib.sha256()
        h.update(str(self.order).encode())
        h.update(np.asarray(self.mul, dtype=np.int32).tobytes())
        return h.hexdigest()

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    # -- subset helpers ---------------------------------------------------
    def subset(self, elems: Iterable[int] = ()) -> "Subset":
        bits = np.zeros(self.order, dtype=bool)
        idx = list(elems)
        if idx:
            bits[np.asarray(idx, dtype=np.int64)] = True
        return Subset(self, bits)

    def empty(self) -> "Subset":
        return Subset(self, np.zeros(self.order, dtype=bool))

    def full(self) -> "Subset":
        return Subset(self, np.ones(self.order, dtype=bool))

    def identity_set(self) -> "Subset":
        return self.subset([self.id_elem])

    def __repr__(self):
        return f"GroupTable({self.name!r}, order={self.order}, abelian={self.abelian})"


class Subset:
    """A subset of a group, stored as a dense boolean vector."""

    __slots__ = ("group", "bits", "card", "_key")

    def __init__(self, group: GroupTable, bits: np.ndarray):
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (group.order,):
            raise ValueError(f"bit-vector of length {bits.shape} for group of order {group.order}")
        self.group = group
        self.bits = _frozen(bits.copy())
        self.card = int(self.bits.sum())
        self._key = None

    # -- basic protocol ---------------------------------------------------
    def __len__(self):
        return self.card

    def __contains__(self, x) -> bool:
        return bool(self.bits[int(x)])

    def __iter__(self):
        return iter(self.elements())

    def elements(self) -> list[int]:
        return np.flatnonzero(self.bits).tolist()

    @property
    def ids(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def density(self) -> float:
        return self.card / self.group.order

    def _check(self, other: "Subset"):
        if other.group is not self.group and other.group.table_hash != self.group.table_hash:
            raise GroupMismatch("subsets live in different groups",
                                left=self.group.name, right=other.group.name)

    def key(self) -> bytes:
        if self._key is None:
            self._key = np.packbits(self.bits, bitorder="little").tobytes()
        return self._key

    def __eq__(self, other):
        if not isinstance(other, Subset):
            return NotImplemented
        return self.group.order == other.group.order and self.key() == other.key()

    def __hash__(self):
        return hash((self.group.order, self.key()))

    def __and__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.group, self.bits & other.bits)

    def __or__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.group, self.bits | other.bits)

    def __sub__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.group, self.bits & ~other.bits)

    def __le__(self, other: "Subset") -> bool:
        self._check(other)
        return not bool(np.any(self.bits & ~other.bits))

    def __ge__(self, other: "Subset") -> bool:
        return other <= self

    def complement(self) -> "Subset":
        return Subset(self.group, ~self.bits)

    def is_empty(self) -> bool:
        return self.card == 0

    # -- serialisation ----------------------------------------------------
    def to_hex(self) -> str:
        value = 0
        for x in self.elements():
            value |= 1 << x
        return f"{self.group.order}:{value:x}"

    @classmethod
    def from_hex(cls, group: GroupTable, text: str) -> "Subset":
        order_s, _, hex_s = text.strip().partition(":")
        if not hex_s or int(order_s) != group.order:
            raise DescriptorError(f"bad subset hex {text!r} for group of order {group.order}")
        value = int(hex_s, 16)
        if value >> group.order:
            raise DescriptorError(f"subset hex {text!r} has bits beyond the group order")
        return group.subset(i for i in range(group.order) if value >> i & 1)

    def __repr__(self):
        elems = self.elements()
        shown = elems if len(elems) <= 12 else elems[:12] + ["..."]
        return f"Subset({self.group.name}, card={self.card}, {shown})"


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------

def from_table(table, name: str = "G", labels: Sequence[str] = (), rng_seed: int = 0) -> GroupTable:
    """Validate a Cayley table and build a GroupTable with the identity relabelled to id 0."""
    mul = np.asarray(table, dtype=np.int64)
    n = mul.shape[0]
    if mul.ndim != 2 or mul.shape != (n, n) or n == 0:
        raise NotLatinSquare("table must be a non-empty square array", shape=list(mul.shape))
    if mul.min() < 0 or mul.max() >= n:
        raise NotLatinSquare("table entries out of range")
    target = np.arange(n)
    rows_ok = np.all(np.sort(mul, axis=1) == target)
    cols_ok = np.all(np.sort(mul, axis=0) == target[:, None])
    if not (rows_ok and cols_ok):
        raise NotLatinSquare("table is not a Latin square")

    ident = [e for e in range(n) if np.array_equal(mul[e], target) and np.array_equal(mul[:, e], target)]
    if not ident:
        raise NonAssociative("no two-sided identity element")
    e = ident[0]
    if e != 0:
        perm = np.arange(n)
        perm[[0, e]] = perm[[e, 0]]  # perm is an involution
        mul = perm[mul[np.ix_(perm, perm)]]
        if labels:
            labels = list(labels)
            labels[0], labels[e] = labels[e], labels[0]

    _check_associative(mul, rng_seed)
    inv = np.argmax(mul == 0, axis=1)
    if not np.all(mul[np.arange(n), inv] == 0) or not np.all(mul[inv, np.arange(n)] == 0):
        raise NonAssociative("inverses are not two-sided")
    sq = mul[np.arange(n), np.arange(n)]
    abelian = bool(np.array_equal(mul, mul.T))
    return GroupTable(order=n, mul=_frozen(mul.astype(np.int64)), inv=_frozen(inv.astype(np.int64)),
                      sq=_frozen(sq.astype(np.int64)), name=name, abelian=abelian,
                      labels=tuple(labels))


def _check_associative(mul: np.ndarray, rng_seed: int = 0) -> None:
    n = mul.shape[0]
    if n <= FULL_ASSOC_CAP:
        for a in range(n):
            # (a b) c  vs  a (b c) for all b, c
            left = mul[mul[a]]
            right = mul[a][mul]
            if not np.array_equal(left, right):
                b, c = np.argwhere(left != right)[0]
                raise NonAssociative("associativity fails", triple=[int(a), int(b), int(c)])
        return
    rng = np.random.default_rng(rng_seed)
    a, b, c = rng.integers(0, n, size=(3, _ASSOC_SAMPLES))
    bad = mul[mul[a, b], c] != mul[a, mul[b, c]]
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NonAssociative("associativity fails (sampled)", triple=[int(a[i]), int(b[i]), int(c[i])])


def cyclic(n: int) -> GroupTable:
    if n < 1:
        raise DescriptorError("cyclic order must be positive")
    idx = np.arange(n)
    return from_table((idx[:, None] + idx[None, :]) % n, name=f"cyclic({n})")


def dihedral(n: int) -> GroupTable:
    """Symmetries of the n-gon, order 2n; id k + n*e stands for r^k s^e."""
    if n < 1:
        raise DescriptorError("dihedral parameter must be positive")
    size = 2 * n
    table = np.empty((size, size), dtype=np.int64)
    labels = []
    for x in range(size):
        a, e = x % n, x // n
        labels.append(("r^%d" % a) + ("s" if e else ""))
        for y in range(size):
            b, f = y % n, y // n
            k = (a + (b if e == 0 else -b)) % n
            table[x, y] = k + n * ((e + f) % 2)
    return from_table(table, name=f"dihedral({n})", labels=labels)


_Q8_LABELS = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]


def quaternion8() -> GroupTable:
    # unit products: (unit, unit) -> (sign, unit) for units 1, i, j, k
    unit = {(0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
            (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
            (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
            (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0)}
    table = np.empty((8, 8), dtype=np.int64)
    for x in range(8):
        ux, sx = x // 2, -1 if x % 2 else 1
        for y in range(8):
            uy, sy = y // 2, -1 if y % 2 else 1
            s, u = unit[(ux, uy)]
            table[x, y] = 2 * u + (0 if s * sx * sy == 1 else 1)
    return from_table(table, name="quaternion8", labels=_Q8_LABELS)


def _perm_closure(gens: Sequence[tuple], degree: int, cap: int):
    ident = tuple(range(degree))
    elems = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(p[g[i]] for i in range(degree))  # apply g first, then p
                if q not in index:
                    index[q] = len(elems)
                    elems.append(q)
                    nxt.append(q)
                    if len(elems) > cap:
                        raise ClosureTooLarge(f"permutation closure exceeds cap {cap}", cap=cap)
        frontier = nxt
    return elems, index


def _perm_group(elems: list, index: dict, name: str) -> GroupTable:
    n = len(elems)
    deg = len(elems[0])
    arr = np.asarray(elems, dtype=np.int64)
    table = np.empty((n, n), dtype=np.int64)
    for x in range(n):
        prod = arr[x][arr]  # (x o y)(i) = x[y[i]]
        for y in range(n):
            table[x, y] = index[tuple(prod[y])]
    labels = [_cycle_str(p) for p in elems] if deg <= 9 else []
    return from_table(table, name=name, labels=labels)


def _cycle_str(p: tuple) -> str:
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j + 1)
            j = p[j]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def symmetric(n: int) -> GroupTable:
    if not 1 <= n <= 5:
        raise DescriptorError("symmetric(n) supports 1 <= n <= 5")
    elems = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(elems)}
    return _perm_group(elems, index, f"symmetric({n})")


def alternating4() -> GroupTable:
    return permutation_group(["(1 2 3)", "(1 2)(3 4)"], name="alternating(4)")


def parse_cycles(text: str) -> list[list[int]]:
    cycles = re.findall(r"\(([^()]*)\)", text)
    if not cycles and text.strip() not in ("", "()"):
        raise DescriptorError(f"bad cycle notation {text!r}")
    return [[int(t) for t in c.replace(",", " ").split()] for c in cycles]


def permutation_group(generators: Sequence[str | Sequence[Sequence[int]]], name: str = "perm",
                      cap: int = CLOSURE_CAP, one_based: bool = True) -> GroupTable:
    """Closure of permutations given in cycle notation (points 1-based by default)."""
    parsed = [parse_cycles(g) if isinstance(g, str) else [list(c) for c in g] for g in generators]
    shift = 1 if one_based else 0
    pts = [p - shift for cyc in parsed for c in cyc for p in c]
    if pts and min(pts) < 0:
        raise DescriptorError("cycle points must be >= 1")
    degree = max(pts, default=0) + 1
    perms = []
    for cyc in parsed:
        p = list(range(degree))
        for c in cyc:
            for a, b in zip(c, c[1:] + c[:1]):
                p[a - shift] = b - shift
        if sorted(p) != list(range(degree)):
            raise DescriptorError("cycles do not define a permutation")
        perms.append(tuple(p))
    elems, index = _perm_closure(perms, degree, cap)
    return _perm_group(elems, index, name)


def direct_product(*groups: GroupTable) -> GroupTable:
    if not groups:
        raise DescriptorError("direct product of nothing")
    out = groups[0]
    for h in groups[1:]:
        n, m = out.order, h.order
        # (g, x) -> g*m + x
        g_idx = np.arange(n * m) // m
        x_idx = np.arange(n * m) % m
        table = out.mul[np.ix_(g_idx, g_idx)] * m + h.mul[np.ix_(x_idx, x_idx)]
        labels = []
        if out.labels or h.labels:
            labels = [f"({out.label(a)},{h.label(b)})" for a in range(n) for b in range(m)]
        out = from_table(table, name=f"{out.name} x {h.name}", labels=labels)
    return out


# ---------------------------------------------------------------------------
# descriptors
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*|\d+|[(),x*])")


def load_group(spec) -> GroupTable:
    """Build a GroupTable from a descriptor.

    Accepted forms: a ``GroupTable`` (returned as is); a square table (nested
    lists or array); a string such as ``"cyclic(12)"``, ``"dihedral(6)"``,
    ``"q8"``, ``"symmetric(4)"``, ``"cyclic(2) x dihedral(3)"``,
    ``"product(cyclic(3), cyclic(3))"``; or a path to a descriptor file
    (optionally prefixed with ``@``).
    """
    if isinstance(spec, GroupTable):
        return spec
    if isinstance(spec, (list, tuple, np.ndarray)):
        return from_table(spec)
    if isinstance(spec, Path):
        return read_group_file(spec)
    if not isinstance(spec, str):
        raise DescriptorError(f"unsupported group descriptor {spec!r}")
    text = spec.strip()
    if text.startswith("@"):
        return read_group_file(Path(text[1:]))
    if text.endswith(".grp") or ("/" in text and Path(text).exists()):
        return read_group_file(Path(text))
    return _DescriptorParser(text).parse()


class _DescriptorParser:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        pos = 0
        while pos < len(text):
            mt = _TOKEN.match(text, pos)
            if not mt:
                if text[pos:].strip() == "":
                    break
                raise DescriptorError(f"cannot parse group descriptor {text!r}")
            self.toks.append(mt.group(1))
            pos = mt.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expect=None):
        tok = self.peek()
        if tok is None or (expect is not None and tok != expect):
            raise DescriptorError(f"cannot parse group descriptor {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> GroupTable:
        g = self.product()
        if self.peek() is not None:
            raise DescriptorError(f"trailing input in group descriptor {self.text!r}")
        return g

    def product(self) -> GroupTable:
        factors = [self.atom()]
        while self.peek() in ("x", "*"):
            self.take()
            factors.append(self.atom())
        return factors[0] if len(factors) == 1 else direct_product(*factors)

    def atom(self) -> GroupTable:
        tok = self.take()
        if tok == "(":
            g = self.product()
            self.take(")")
            return g
        name = tok.lower()
        if name in ("q8", "quaternion8", "quaternion"):
            if self.peek() == "(":
                self.take("(")
                self.take(")")
            return quaternion8()
        if name in ("a4", "alternating"):
            if name == "alternating":
                self.take("(")
                if self.take() != "4":
                    raise DescriptorError("only alternating(4) is built in")
                self.take(")")
            return alternating4()
        if name in ("product", "direct_product"):
            self.take("(")
            factors = [self.product()]
            while self.peek() == ",":
                self.take()
                factors.append(self.product())
            self.take(")")
            return direct_product(*factors)
        short = re.fullmatch(r"([cdsz])(\d+)", name)
        if short:
            kind, arg = short.group(1), int(short.group(2))
        else:
            kind = name
            self.take("(")
            arg = int(self.take())
            self.take(")")
        makers = {"c": cyclic, "z": cyclic, "cyclic": cyclic, "d": dihedral, "dihedral": dihedral,
                  "s": symmetric, "symmetric": symmetric}
        if kind not in makers:
            raise DescriptorError(f"unknown group family {tok!r}")
        return makers[kind](arg)


def read_group_file(path: Path) -> GroupTable:
    return parse_group_text(Path(path).read_text())


def parse_group_text(text: str) -> GroupTable:
    """Parse the line-oriented group format (``group <name> <order>`` + ``table``/``perm``)."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise DescriptorError("empty group file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "group":
        raise DescriptorError("first line must be 'group <name> <order>'")
    name, order = head[1], int(head[2])
    mode = lines[1] if len(lines) > 1 else ""
    body = lines[2:]
    if mode == "table":
        rows = [[int(t) for t in ln.split()] for ln in body]
        if len(rows) != order or any(len(r) != order for r in rows):
            raise DescriptorError(f"table must have {order} rows of {order} ids")
        return from_table(rows, name=name)
    if mode == "perm":
        g = permutation_group(body, name=name)
        if g.order != order:
            raise DescriptorError(f"generators close to order {g.order}, header says {order}")
        return g
    raise DescriptorError("second line must be 'table' or 'perm'")


def format_group_table(g: GroupTable) -> str:
    lines = [f"group {g.name.replace(' ', '')} {g.order}", "table"]
    lines += [" ".join(str(int(v)) for v in row) for row in g.mul]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# set algebra
# ---------------------------------------------------------------------------

def _same_group(*sets: Subset) -> GroupTable:
    g = sets[0].group
    for s in sets[1:]:
        sets[0]._check(s)
    return g


def product_set(A: Subset, B: Subset) -> Subset:
    """{ab : a in A, b in B}."""
    g = _same_group(A, B)
    out = np.zeros(g.order, dtype=bool)
    if A.card and B.card:
        out[g.mul[np.ix_(A.ids, B.ids)].ravel()] = True
    return Subset(g, out)


def product_of(*sets: Subset) -> Subset:
    out = sets[0]
    for s in sets[1:]:
        out = product_set(out, s)
    return out


def power_set_k(A: Subset, k: int) -> Subset:
    """A^k, the k-fold product set."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if A.is_empty():
        return A
    g = A.group
    if g.id_elem in A:
        # A^m is increasing and constant once it stops growing
        cur = A
        for _ in range(k - 1):
            nxt = product_set(cur, A)
            if nxt == cur:
                break
            cur = nxt
        return cur
    result, base, e = None, A, k
    while e:
        if e & 1:
            result = base if result is None else product_set(result, base)
        e >>= 1
        if e:
            base = product_set(base, base)
    return result


def inverse_set(A: Subset) -> Subset:
    g = A.group
    out = np.zeros(g.order, dtype=bool)
    out[g.inv[A.ids]] = True
    return Subset(g, out)


def conjugate_set(g_elem: int, A: Subset) -> Subset:
    """g A g^-1."""
    g = A.group
    out = np.zeros(g.order, dtype=bool)
    out[g.mul[g.mul[g_elem, A.ids], g.inv[g_elem]]] = True
    return Subset(g, out)


def left_translate(x: int, A: Subset) -> Subset:
    g = A.group
    out = np.zeros(g.order, dtype=bool)
    out[g.mul[x, A.ids]] = True
    return Subset(g, out)


def right_translate(A: Subset, x: int) -> Subset:
    g = A.group
    out = np.zeros(g.order, dtype=bool)
    out[g.mul[A.ids, x]] = True
    return Subset(g, out)


def two_sided(x: int, A: Subset, y: int) -> Subset:
    """x A y."""
    return right_translate(left_translate(x, A), y)


def is_symmetric_neighbourhood(A: Subset) -> bool:
    return A.group.id_elem in A and inverse_set(A) == A


def is_symmetric(A: Subset) -> bool:
    return inverse_set(A) == A


def has_distinct_squares(A: Subset) -> bool:
    sq = A.group.sq[A.ids]
    return len(np.unique(sq)) == A.card


def square_image(A: Subset) -> Subset:
    g = A.group
    out = np.zeros(g.order, dtype=bool)
    out[g.sq[A.ids]] = True
    return Subset(g, out)


def is_subgroup(H: Subset) -> bool:
    return (H.group.id_elem in H and product_set(H, H) == H and inverse_set(H) == H)


def generated_subgroup(A: Subset) -> Subset:
    g = A.group
    cur = A | g.identity_set() | inverse_set(A)
    return power_set_k(cur, g.order)


def parse_subset(group: GroupTable, text: str) -> Subset:
    """Parse ``"<order>:<hex>"``, a comma list of ids like ``"0,1,3"``, ``"all"`` or ``"empty"``."""
    text = text.strip()
    if text in ("all", "G"):
        return group.full()
    if text in ("empty", "{}", ""):
        return group.empty()
    if ":" in text:
        return Subset.from_hex(group, text)
    items = [t for t in re.split(r"[,\s{}\[\]]+", text) if t]
    try:
        ids = [int(t) for t in items]
    except ValueError:
        raise DescriptorError(f"cannot parse subset {text!r}") from None
    if any(not 0 <= i < group.order for i in ids):
        raise DescriptorError(f"subset {text!r} has ids outside 0..{group.order - 1}")
    return group.subset(ids)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

CATALOG: dict[str, str] = {
    **{f"C{n}": f"cyclic({n})" for n in range(1, 25)},
    "C2xC2": "cyclic(2) x cyclic(2)",
    "C2xC4": "cyclic(2) x cyclic(4)",
    "C2^3": "cyclic(2) x cyclic(2) x cyclic(2)",
    "C3xC3": "cyclic(3) x cyclic(3)",
    "C2xC6": "cyclic(2) x cyclic(6)",
    "S3": "dihedral(3)",
    "D4": "dihedral(4)",
    "Q8": "quaternion8",
    "D5": "dihedral(5)",
    "D6": "dihedral(6)",
    "C2xS3": "cyclic(2) x dihedral(3)",
    "D7": "dihedral(7)",
    "D8": "dihedral(8)",
    "Q8xC2": "quaternion8 x cyclic(2)",
    "D9": "dihedral(9)",
    "C3xS3": "cyclic(3) x dihedral(3)",
    "D10": "dihedral(10)",
    "A4": "perm_a4",
    "S4": "symmetric(4)",
    "D12": "dihedral(12)",
    "C31": "cyclic(31)",
    "C32": "cyclic(32)",
    "D16": "dihedral(16)",
    "C64": "cyclic(64)",
    "C3xD8": "cyclic(3) x dihedral(8)",
    "S5": "symmetric(5)",
}

_SPECIAL = {
    "perm_a4": lambda: alternating4(),
}

_CACHE: dict[str, GroupTable] = {}


def catalog_group(name: str) -> GroupTable:
    if name not in _CACHE:
        desc = CATALOG[name]
        _CACHE[name] = _SPECIAL[desc]() if desc in _SPECIAL else load_group(desc)
    return _CACHE[name]


def resolve_group(text: str) -> GroupTable:
    """Catalog name or descriptor."""
    if text in CATALOG:
        return catalog_group(text)
    return load_group(text)


def catalog(max_order: int | None = None, abelian: bool | None = None) -> list[tuple[str, GroupTable]]:
    out = []
    for name in CATALOG:
        g = catalog_group(name)
        if max_order is not None and g.order > max_order:
            continue
        if abelian is not None and g.abelian != abelian:
            continue
        out.append((name, g))
    return out



# ---------------------------------------------------------------------------
# random sets for experiments and tests
# ---------------------------------------------------------------------------

def random_symmetric_neighbourhood(group: GroupTable, density: float, rng: np.random.Generator) -> Subset:
    """Identity plus random inverse-closed pairs until the density is reached."""
    bits = np.zeros(group.order, dtype=bool)
    bits[group.id_elem] = True
    for x in rng.permutation(group.order).tolist():
        if bits.sum() >= density * group.order:
            break
        bits[x] = bits[group.inv[x]] = True
    return Subset(group, bits)


def random_distinct_squares(group: GroupTable, size: int, rng: np.random.Generator) -> Subset:
    """A random set with distinct squares, greedily grown to at most ``size`` elements."""
    bits = np.zeros(group.order, dtype=bool)
    used = np.zeros(group.order, dtype=bool)
    n = 0
    for x in rng.permutation(group.order).tolist():
        if n >= size:
            break
        if not used[group.sq[x]]:
            used[group.sq[x]] = True
            bits[x] = True
            n += 1
    return Subset(group, bits)
