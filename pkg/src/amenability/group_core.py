"""Finite groups, generating sets, word metrics and finite metric spaces.

Group elements are dense integer indices ``0..n-1``. A group is backed either
by a full multiplication table or, for groups closed from permutations, by the
array of permutations plus a lookup keyed on a base of points. Both backings
expose the same primitives: ``mul``, ``inv``, ``right_mult`` and
``left_mult``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    AxiomViolation,
    EmptySet,
    NotGenerated,
    OrderLimitExceeded,
    TriangleViolation,
)

INFINITE = int(np.iinfo(np.int32).max)
"""Distance sentinel for disconnected pairs. Never used in arithmetic."""

EXHAUSTIVE_CHECK_ORDER = 512
DEFAULT_CLOSURE_CAP = 200_000
TABLE_CAP = 5000

_MOD = "group_core"


def _err(cls, op, msg, **kw):
    return cls(msg, module=_MOD, operation=op, **kw)


class _PermLookup:
    """Maps permutations (rows) back to element indices.

    Rows are identified by their images on a base: a set of points whose images
    already separate all elements. Keys are packed into int64 where possible.
    """

    def __init__(self, perms: np.ndarray):
        n, d = perms.shape
        self.degree = d
        base: list[int] = []
        if n > 1:
            for col in range(d):
                base.append(col)
                if len(np.unique(perms[:, base], axis=0)) == n:
                    break
        self.base = np.asarray(base, dtype=np.int64)
        self._packed = d ** max(len(base), 1) < 2**62
        keys = self._keys(perms[:, self.base])
        if self._packed:
            self._order = np.argsort(keys, kind="stable")
            self._sorted = keys[self._order]
        else:
            self._table = {k: i for i, k in enumerate(keys)}

    def _keys(self, rows: np.ndarray):
        if self._packed:
            key = np.zeros(len(rows), dtype=np.int64)
            for j in range(rows.shape[1]):
                key = key * self.degree + rows[:, j].astype(np.int64)
            return key
        return [r.tobytes() for r in np.ascontiguousarray(rows, dtype=np.int64)]

    def lookup(self, base_images: np.ndarray) -> np.ndarray:
        keys = self._keys(base_images)
        if self._packed:
            pos = np.searchsorted(self._sorted, keys)
            return self._order[pos]
        return np.fromiter((self._table[k] for k in keys), dtype=np.int64, count=len(keys))


class FiniteGroup:
    """A finite group on the indices ``0..order-1``.

    Use :func:`build_group_from_table` or :func:`build_group_from_permutations`
    rather than calling the constructor directly; those verify the axioms.
    """

    def __init__(
        self,
        table: np.ndarray | None = None,
        *,
        perms: np.ndarray | None = None,
        identity: int | None = None,
        inverse: np.ndarray | None = None,
        name: str = "G",
    ):
        if (table is None) == (perms is None):
            raise ValueError("exactly one of table / perms is required")
        self.name = name
        self._table = None if table is None else np.ascontiguousarray(table, dtype=np.int32)
        self._perms = None if perms is None else np.ascontiguousarray(perms)
        self._lookup = None if perms is None else _PermLookup(self._perms)
        self.order = len(self._table) if table is not None else len(self._perms)
        self._right: dict[int, np.ndarray] = {}
        if identity is None:
            identity = self._find_identity()
        self.identity = int(identity)
        if inverse is None:
            inverse = self._find_inverses()
        self.inverse = np.asarray(inverse, dtype=np.int64)
        self.inverse.flags.writeable = False

    def __repr__(self) -> str:
        return f"FiniteGroup(name={self.name!r}, order={self.order})"

    def __len__(self) -> int:
        return self.order

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_right"] = {}
        return state

    @property
    def has_table(self) -> bool:
        return self._table is not None

    @property
    def perms(self) -> np.ndarray | None:
        return self._perms

    @property
    def table(self) -> np.ndarray:
        """Full multiplication table ``table[a, b] = a*b`` (materialized on demand)."""
        if self._table is None:
            if self.order > TABLE_CAP:
                raise MemoryError(f"refusing to materialize a {self.order}x{self.order} table")
            self._table = np.stack([self.left_mult(a) for a in range(self.order)]).astype(np.int32)
        return self._table

    def mul(self, a: int, b: int) -> int:
        if self._table is not None:
            return int(self._table[a, b])
        p = self._perms
        return int(self._lookup.lookup(p[a][p[b][self._lookup.base]][None, :])[0])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def right_mult(self, s: int) -> np.ndarray:
        """Array ``out[h] = h*s`` over all h."""
        s = int(s)
        cached = self._right.get(s)
        if cached is not None:
            return cached
        if self._table is not None:
            out = self._table[:, s].astype(np.int64)
        else:
            p, lk = self._perms, self._lookup
            out = lk.lookup(p[:, p[s][lk.base]])
        out.flags.writeable = False
        if len(self._right) < 64:
            self._right[s] = out
        return out

    def left_mult(self, g: int) -> np.ndarray:
        """Array ``out[h] = g*h`` over all h."""
        g = int(g)
        if self._table is not None:
            return self._table[g].astype(np.int64)
        p, lk = self._perms, self._lookup
        return lk.lookup(p[g][p[:, lk.base]])

    def _find_identity(self) -> int:
        n = self.order
        if self._perms is not None:
            ident = np.arange(self._perms.shape[1])
            hits = np.flatnonzero((self._perms == ident).all(axis=1))
            if len(hits) == 1:
                return int(hits[0])
            raise _err(AxiomViolation, "build_group", "no identity permutation among elements")
        t = self._table
        ar = np.arange(n)
        for e in range(n):
            if np.array_equal(t[e], ar) and np.array_equal(t[:, e], ar):
                return e
        raise _err(AxiomViolation, "build_group_from_table", "no two-sided identity element")

    def _find_inverses(self) -> np.ndarray:
        n = self.order
        if self._perms is not None:
            inv_perms = np.argsort(self._perms, axis=1)
            return self._lookup.lookup(inv_perms[:, self._lookup.base])
        t = self._table
        out = np.empty(n, dtype=np.int64)
        for a in range(n):
            right = np.flatnonzero(t[a] == self.identity)
            if len(right) != 1 or t[right[0], a] != self.identity:
                raise _err(
                    AxiomViolation, "build_group_from_table", f"element {a} has no two-sided inverse",
                    element=a,
                )
            out[a] = right[0]
        return out


def _check_associativity(G: FiniteGroup, op: str, samples: int = 200_000, seed: int = 0) -> None:
    n = G.order
    if G.has_table and n <= EXHAUSTIVE_CHECK_ORDER:
        t = G.table.astype(np.int64)
        for a in range(n):
            lhs = t[t[a]]  # lhs[b, c] = (ab)c
            rhs = t[a][t]  # rhs[b, c] = a(bc)
            bad = np.argwhere(lhs != rhs)
            if len(bad):
                b, c = (int(x) for x in bad[0])
                raise _err(
                    AxiomViolation, op, f"associativity fails on triple ({a}, {b}, {c})",
                    triple=(a, b, c),
                )
        return
    rng = np.random.default_rng(seed)
    trip = rng.integers(0, n, size=(samples, 3))
    for a, b, c in trip:
        if G.mul(G.mul(a, b), c) != G.mul(a, G.mul(b, c)):
            raise _err(
                AxiomViolation, op, f"associativity fails on triple ({a}, {b}, {c})",
                triple=(int(a), int(b), int(c)),
            )


def build_group_from_table(table, name: str = "G") -> FiniteGroup:
    """Build a group from an ``n x n`` multiplication table and verify the axioms."""
    op = "build_group_from_table"
    t = np.asarray(table)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise _err(AxiomViolation, op, f"table must be a nonempty square matrix, got shape {t.shape}")
    n = t.shape[0]
    if not np.issubdtype(t.dtype, np.integer):
        if not np.all(np.mod(t, 1) == 0):
            raise _err(AxiomViolation, op, "table entries must be integers")
        t = t.astype(np.int64)
    if t.min() < 0 or t.max() >= n:
        raise _err(AxiomViolation, op, f"table entries must lie in 0..{n - 1}")
    srt = np.arange(n)
    for a in range(n):
        if not np.array_equal(np.sort(t[a]), srt):
            raise _err(AxiomViolation, op, f"row {a} is not a permutation (left multiplication by {a} not bijective)", element=a)
        if not np.array_equal(np.sort(t[:, a]), srt):
            raise _err(AxiomViolation, op, f"column {a} is not a permutation (right multiplication by {a} not bijective)", element=a)
    G = FiniteGroup(t, name=name)
    _check_associativity(G, op)
    return G


def build_group_from_permutations(
    perms: Sequence[Sequence[int]],
    degree: int | None = None,
    cap: int = DEFAULT_CLOSURE_CAP,
    name: str = "G",
) -> tuple[FiniteGroup, "GeneratingSet"]:
    """Close the group generated by ``perms`` by breadth-first products.

    Products compose as functions, ``(a*b)(i) = a(b(i))``. The identity
    permutation is element 0. Identity generators are dropped.
    """
    op = "build_group_from_permutations"
    gens = [np.asarray(p, dtype=np.int64) for p in perms]
    if degree is None:
        degree = len(gens[0]) if gens else 0
    for k, p in enumerate(gens):
        if p.shape != (degree,) or not np.array_equal(np.sort(p), np.arange(degree)):
            raise _err(AxiomViolation, op, f"generator {k} is not a permutation of 0..{degree - 1}", element=k)
    dtype = np.int16 if degree < 2**15 else np.int32
    ident = np.arange(degree, dtype=dtype)
    elements = [ident]
    seen = {ident.tobytes(): 0}
    queue = deque([0])
    gens_t = [g.astype(dtype) for g in gens]
    while queue:
        x = elements[queue.popleft()]
        for g in gens_t:
            y = x[g]
            key = y.tobytes()
            if key not in seen:
                if len(elements) >= cap:
                    raise _err(OrderLimitExceeded, op, f"closure exceeds cap of {cap} elements", cap=cap)
                seen[key] = len(elements)
                elements.append(y)
                queue.append(seen[key])
    G = FiniteGroup(perms=np.stack(elements), identity=0, name=name)
    gen_idx = [seen[g.tobytes()] for g in gens_t]
    S = GeneratingSet(G, tuple(i for i in gen_idx if i != G.identity))
    if G.order > EXHAUSTIVE_CHECK_ORDER:
        _check_associativity(G, op, samples=2000)
    return G, S


@dataclass(frozen=True, eq=False)
class GeneratingSet:
    """Generators as listed plus cached Cayley-graph data over ``S ∪ S⁻¹``.

    Edges join ``h`` and ``h*s``; the resulting graph metric is the
    left-invariant word metric ``d(g, h) = |g⁻¹h|``.
    """

    group: FiniteGroup
    generators: tuple[int, ...]
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(int(s) for s in self.generators))
        if not self.check:
            return
        if self.group.identity in self.generators:
            raise _err(NotGenerated, "GeneratingSet", "identity must not be a generator")
        if any(not 0 <= s < self.group.order for s in self.generators):
            raise _err(NotGenerated, "GeneratingSet", "generator index out of range")
        if np.any(self.lengths == INFINITE):
            missing = int(np.flatnonzero(self.lengths == INFINITE)[0])
            raise _err(
                NotGenerated, "GeneratingSet",
                f"generators do not generate the group (element {missing} unreachable)",
            )

    def __len__(self) -> int:
        return len(self.generators)

    @cached_property
    def symmetrized(self) -> tuple[int, ...]:
        inv = self.group.inverse
        out: list[int] = []
        for s in self.generators:
            for t in (s, int(inv[s])):
                if t not in out:
                    out.append(t)
        return tuple(out)

    @cached_property
    def neighbors(self) -> np.ndarray:
        """``neighbors[h, j] = h * symmetrized[j]``."""
        if not self.symmetrized:
            return np.zeros((self.group.order, 0), dtype=np.int64)
        return np.stack([self.group.right_mult(s) for s in self.symmetrized], axis=1)

    def distances_from(self, sources: Iterable[int]) -> np.ndarray:
        """Multi-source BFS: distance of every element to the source set."""
        n = self.group.order
        dist = np.full(n, INFINITE, dtype=np.int64)
        frontier = np.unique(np.fromiter((int(s) for s in sources), dtype=np.int64))
        if len(frontier) == 0:
            return dist
        dist[frontier] = 0
        nb = self.neighbors
        k = 0
        while len(frontier) and nb.shape[1]:
            cand = nb[frontier].ravel()
            cand = np.unique(cand[dist[cand] == INFINITE])
            k += 1
            dist[cand] = k
            frontier = cand
        return dist

    def bfs_parents(self, source: int) -> tuple[np.ndarray, np.ndarray]:
        """BFS from ``source`` returning (distance, parent) arrays."""
        n = self.group.order
        dist = np.full(n, INFINITE, dtype=np.int64)
        parent = np.full(n, -1, dtype=np.int64)
        dist[source] = 0
        frontier = np.array([source], dtype=np.int64)
        nb = self.neighbors
        k = 0
        while len(frontier) and nb.shape[1]:
            k += 1
            nxt = []
            for j in range(nb.shape[1]):
                cand = nb[frontier, j]
                fresh = dist[cand] == INFINITE
                c, src = cand[fresh], frontier[fresh]
                c, first = np.unique(c, return_index=True)
                dist[c] = k
                parent[c] = src[first]
                nxt.append(c)
            frontier = np.unique(np.concatenate(nxt)) if nxt else np.empty(0, np.int64)
        return dist, parent

    @cached_property
    def lengths(self) -> np.ndarray:
        """Word length of every element."""
        out = self.distances_from([self.group.identity])
        out.flags.writeable = False
        return out

    @cached_property
    def diameter(self) -> int:
        return int(self.lengths.max())

    def ball(self, R: int, center: int | None = None) -> np.ndarray:
        """Sorted indices of ``B(center, R)`` (center defaults to the identity)."""
        if center is None or center == self.group.identity:
            return np.flatnonzero(self.lengths <= R)
        return np.flatnonzero(self.distances_from([center]) <= R)

    def r_boundary(self, A: Iterable[int], R: int) -> np.ndarray:
        A = np.unique(np.fromiter((int(a) for a in A), dtype=np.int64))
        if len(A) == 0:
            raise _err(EmptySet, "r_boundary", "A must be nonempty")
        d = self.distances_from(A)
        return np.flatnonzero((d > 0) & (d <= R))

    def set_distance(self, A: Iterable[int], B: Iterable[int]) -> int:
        d = self.distances_from(A)
        B = np.fromiter((int(b) for b in B), dtype=np.int64)
        return int(d[B].min()) if len(B) else INFINITE

    def components(self, A: Iterable[int], R: int) -> list[np.ndarray]:
        """R-connected components of A under the word metric, sorted by minimal index."""
        A = np.unique(np.fromiter((int(a) for a in A), dtype=np.int64))
        if len(A) == 0:
            return []
        pos = {int(a): i for i, a in enumerate(A)}
        rows, cols = [], []
        for i, a in enumerate(A):
            if R < 1:
                near = ()
            elif R == 1:
                near = self.neighbors[a]
            else:
                near = np.flatnonzero(self.distances_from([a]) <= R)
            for b in near:
                j = pos.get(int(b))
                if j is not None:
                    rows.append(i)
                    cols.append(j)
        return _components_from_edges(A, rows, cols)


def _components_from_edges(points: np.ndarray, rows, cols) -> list[np.ndarray]:
    m = len(points)
    adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(m, m))
    _, labels = connected_components(adj, directed=False)
    comps = [np.sort(points[labels == lab]) for lab in np.unique(labels)]
    comps.sort(key=lambda c: int(c[0]))
    return comps


def word_length(G: FiniteGroup, S: GeneratingSet, g: int) -> int:
    """Minimal number of factors from ``S ∪ S⁻¹`` whose product is ``g``."""
    if S.group is not G:
        raise ValueError("generating set belongs to a different group")
    ell = int(S.lengths[g])
    if ell == INFINITE:
        raise _err(NotGenerated, "word_length", f"element {g} is not reachable from the generators")
    return ell


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Point set ``0..size-1`` with an integer distance matrix."""

    dist: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        d = np.array(self.dist, dtype=np.int64)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
            raise _err(TriangleViolation, "FiniteMetricSpace", f"distance matrix must be square and nonempty, got {d.shape}")
        d = d.astype(np.int32)
        d.flags.writeable = False
        object.__setattr__(self, "dist", d)
        if self.check:
            verify_metric(self)

    @property
    def size(self) -> int:
        return self.dist.shape[0]

    def __len__(self) -> int:
        return self.size

    @cached_property
    def diameter(self) -> int:
        """Largest finite distance."""
        d = self.dist
        return int(d[d != INFINITE].max())

    def pairs_within(self, R: int) -> np.ndarray:
        """All ordered pairs ``(x, y)``, ``x < y``, with ``d(x, y) <= R``."""
        x, y = np.nonzero(np.triu(self.dist <= R, k=1))
        return np.stack([x, y], axis=1)

    def ball(self, center: int, R: int) -> np.ndarray:
        return ball(self, center, R)


def verify_metric(X: FiniteMetricSpace, samples: int = 200_000, seed: int = 0) -> None:
    op = "verify_metric"
    d = X.dist.astype(np.int64)
    n = len(d)
    if np.any(np.diag(d) != 0):
        raise _err(TriangleViolation, op, "nonzero self-distance")
    if np.any(d < 0):
        raise _err(TriangleViolation, op, "negative distance")
    if not np.array_equal(d, d.T):
        i, j = (int(v) for v in np.argwhere(d != d.T)[0])
        raise _err(TriangleViolation, op, f"distance not symmetric at ({i}, {j})")
    fin = d != INFINITE
    if n <= EXHAUSTIVE_CHECK_ORDER:
        for k in range(n):
            via = np.where(fin[:, k, None] & fin[None, k, :], d[:, k, None] + d[None, k, :], INFINITE)
            bad = np.argwhere(d > via)
            if len(bad):
                i, j = (int(v) for v in bad[0])
                raise _err(TriangleViolation, op, f"triangle inequality fails on ({i}, {k}, {j})", triple=(i, k, j))
        return
    rng = np.random.default_rng(seed)
    i, k, j = rng.integers(0, n, size=(3, samples))
    ok = ~(fin[i, k] & fin[k, j]) | (d[i, j] <= d[i, k] + d[k, j])
    if not ok.all():
        t = int(np.flatnonzero(~ok)[0])
        raise _err(TriangleViolation, op, f"triangle inequality fails on ({i[t]}, {k[t]}, {j[t]})")


def word_metric(G: FiniteGroup, S: GeneratingSet) -> FiniteMetricSpace:
    """Dense word metric ``d(g, h) = |g⁻¹h|``."""
    ell = S.lengths
    if np.any(ell == INFINITE):
        raise _err(NotGenerated, "word_metric", "generators do not generate the group")
    n = G.order
    d = np.empty((n, n), dtype=np.int32)
    for g in range(n):
        d[g] = ell[G.left_mult(G.inverse[g])]
    if not np.array_equal(d, d.T):
        raise _err(TriangleViolation, "word_metric", "word metric came out asymmetric")
    return FiniteMetricSpace(d, check=n <= EXHAUSTIVE_CHECK_ORDER)


def ball(X: FiniteMetricSpace, center: int, R: float) -> np.ndarray:
    """Sorted indices of the closed ball ``B(center, R)``."""
    if R < 0:
        raise ValueError("R must be nonnegative")
    return np.flatnonzero(X.dist[center] <= R)


def _as_index_array(A) -> np.ndarray:
    return np.unique(np.fromiter((int(a) for a in A), dtype=np.int64))


def r_boundary(X: FiniteMetricSpace, A: Iterable[int], R: float) -> np.ndarray:
    """Points outside A within distance R of A."""
    A = _as_index_array(A)
    if len(A) == 0:
        raise _err(EmptySet, "r_boundary", "A must be nonempty")
    near = (X.dist[A] <= R).any(axis=0)
    near[A] = False
    return np.flatnonzero(near)


def r_connected_components(X: FiniteMetricSpace, A: Iterable[int], R: float) -> list[np.ndarray]:
    """Maximal R-connected subsets of A, ordered by their minimal point."""
    A = _as_index_array(A)
    if len(A) == 0:
        return []
    rows, cols = np.nonzero(X.dist[np.ix_(A, A)] <= R)
    return _components_from_edges(A, rows, cols)


def coarse_disjoint_union(spaces: Sequence[FiniteMetricSpace]) -> FiniteMetricSpace:
    """Blocks keep their metrics; blocks ``n != m`` (1-based) sit at distance
    exactly ``n + m + diam(X_n) + diam(X_m)``."""
    op = "coarse_disjoint_union"
    if not spaces:
        raise _err(EmptySet, op, "need at least one space")
    if len(spaces) == 1:
        return spaces[0]
    sizes = [X.size for X in spaces]
    offs = np.concatenate([[0], np.cumsum(sizes)])
    diams = [X.diameter for X in spaces]
    total = int(offs[-1])
    d = np.empty((total, total), dtype=np.int64)
    for i, j in itertools.product(range(len(spaces)), repeat=2):
        bi, bj = slice(offs[i], offs[i + 1]), slice(offs[j], offs[j + 1])
        if i == j:
            d[bi, bj] = spaces[i].dist
        else:
            d[bi, bj] = (i + 1) + (j + 1) + diams[i] + diams[j]
    try:
        return FiniteMetricSpace(d)
    except TriangleViolation as exc:
        raise _err(TriangleViolation, op, f"union failed metric verification: {exc.message}") from exc


@dataclass(frozen=True, eq=False)
class FamilySpec:
    """Ordered family of (group, generating set) pairs."""

    members: tuple[tuple[FiniteGroup, GeneratingSet], ...]

    def __post_init__(self):
        members = tuple((G, S) for G, S in self.members)
        for k, (G, S) in enumerate(members):
            if S.group is not G:
                raise ValueError(f"member {k}: generating set belongs to a different group")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, k):
        return self.members[k]

    @property
    def generator_bound(self) -> int:
        return max((len(S.generators) for _, S in self.members), default=0)


# Convenience constructors used by tests and example data.

def cyclic_group(n: int) -> tuple[FiniteGroup, GeneratingSet]:
    """``Z/n`` with generator 1, built from its addition table."""
    a = np.arange(n)
    G = build_group_from_table((a[:, None] + a[None, :]) % n, name=f"Z{n}")
    return G, GeneratingSet(G, (1,) if n > 1 else ())


def symmetric_group(k: int) -> tuple[FiniteGroup, GeneratingSet]:
    """Symmetric group on k letters generated by a transposition and a k-cycle."""
    if k < 2:
        return build_group_from_permutations([], degree=max(k, 0), name=f"S{k}")
    swap = list(range(k))
    swap[0], swap[1] = 1, 0
    cycle = [(i + 1) % k for i in range(k)]
    return build_group_from_permutations([swap, cycle], name=f"S{k}")


def direct_product(
    A: tuple[FiniteGroup, GeneratingSet], B: tuple[FiniteGroup, GeneratingSet]
) -> tuple[FiniteGroup, GeneratingSet]:
    """Direct product with element ``(a, b)`` at index ``a * |B| + b``."""
    (GA, SA), (GB, SB) = A, B
    ta, tb = GA.table.astype(np.int64), GB.table.astype(np.int64)
    na, nb = GA.order, GB.order
    a1, b1 = np.divmod(np.arange(na * nb), nb)
    t = ta[a1[:, None], a1[None, :]] * nb + tb[b1[:, None], b1[None, :]]
    G = build_group_from_table(t, name=f"{GA.name}x{GB.name}")
    gens = [s * nb + GB.identity for s in SA.generators] + [GA.identity * nb + s for s in SB.generators]
    return G, GeneratingSet(G, tuple(gens))


def dihedral_group(m: int) -> tuple[FiniteGroup, GeneratingSet]:
    """Dihedral group of order 2m acting on the m-gon (rotation and reflection)."""
    rot = [(i + 1) % m for i in range(m)]
    ref = [(-i) % m for i in range(m)]
    return build_group_from_permutations([rot, ref], name=f"D{m}")


def sl2_mod_p(p: int) -> tuple[FiniteGroup, GeneratingSet]:
    """``SL(2, p)`` generated by the images of ``[[1,2],[0,1]]`` and ``[[1,0],[2,1]]``.

    Those two matrices generate a free subgroup of ``SL(2, Z)``, so each
    ``SL(2, p)`` (p odd) is a 2-generated quotient of the free group. The group
    acts on the nonzero vectors of ``F_p^2``.
    """
    perms = sl2_permutations(p)
    return build_group_from_permutations(perms, name=f"SL2_{p}")


def sl2_permutations(p: int) -> list[list[int]]:
    vecs = [(x, y) for x in range(p) for y in range(p) if (x, y) != (0, 0)]
    index = {v: i for i, v in enumerate(vecs)}

    def act(m):
        (a, b), (c, d) = m
        return [index[((a * x + b * y) % p, (c * x + d * y) % p)] for x, y in vecs]

    return [act(((1, 2), (0, 1))), act(((1, 0), (2, 1)))]


def greedy_generators(G: FiniteGroup) -> tuple[int, ...]:
    """Deterministic generating set: add the smallest element not yet generated."""
    gens: list[int] = []
    reached = np.zeros(G.order, dtype=bool)
    reached[G.identity] = True
    while not reached.all():
        s = int(np.flatnonzero(~reached)[0])
        gens.append(s)
        S = GeneratingSet(G, tuple(gens), check=False)
        reached = S.lengths != INFINITE
    return tuple(gens)
