"""Higson-Roe maps, set-family certificates for Property A, and the
bounded-l1-but-not-localized counterexample on 2-generated quotient families.

A space is either a :class:`FiniteMetricSpace` (dense distances) or a
:class:`GeneratingSet`, which stands for its group with the word metric and
is handled without materializing the distance matrix.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .certificates import displacement_energy, displacement_form, optimal_hr_vector, support_radius
from .errors import (
    AllZero,
    AssertionFailed,
    DisjointSets,
    EigensolveFailure,
    EmptyFamilyMember,
    PreconditionViolated,
    SupportViolation,
)
from .group_core import FamilySpec, FiniteMetricSpace, GeneratingSet
from .group_functions import GroupVector, displacement, involute, left_translate, lp_norm

Space = Union[FiniteMetricSpace, GeneratingSet]

DENSE_SPECTRUM_MAX = 5000
_MOD = "property_a"


def _err(cls, op, msg, **kw):
    return cls(msg, module=_MOD, operation=op, **kw)


def space_size(X: Space) -> int:
    return X.group.order if isinstance(X, GeneratingSet) else X.size


def pairs_within(X: Space, R: int) -> np.ndarray:
    """Unordered pairs ``x < y`` with ``d(x, y) <= R``."""
    if isinstance(X, FiniteMetricSpace):
        return X.pairs_within(R)
    G = X.group
    steps = X.symmetrized if R == 1 else [g for g in X.ball(R) if g != G.identity]
    chunks = []
    xs = np.arange(G.order)
    for g in steps:
        ys = G.right_mult(g)
        keep = xs < ys
        chunks.append(np.stack([xs[keep], ys[keep]], axis=1))
    if not chunks:
        return np.zeros((0, 2), dtype=np.int64)
    return np.unique(np.concatenate(chunks), axis=0)


def distances_to(X: Space, x: int, points: np.ndarray) -> np.ndarray:
    """``d(x, z)`` for each z in ``points``."""
    if isinstance(X, FiniteMetricSpace):
        return X.dist[x, points].astype(np.int64)
    G = X.group
    return X.lengths[G.left_mult(G.inverse[x])[points]]


class HigsonRoeMap:
    """Assignment ``x ↦ ξ(x)`` of nonnegative vectors on the points of a space.

    ``xi`` is either an ``(n, n)`` array (row x is ξ(x)) or a callable
    returning the row for x.
    """

    def __init__(self, space: Space, xi: Union[np.ndarray, Callable[[int], np.ndarray]], D_bound: int,
                 support_epsilon: float = 0.0):
        self.space = space
        self.size = space_size(space)
        if callable(xi):
            self._rows = None
            self._fn = xi
        else:
            rows = np.asarray(xi, dtype=np.float64)
            if rows.shape != (self.size, self.size):
                raise ValueError(f"xi must be {self.size}x{self.size}, got {rows.shape}")
            self._rows = rows
            self._fn = None
        self.D_bound = int(D_bound)
        self.support_epsilon = support_epsilon

    def __call__(self, x: int) -> np.ndarray:
        if self._rows is not None:
            return self._rows[x]
        return np.asarray(self._fn(int(x)), dtype=np.float64)

    def rows(self):
        for x in range(self.size):
            yield x, self(x)


def constant_map(space: Space, point: int = 0) -> HigsonRoeMap:
    """``ξ(x) = δ_point`` for every x."""
    n = space_size(space)
    row = np.zeros(n)
    row[point] = 1.0
    row.flags.writeable = False
    return HigsonRoeMap(space, lambda x: row, D_bound=0)


def _variation_detail(xi: HigsonRoeMap, R: int) -> tuple[float, tuple[int, int] | None]:
    pairs = pairs_within(xi.space, R)
    if len(pairs) == 0:
        return 0.0, None
    best, where = -1.0, None
    if xi._rows is not None:
        diff = np.linalg.norm(xi._rows[pairs[:, 0]] - xi._rows[pairs[:, 1]], axis=1)
        k = int(np.argmax(diff))
        return float(diff[k]), (int(pairs[k, 0]), int(pairs[k, 1]))
    order = np.argsort(pairs[:, 0], kind="stable")
    pairs = pairs[order]
    cur_x, vx = -1, None
    for x, y in pairs:
        if x != cur_x:
            cur_x, vx = x, xi(x)
        d = float(np.linalg.norm(vx - xi(y)))
        if d > best:
            best, where = d, (int(x), int(y))
    return best, where


def variation(xi: HigsonRoeMap, R: int = 1) -> float:
    """Max of ``‖ξ(x) - ξ(y)‖₂`` over pairs with ``d(x, y) <= R``."""
    if R < 0:
        raise ValueError("R must be nonnegative")
    return _variation_detail(xi, R)[0]


def hr_to_higson_roe(f: GroupVector, S: GeneratingSet, D: int | None = None) -> HigsonRoeMap:
    """``ξ(x) = x * f̌``, i.e. ``ξ(x)(h) = f(h⁻¹ x)``.

    Right displacement of f becomes variation of ξ along Cayley edges, and
    ``supp ξ(x) = x · supp(f)⁻¹`` stays inside ``B(x, D)``.
    """
    op = "hr_to_higson_roe"
    G = S.group
    if f.group is not G:
        raise ValueError("vector and generating set live on different groups")
    if np.any(f.values < 0) or abs(lp_norm(f, 2) - 1.0) > 1e-12:
        raise _err(PreconditionViolated, op, "f must be a unit nonnegative l2 vector")
    D = support_radius(S, f.support) if D is None else int(D)
    fc = involute(f)
    xi = HigsonRoeMap(S, lambda x: left_translate(fc, x).values, D_bound=D,
                      support_epsilon=f.support_epsilon)
    supp_c = fc.support
    for x in range(G.order):
        pts = np.sort(G.left_mult(x)[supp_c])
        d = distances_to(S, x, pts)
        if d.max(initial=0) > D:
            z = int(pts[int(np.argmax(d))])
            raise _err(SupportViolation, op, f"supp xi({x}) contains {z} at distance {int(d.max())} > D = {D}",
                       point=x)
    var = variation(xi, 1)
    sym = displacement(f, S, symmetric=True)
    if abs(var - sym) > 1e-12:
        raise _err(AssertionFailed, op, f"variation {var!r} differs from symmetrized displacement {sym!r}")
    return xi


def check_property_a_certificate(xi: HigsonRoeMap, epsilon: float, R: int = 1, D: int | None = None,
                                 unit_tol: float = 1e-12) -> dict:
    """Variation ≤ ε over pairs within R, unit nonnegative rows, supports in ``B(x, D)``."""
    D = xi.D_bound if D is None else int(D)
    var, pair = _variation_detail(xi, R)
    worst_support = None
    failures = []
    for x, v in xi.rows():
        if np.any(v < 0):
            failures.append(f"xi({x}) has a negative entry")
            break
        nrm = float(np.linalg.norm(v))
        if abs(nrm - 1.0) > unit_tol:
            failures.append(f"xi({x}) has l2 norm {nrm!r}")
            break
        pts = np.flatnonzero(v > xi.support_epsilon)
        d = distances_to(xi.space, x, pts)
        if len(d):
            k = int(np.argmax(d))
            if worst_support is None or d[k] > worst_support["distance"]:
                worst_support = {"point": x, "support_point": int(pts[k]), "distance": int(d[k])}
    if var > epsilon:
        failures.append(f"variation {var!r} > epsilon {epsilon!r} at pair {pair}")
    if worst_support is not None and worst_support["distance"] > D:
        failures.append(f"support of xi({worst_support['point']}) reaches distance {worst_support['distance']} > D = {D}")
    return {
        "epsilon": epsilon, "R": R, "D": D,
        "variation": var,
        "worst_pair": list(pair) if pair else None,
        "worst_support": worst_support,
        "pass": not failures,
        "failures": failures,
    }


def l2_to_l1_map(xi: HigsonRoeMap) -> HigsonRoeMap:
    """Apply the squaring Mazur map to every ξ(x); supports are unchanged."""
    return HigsonRoeMap(xi.space, lambda x: xi(x) ** 2, D_bound=xi.D_bound,
                        support_epsilon=xi.support_epsilon**2)


@dataclass(frozen=True, eq=False)
class SetFamilyCertificate:
    """``A_x ⊆ X × N`` stored as multiplicities: ``counts[x, z]`` copies of z."""

    space: Space
    counts: np.ndarray
    S_bound: int

    def __post_init__(self):
        c = np.asarray(self.counts)
        if not np.issubdtype(c.dtype, np.integer):
            raise ValueError("multiplicities must be integers")
        if np.any(c < 0):
            raise ValueError("multiplicities must be nonnegative")
        object.__setattr__(self, "counts", c.astype(np.int64))


def multiset_ratio(a: np.ndarray, b: np.ndarray) -> tuple[int, int]:
    """(#(A Δ B), #(A ∩ B)) for multisets given as count vectors."""
    return int(np.abs(a - b).sum()), int(np.minimum(a, b).sum())


def check_setfamily_certificate(cert: SetFamilyCertificate, epsilon: float, R: int = 1, S: int | None = None) -> dict:
    """Exact ``#(A_x Δ A_y) / #(A_x ∩ A_y) <= ε`` for ``d(x, y) <= R`` and ``A_x ⊆ B(x, S) × N``."""
    op = "check_setfamily_certificate"
    S = cert.S_bound if S is None else int(S)
    C = cert.counts
    empty = np.flatnonzero(C.sum(axis=1) == 0)
    if len(empty):
        raise _err(EmptyFamilyMember, op, f"A_{int(empty[0])} is empty")
    worst: tuple[Fraction, tuple[int, int]] | None = None
    for x, y in pairs_within(cert.space, R):
        delta, inter = multiset_ratio(C[x], C[y])
        if inter == 0:
            raise _err(DisjointSets, op, f"A_{int(x)} and A_{int(y)} are disjoint", pair=(int(x), int(y)))
        r = Fraction(delta, inter)
        if worst is None or r > worst[0]:
            worst = (r, (int(x), int(y)))
    worst_support = 0
    for x in range(C.shape[0]):
        pts = np.flatnonzero(C[x])
        worst_support = max(worst_support, int(distances_to(cert.space, x, pts).max()))
    ratio = worst[0] if worst else Fraction(0)
    return {
        "epsilon": epsilon, "R": R, "S": S,
        "worst_ratio": float(ratio),
        "worst_ratio_exact": f"{ratio.numerator}/{ratio.denominator}",
        "worst_pair": list(worst[1]) if worst else None,
        "support_radius": worst_support,
        "pass": float(ratio) <= epsilon and worst_support <= S,
    }


def l1_to_setfamily(xi_l1: HigsonRoeMap, Q: int) -> SetFamilyCertificate:
    """Quantize: ``A_x`` holds ``round(Q · ξ(x)(h))`` copies of h (halves round up)."""
    if Q < 1:
        raise _err(PreconditionViolated, "l1_to_setfamily", f"Q must be a positive integer, got {Q}")
    n = xi_l1.size
    counts = np.zeros((n, n), dtype=np.int64)
    for x, v in xi_l1.rows():
        counts[x] = np.floor(Q * v + 0.5).astype(np.int64)
        if not counts[x].any():
            raise _err(AllZero, "l1_to_setfamily", f"rounding at Q = {Q} empties A_{x}", point=x)
    radius = 0
    for x in range(n):
        pts = np.flatnonzero(counts[x])
        radius = max(radius, int(distances_to(xi_l1.space, x, pts).max()))
    return SetFamilyCertificate(xi_l1.space, counts, radius)


def l1_variation_ratio(xi_l1: HigsonRoeMap, R: int = 1) -> float:
    """Max over pairs within R of ``Σ|ξx - ξy| / Σ min(ξx, ξy)``: the Q → ∞ limit of the quantized ratio."""
    best = 0.0
    for x, y in pairs_within(xi_l1.space, R):
        a, b = xi_l1(x), xi_l1(y)
        best = max(best, float(np.abs(a - b).sum() / np.minimum(a, b).sum()))
    return best


# counterexample


def spectral_gap(S: GeneratingSet) -> float:
    """Second-smallest eigenvalue of ``Σ_s (I - R_s)ᵀ(I - R_s)`` on the whole group."""
    G = S.group
    n = G.order
    if n == 1:
        return 0.0
    if n <= DENSE_SPECTRUM_MAX:
        L = displacement_form(S, range(n))
        w = scipy.linalg.eigh(L, eigvals_only=True, subset_by_index=[0, 1])
        return float(w[1])
    # deflate constants and take the top of c·I - L - c·J/n; its top eigenvalue is c - λ₁
    c = 4.0 * len(S.generators)
    nb = [G.right_mult(s) for s in S.generators]
    inv = [np.argsort(r) for r in nb]

    def mv(x):
        x = np.ravel(x)
        Lx = 2.0 * len(nb) * x
        for r, ri in zip(nb, inv):
            Lx -= x[r] + x[ri]
        return c * x - Lx - c * x.mean()

    op = scipy.sparse.linalg.LinearOperator((n, n), matvec=mv, dtype=np.float64)
    try:
        mu = scipy.sparse.linalg.eigsh(op, k=1, which="LA", tol=1e-12, return_eigenvectors=False)[0]
    except scipy.sparse.linalg.ArpackError as exc:
        raise _err(EigensolveFailure, "spectral_gap", str(exc)) from exc
    return float(c - mu)


@dataclass
class CounterexampleRow:
    member_index: int
    group_order: int
    trivial_variation: float
    trivial_l1: float
    epsilon_star: float
    spectral_lower_bound: float
    ball_fraction: float
    ball_size: int = 0
    generator_displacement: float = 0.0
    spectral_gap: float = 0.0
    bound_holds: bool = True

    CSV_COLUMNS = ("member_index", "group_order", "trivial_variation", "trivial_l1",
                   "epsilon_star", "spectral_lower_bound", "ball_fraction")

    def csv_row(self) -> list:
        return [getattr(self, c) for c in self.CSV_COLUMNS]


def _demo_member(args) -> CounterexampleRow:
    k, S, D_probe = args
    G = S.group
    triv = constant_map(S, G.identity)
    triv_var = variation(triv, 1)
    triv_l1 = float(np.abs(triv(G.identity)).sum())
    B = S.ball(D_probe)
    f, eps_max = optimal_hr_vector(G, S, B)
    energy = displacement_energy(f, S)
    lam1 = spectral_gap(S)
    frac = len(B) / G.order
    bound = lam1 * (1.0 - frac)
    return CounterexampleRow(
        member_index=k,
        group_order=G.order,
        trivial_variation=triv_var,
        trivial_l1=triv_l1,
        epsilon_star=math.sqrt(max(energy, 0.0)),
        spectral_lower_bound=bound,
        ball_fraction=frac,
        ball_size=len(B),
        generator_displacement=eps_max,
        spectral_gap=lam1,
        bound_holds=energy >= bound - 1e-9,
    )


def counterexample_demo(family: FamilySpec, D_probe: int = 3, workers: int = 1) -> dict:
    """Contrast the trivial Higson-Roe data ``ξ(g) = δ_e`` with the best localized HR vector.

    Per member: the constant map (variation 0, l1 norm 1 regardless of the
    group); ``epsilon_star``, the square root of the least value of
    ``Σ_s ‖f - s.f‖₂²`` over unit f supported in ``B(e, D_probe)``; and the
    lower bound ``λ₁ (1 - #B/#G)`` on ``epsilon_star²`` from the spectral gap.
    """
    op = "counterexample_demo"
    if len(family) == 0:
        raise _err(PreconditionViolated, op, "family is empty")
    counts = {len(S.generators) for _, S in family}
    if len(counts) != 1:
        raise _err(PreconditionViolated, op, f"members have differing generator counts {sorted(counts)}")
    jobs = [(k, S, int(D_probe)) for k, (_, S) in enumerate(family)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_demo_member, jobs))
    else:
        rows = [_demo_member(j) for j in jobs]
    smallest = min(rows, key=lambda r: (r.group_order, r.member_index))
    ref = smallest.epsilon_star
    ratios = [r.epsilon_star / ref if ref > 0 else math.inf for r in rows]
    return {
        "D_probe": int(D_probe),
        "rows": rows,
        "trivial_maps_exact": all(r.trivial_variation == 0.0 and r.trivial_l1 == 1.0 for r in rows),
        "spectral_bound_holds": all(r.bound_holds for r in rows),
        "min_epsilon_star": min(r.epsilon_star for r in rows),
        "min_ratio_to_smallest": min(ratios),
    }
