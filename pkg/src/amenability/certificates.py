"""Følner and Hulanicki-Reiter certificates and the cut / compress / pack pipeline.

A Hulanicki-Reiter (HR) vector is a unit, nonnegative l2 function on a group
that moves little under right translation by each generator. The pipeline
turns a vector with bounded l1 norm into one with few support points
(:func:`compress_support`), and then into one supported in a ball of
controlled radius around the identity (:func:`pack_components`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import (
    AssertionFailed,
    BudgetExhausted,
    DegenerateInput,
    DisconnectedSupport,
    EigensolveFailure,
    EmptySet,
    FamilyMismatch,
    GeodesicNotFound,
    NoConvergence,
    PreconditionViolated,
    TargetOutOfRange,
)
from .group_core import INFINITE, FamilySpec, FiniteGroup, GeneratingSet
from .group_functions import (
    FLOAT_SUPPORT_EPSILON,
    GroupVector,
    displacement,
    generator_displacements,
    indicator,
    left_translate,
    lp_norm,
    uniform,
)

_MOD = "certificates"

CUT_TOL = 1e-10
CUT_MAX_ITER = 200
INPUT_TOL = 1e-12
EXHAUSTIVE_MAX_ORDER = 20
DENSE_EIG_MAX = 3000


def _err(cls, op, msg, **kw):
    return cls(msg, module=_MOD, operation=op, **kw)


def _indices(A: Iterable[int]) -> np.ndarray:
    return np.unique(np.fromiter((int(a) for a in A), dtype=np.int64))


def support_radius(S: GeneratingSet, points: Iterable[int]) -> int:
    """Smallest D with ``points ⊆ B(e, D)``."""
    pts = _indices(points)
    return int(S.lengths[pts].max()) if len(pts) else 0


# Følner sets


@dataclass(frozen=True, eq=False)
class FolnerCertificate:
    genset: GeneratingSet
    F: np.ndarray
    R: int
    ratio_exact: Fraction
    D_bound: int

    @property
    def group(self) -> FiniteGroup:
        return self.genset.group

    @property
    def ratio(self) -> float:
        return float(self.ratio_exact)

    def to_dict(self) -> dict:
        return {
            "group_order": self.group.order,
            "R": self.R,
            "size": int(len(self.F)),
            "boundary": self.ratio_exact.numerator * len(self.F) // self.ratio_exact.denominator,
            "ratio": self.ratio,
            "ratio_exact": f"{self.ratio_exact.numerator}/{self.ratio_exact.denominator}",
            "D_bound": self.D_bound,
            "F": [int(x) for x in self.F],
        }


def folner_ratio_exact(G: FiniteGroup, S: GeneratingSet, F: Iterable[int], R: int) -> Fraction:
    """``#∂_R F / #F`` as an exact fraction."""
    F = _indices(F)
    if len(F) == 0:
        raise _err(EmptySet, "folner_ratio", "F must be nonempty")
    boundary = S.r_boundary(F, R)
    return Fraction(len(boundary), len(F))


def folner_ratio(G: FiniteGroup, S: GeneratingSet, F: Iterable[int], R: int) -> float:
    return float(folner_ratio_exact(G, S, F, R))


def _folner_cert(S: GeneratingSet, F, R, ratio: Fraction) -> FolnerCertificate:
    F = _indices(F)
    return FolnerCertificate(S, F, int(R), ratio, support_radius(S, F))


def exhaustive_folner(S: GeneratingSet, R: int, allowed: Iterable[int] | None = None) -> tuple[np.ndarray, Fraction]:
    """Minimal Følner ratio over all nonempty subsets (of ``allowed``), by brute force.

    Only for groups of order at most 20. Ties go to the smaller set, then the
    smaller bitmask.
    """
    G = S.group
    n = G.order
    if n > EXHAUSTIVE_MAX_ORDER:
        raise ValueError(f"exhaustive search limited to order <= {EXHAUSTIVE_MAX_ORDER}")
    pts = np.arange(n) if allowed is None else _indices(allowed)
    m = len(pts)
    nbhd = np.zeros(m, dtype=np.int64)
    for i, x in enumerate(pts):
        near = np.flatnonzero(S.distances_from([x]) <= R)
        nbhd[i] = sum(1 << int(y) for y in near)
    # cover[mask] = union of R-neighbourhoods of the points in mask (as element bitmask)
    cover = np.zeros(1 << m, dtype=np.int64)
    elem = np.zeros(1 << m, dtype=np.int64)
    for i in range(m):
        lo, hi = 1 << i, 1 << (i + 1)
        cover[lo:hi] = cover[:lo] | nbhd[i]
        elem[lo:hi] = elem[:lo] | (1 << int(pts[i]))
    size = np.bitwise_count(elem[1:]).astype(np.int64)
    bnd = np.bitwise_count(cover[1:] & ~elem[1:]).astype(np.int64)
    # minimize bnd/size exactly: compare by cross-multiplication via lexsort on a float key
    # then confirm ties exactly
    key = bnd / size
    best = float(key.min())
    cand = np.flatnonzero(np.isclose(key, best, rtol=0, atol=1e-12))
    best_frac, best_idx = None, None
    for c in cand:
        fr = Fraction(int(bnd[c]), int(size[c]))
        tie_key = (fr, int(size[c]), int(c))
        if best_frac is None or tie_key < best_frac:
            best_frac, best_idx = tie_key, int(c)
    mask = best_idx + 1
    F = pts[[i for i in range(m) if mask >> i & 1]]
    return F, best_frac[0]


def search_folner_set(
    G: FiniteGroup,
    S: GeneratingSet,
    R: int,
    epsilon: float,
    budget: int = 10_000,
    max_radius: int | None = None,
) -> FolnerCertificate:
    """Find a set with ``#∂_R F / #F <= epsilon`` inside ``B(e, max_radius)``.

    Tries balls around the identity by growing radius, then greedy local moves
    from the best ball, then (order <= 20 only) exhaustive enumeration.
    ``budget`` bounds the number of ratio evaluations in the first two phases.
    """
    op = "search_folner_set"
    if epsilon <= 0:
        raise _err(PreconditionViolated, op, f"epsilon must be positive, got {epsilon}")
    # exact ratios are rounded to the nearest double before comparing with the float target
    target = float(epsilon)
    cap = S.diameter if max_radius is None else min(int(max_radius), S.diameter)
    allowed = np.zeros(G.order, dtype=bool)
    allowed[S.ball(cap)] = True
    spent = 0
    best: tuple[Fraction, np.ndarray] | None = None

    def evaluate(F: np.ndarray) -> Fraction:
        nonlocal spent, best
        if spent >= budget:
            raise _err(
                BudgetExhausted, op,
                f"budget of {budget} evaluations exhausted; best ratio {float(best[0]):.6g}",
                best_ratio=float(best[0]), best_set=best[1],
            )
        spent += 1
        r = folner_ratio_exact(G, S, F, R)
        if best is None or r < best[0]:
            best = (r, F)
        return r

    for D in range(cap + 1):
        F = S.ball(D)
        r = evaluate(F)
        if float(r) <= target:
            return _folner_cert(S, F, R, r)

    # greedy local improvement from the best ball
    current = best[1].copy()
    cur_r = best[0]
    while True:
        members = np.zeros(G.order, dtype=bool)
        members[current] = True
        moves = [np.append(current, b) for b in S.r_boundary(current, R) if allowed[b]]
        if len(current) > 1:
            moves += [current[current != x] for x in current]
        step = None
        for F in moves:
            F = np.sort(F)
            r = evaluate(F)
            if float(r) <= target:
                return _folner_cert(S, F, R, r)
            if r < cur_r and (step is None or r < step[0]):
                step = (r, F)
        if step is None:
            break
        cur_r, current = step

    if G.order <= EXHAUSTIVE_MAX_ORDER:
        F, r = exhaustive_folner(S, R, np.flatnonzero(allowed))
        if float(r) <= target:
            return _folner_cert(S, F, R, r)
        if r < best[0]:
            best = (r, F)
    raise _err(
        BudgetExhausted, op,
        f"no set with ratio <= {epsilon} found; best ratio {float(best[0]):.6g}",
        best_ratio=float(best[0]), best_set=best[1],
    )


# Hulanicki-Reiter certificates


@dataclass(frozen=True, eq=False)
class HRCertificate:
    genset: GeneratingSet
    f: GroupVector
    epsilon: float
    support_card: int
    l1_norm: float
    D_bound: int
    extras: dict = field(default_factory=dict)

    def to_dict(self, member_index: int | None = None) -> dict:
        out = {} if member_index is None else {"member_index": member_index}
        out.update(
            epsilon=self.epsilon,
            support_card=self.support_card,
            l1_norm=self.l1_norm,
            D_bound=self.D_bound,
        )
        return out


def hr_certificate(f: GroupVector, S: GeneratingSet, **extras) -> HRCertificate:
    """Package ``f`` with its recomputed statistics."""
    return HRCertificate(
        genset=S,
        f=f,
        epsilon=displacement(f, S),
        support_card=f.support_card,
        l1_norm=lp_norm(f, 1),
        D_bound=support_radius(S, f.support),
        extras=extras,
    )


def folner_to_hr(S: GeneratingSet, F: Iterable[int]) -> HRCertificate:
    """``f = χ_F / √#F``; its displacement is ``max_s √(#(F Δ F s⁻¹) / #F)``."""
    F = _indices(F)
    if len(F) == 0:
        raise _err(EmptySet, "folner_to_hr", "F must be nonempty")
    G = S.group
    f = indicator(G, F)
    inF = np.zeros(G.order, dtype=bool)
    inF[F] = True
    sym_counts = []
    for s in S.generators:
        shifted = inF[G.right_mult(s)]  # indicator of F s⁻¹
        sym_counts.append(int(np.count_nonzero(shifted != inF)))
    exact = max((math.sqrt(c / len(F)) for c in sym_counts), default=0.0)
    return hr_certificate(f, S, symmetric_difference_counts=sym_counts, epsilon_exact=exact)


def hr_to_folner(f: GroupVector, S: GeneratingSet, R: int) -> FolnerCertificate:
    """Best R-boundary ratio among the level sets ``{f² >= v}`` over the
    distinct positive values v of ``f²`` (largest set first on ties)."""
    op = "hr_to_folner"
    sq = f.values**2
    supp = f.support
    if len(supp) == 0:
        raise _err(DegenerateInput, op, "f has empty support")
    levels = np.unique(sq[supp])  # ascending: sets shrink
    best = None
    for v in levels:
        F = np.flatnonzero((sq >= v) & (np.abs(f.values) > f.support_epsilon))
        r = folner_ratio_exact(S.group, S, F, R)
        if best is None or r < best[0]:
            best = (r, F)
    return _folner_cert(S, best[1], R, best[0])


def displacement_form(S: GeneratingSet, support: Iterable[int]) -> np.ndarray:
    """Principal submatrix on ``support`` of ``Σ_s (I - R_s)ᵀ(I - R_s)``,
    where ``(R_s f)(h) = f(h s)`` and s runs over the listed generators."""
    A = _indices(support)
    G = S.group
    m = len(A)
    pos = np.full(G.order, -1, dtype=np.int64)
    pos[A] = np.arange(m)
    L = np.eye(m) * (2.0 * len(S.generators))
    for s in S.generators:
        img = pos[G.right_mult(s)[A]]
        i = np.flatnonzero(img >= 0)
        np.subtract.at(L, (i, img[i]), 1.0)
        np.subtract.at(L, (img[i], i), 1.0)
    return L


def displacement_energy(f: GroupVector, S: GeneratingSet) -> float:
    """``Σ_s ‖f - s.f‖₂²`` over the listed generators."""
    return float(np.sum(generator_displacements(f, S) ** 2))


def optimal_hr_vector(G: FiniteGroup, S: GeneratingSet, support: Iterable[int]) -> tuple[GroupVector, float]:
    """Unit vector on ``support`` minimizing ``Σ_s ‖f - s.f‖₂²``.

    The minimizer is the bottom eigenvector of :func:`displacement_form`.
    Returns the vector and its displacement ``max_s ‖f - s.f‖₂``.
    """
    op = "optimal_hr_vector"
    A = _indices(support)
    if len(A) == 0:
        raise _err(EmptySet, op, "support must be nonempty")
    comps = S.components(A, 1)
    if len(comps) > 1:
        raise _err(
            DisconnectedSupport, op,
            f"support splits into {len(comps)} components; optimize each separately",
        )
    L = displacement_form(S, A)
    try:
        if len(A) <= DENSE_EIG_MAX:
            w, V = scipy.linalg.eigh(L, subset_by_index=[0, 0])
        else:
            w, V = scipy.sparse.linalg.eigsh(scipy.sparse.csr_matrix(L), k=1, which="SA")
    except (np.linalg.LinAlgError, scipy.sparse.linalg.ArpackError) as exc:
        raise _err(EigensolveFailure, op, f"eigensolve failed: {exc}") from exc
    v = V[:, 0]
    if v.sum() < 0:
        v = -v
    if v.min() < -1e-12:
        raise _err(
            EigensolveFailure, op,
            f"bottom eigenvector not sign-definite (min entry {v.min():.3e}); Perron-Frobenius violated",
        )
    v = np.clip(v, 0.0, None)
    v /= np.linalg.norm(v)
    values = np.zeros(G.order)
    values[A] = v
    f = GroupVector(G, values, nonneg=True, unit_l2=True, support_epsilon=FLOAT_SUPPORT_EPSILON)
    return f, displacement(f, S)


# cut / compress / pack


def cut_function(f: GroupVector, c: float) -> GroupVector:
    """Pointwise ``min(f, c)``."""
    if c < 0:
        raise ValueError("cut level must be nonnegative")
    return f.with_values(np.minimum(f.values, c), unit_l2=False)


def find_cut_level(f: GroupVector, epsilon: float, trace: list | None = None) -> float:
    """Level c with ``‖min(f, c)‖₂`` within 1e-10 of ``epsilon``.

    Bisection on ``[0, max f]``; the returned c is the upper end of the final
    bracket, so ``‖min(f, c)‖₂ >= epsilon``. ``trace`` (if given) receives
    every ``(c, ‖min(f, c)‖₂)`` evaluated.
    """
    op = "find_cut_level"
    v = f.values
    if np.any(v < 0):
        raise _err(PreconditionViolated, op, "f must be nonnegative")
    total = float(np.linalg.norm(v))
    if epsilon < 0 or epsilon > total + INPUT_TOL:
        raise _err(TargetOutOfRange, op, f"target {epsilon!r} outside [0, ‖f‖₂ = {total!r}]")
    if epsilon == 0:
        return 0.0
    hi = float(v.max())
    if total - epsilon <= CUT_TOL:
        return hi
    lo = 0.0
    for _ in range(CUT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        val = float(np.linalg.norm(np.minimum(v, mid)))
        if trace is not None:
            trace.append((mid, val))
        if val < epsilon:
            lo = mid
        else:
            hi = mid
            if val - epsilon <= CUT_TOL:
                return hi
    raise _err(NoConvergence, op, f"bisection did not reach tolerance in {CUT_MAX_ITER} steps")


def _check_hr_input(op: str, f: GroupVector, S: GeneratingSet, epsilon: float) -> float:
    if np.any(f.values < 0):
        raise _err(PreconditionViolated, op, "input is not nonnegative")
    nrm = lp_norm(f, 2)
    if abs(nrm - 1.0) > INPUT_TOL:
        raise _err(PreconditionViolated, op, f"input l2 norm is {nrm!r}, not 1")
    disp = displacement(f, S)
    if disp > epsilon + INPUT_TOL:
        raise _err(PreconditionViolated, op, f"input displacement {disp!r} exceeds epsilon {epsilon!r}")
    return disp


def compress_support(f: GroupVector, S: GeneratingSet, epsilon: float, M: float) -> HRCertificate:
    """Trade a bound on ``‖f‖₁`` for a bound on the support size.

    With ``ê = ε/(2+2ε)`` the output ``h = (f - min(f, c)) / ‖f - min(f, c)‖₂``
    has at most ``M²/ê²`` support points and displacement at most ``2ε``.
    """
    op = "compress_support"
    if epsilon <= 0:
        raise _err(PreconditionViolated, op, f"epsilon must be positive, got {epsilon}")
    _check_hr_input(op, f, S, epsilon)
    l1 = lp_norm(f, 1)
    if l1 > M + INPUT_TOL:
        raise _err(PreconditionViolated, op, f"input l1 norm {l1!r} exceeds M = {M!r}")
    eps_hat = epsilon / (2 + 2 * epsilon)
    c = find_cut_level(f, eps_hat)
    g = cut_function(f, c)
    rest = f.values - g.values
    h = GroupVector(S.group, rest / np.linalg.norm(rest), nonneg=True, unit_l2=True,
                    support_epsilon=FLOAT_SUPPORT_EPSILON)
    cert = hr_certificate(h, S, eps_hat=eps_hat, cut_level=c, cut_norm=lp_norm(g, 2))
    support_bound = M**2 / eps_hat**2
    if cert.support_card > support_bound * (1 + 1e-12):
        raise _err(AssertionFailed, op, f"support size {cert.support_card} exceeds M²/ê² = {support_bound}")
    if cert.epsilon > 2 * epsilon + 1e-9:
        raise _err(AssertionFailed, op, f"displacement {cert.epsilon!r} exceeds 2ε = {2 * epsilon!r}")
    return cert


def pack_components(f: GroupVector, S: GeneratingSet, epsilon: float, N: int) -> HRCertificate:
    """Move the 2-connected pieces of ``supp f`` next to the identity.

    If the group's diameter is at most ``4(N+1)N`` the uniform vector is
    returned. Otherwise piece k is left-translated so its anchor lands on the
    k-th waypoint of a geodesic from the identity, with waypoints ``4(N+1)``
    apart. The result lies in ``B(e, 4(N+2)N)`` with the same l2 norm and no
    larger displacement.
    """
    op = "pack_components"
    G = S.group
    N = int(N)
    disp_in = _check_hr_input(op, f, S, epsilon)
    supp = f.support
    if len(supp) > N:
        raise _err(PreconditionViolated, op, f"support has {len(supp)} points, more than N = {N}")
    spacing = 4 * (N + 1)
    reach = spacing * N
    radius = 4 * (N + 2) * N

    if S.diameter <= reach:
        u = uniform(G)
        return hr_certificate(u, S, branch="uniform", input_displacement=disp_in)

    comps = S.components(supp, 2)
    anchors = [int(U[0]) for U in comps]
    for U, a in zip(comps, anchors):
        if S.distances_from([a])[U].max() > 2 * N:
            raise _err(AssertionFailed, op, f"component anchored at {a} not inside B(anchor, 2N)")

    dist, parent = S.bfs_parents(G.identity)
    far = np.flatnonzero(dist == reach)
    if len(far) == 0:
        raise _err(GeodesicNotFound, op, f"no element at distance exactly {reach} from the identity")
    beta = int(far[0])
    path = [beta]
    while path[-1] != G.identity:
        path.append(int(parent[path[-1]]))
    path.reverse()
    waypoints = [path[spacing * k] for k in range(len(comps))]
    gammas = [G.mul(w, G.inv(a)) for w, a in zip(waypoints, anchors)]

    values = np.zeros(G.order)
    moved = []
    for U, gam in zip(comps, gammas):
        piece = np.zeros(G.order)
        piece[U] = f.values[U]
        values += left_translate(f.with_values(piece, unit_l2=False), gam).values
        moved.append(np.sort(G.left_mult(gam)[U]))

    for k in range(len(moved)):
        dk = S.distances_from(moved[k])
        for l in range(k + 1, len(moved)):
            gap = int(dk[moved[l]].min())
            if gap < 3:
                raise _err(AssertionFailed, op, f"translated components {k} and {l} only {gap} apart (need >= 3)")

    g = GroupVector(G, values, nonneg=True, support_epsilon=f.support_epsilon)
    nrm = lp_norm(g, 2)
    if abs(nrm - 1.0) > 1e-12:
        raise _err(AssertionFailed, op, f"packed vector has l2 norm {nrm!r}")
    g = g.with_values(values, unit_l2=True)
    cert = hr_certificate(
        g, S, branch="packed", input_displacement=disp_in, anchors=anchors,
        waypoints=waypoints, translations=gammas, components=[U.tolist() for U in comps],
    )
    if cert.epsilon > disp_in + 1e-9:
        raise _err(AssertionFailed, op, f"displacement grew from {disp_in!r} to {cert.epsilon!r}")
    if cert.D_bound > radius:
        raise _err(AssertionFailed, op, f"support reaches word length {cert.D_bound} > 4(N+2)N = {radius}")
    return cert


@dataclass(frozen=True)
class QuantChain:
    """Parameters each stage of the pipeline may use, given (ε, M) at the start."""

    epsilon: float
    M: float

    @property
    def stage2_epsilon(self) -> float:
        return 2 * self.epsilon

    @property
    def stage2_N(self) -> float:
        return 4 * self.M**2 * (1 + self.epsilon) ** 2 / self.epsilon**2

    @property
    def stage3_epsilon(self) -> float:
        return self.stage2_epsilon

    @property
    def stage3_D(self) -> float:
        N = self.stage2_N
        return 4 * (N + 2) * N

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon, "M": self.M,
            "stage2_epsilon": self.stage2_epsilon, "stage2_N": self.stage2_N,
            "stage3_epsilon": self.stage3_epsilon, "stage3_D": self.stage3_D,
        }


def quantitative_chain(epsilon: float, M: float) -> QuantChain:
    if epsilon <= 0:
        raise _err(PreconditionViolated, "quantitative_chain", f"epsilon must be positive, got {epsilon}")
    if M < 1:
        raise _err(
            PreconditionViolated, "quantitative_chain",
            f"M = {M} < 1 is impossible: a unit l2 vector has l1 norm >= 1",
        )
    return QuantChain(float(epsilon), float(M))


def check_uniform_amenability_certificate(
    family: FamilySpec,
    certs: Sequence[HRCertificate],
    epsilon: float,
    D: int,
    tol: float = 1e-12,
) -> dict:
    """Recompute every member's statistics from its vector and compare with (ε, D)."""
    op = "check_uniform_amenability_certificate"
    if len(certs) != len(family):
        raise _err(FamilyMismatch, op, f"{len(certs)} certificates for {len(family)} members")
    rows = []
    for k, ((G, S), cert) in enumerate(zip(family, certs)):
        f = cert.f
        if f.group is not G:
            raise _err(FamilyMismatch, op, f"certificate {k} is for a different group than member {k}")
        failures = []
        nrm = lp_norm(f, 2)
        if abs(nrm - 1.0) > tol:
            failures.append(f"l2 norm {nrm!r} != 1")
        if np.any(f.values < 0):
            failures.append(f"negative entry at index {int(np.flatnonzero(f.values < 0)[0])}")
        eps_k = displacement(f, S)
        if eps_k > epsilon + tol:
            failures.append(f"displacement {eps_k!r} > epsilon {epsilon!r}")
        d_k = support_radius(S, f.support)
        if d_k > D:
            failures.append(f"support radius {d_k} > D {D}")
        rows.append({
            "member_index": k,
            "epsilon": eps_k,
            "support_card": f.support_card,
            "l1_norm": lp_norm(f, 1),
            "D_bound": d_k,
            "pass": not failures,
            "failures": failures,
        })
    return {
        "epsilon": epsilon,
        "D": D,
        "pass": all(r["pass"] for r in rows),
        "worst_epsilon": max((r["epsilon"] for r in rows), default=0.0),
        "worst_D_bound": max((r["D_bound"] for r in rows), default=0),
        "members": rows,
    }


__all__ = [
    "INFINITE",
    "FolnerCertificate",
    "HRCertificate",
    "QuantChain",
    "check_uniform_amenability_certificate",
    "compress_support",
    "cut_function",
    "displacement_energy",
    "displacement_form",
    "exhaustive_folner",
    "find_cut_level",
    "folner_ratio",
    "folner_ratio_exact",
    "folner_to_hr",
    "hr_certificate",
    "hr_to_folner",
    "optimal_hr_vector",
    "pack_components",
    "quantitative_chain",
    "search_folner_set",
    "support_radius",
]
