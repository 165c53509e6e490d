"""Real-valued functions on finite groups.

Conventions for a group G and functions f: G -> R:

* right translation  ``(s . f)(h) = f(h s)``
* left translation   ``(g * f)(h) = f(g⁻¹ h)``
* involution         ``f̌(g) = f(g⁻¹)``
* convolution        ``(a ∗ f)(z) = Σ_x a(x) f(x⁻¹ z)``
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import (
    GroupMismatch,
    NegativeEntry,
    NotUnitNorm,
    ParseError,
    UnsupportedExponent,
)
from .group_core import FiniteGroup, GeneratingSet

FLOAT_SUPPORT_EPSILON = 1e-14
UNIT_TOL = 1e-12
MAZUR_INPUT_TOL = 1e-9

_MOD = "group_functions"


def _err(cls, op, msg, **kw):
    return cls(msg, module=_MOD, operation=op, **kw)


@dataclass(frozen=True, eq=False)
class GroupVector:
    """Dense real vector indexed by group elements.

    ``nonneg`` and ``unit_l2`` are checked claims, not hints: construction
    fails if the values violate them.
    """

    group: FiniteGroup
    values: np.ndarray
    nonneg: bool = False
    unit_l2: bool = False
    support_epsilon: float = 0.0

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.shape != (self.group.order,):
            raise ValueError(f"expected {self.group.order} values, got shape {v.shape}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        if self.nonneg and np.any(v < 0):
            i = int(np.flatnonzero(v < 0)[0])
            raise _err(NegativeEntry, "GroupVector", f"entry {i} is negative ({v[i]!r})", index=i)
        if self.unit_l2:
            nrm = float(np.linalg.norm(v))
            if abs(nrm - 1.0) > UNIT_TOL:
                raise _err(NotUnitNorm, "GroupVector", f"l2 norm is {nrm!r}, not 1")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(np.abs(self.values) > self.support_epsilon)

    @property
    def support_card(self) -> int:
        return int(np.count_nonzero(np.abs(self.values) > self.support_epsilon))

    def with_values(self, values, *, nonneg=None, unit_l2=None, support_epsilon=None) -> "GroupVector":
        return GroupVector(
            self.group,
            values,
            self.nonneg if nonneg is None else nonneg,
            self.unit_l2 if unit_l2 is None else unit_l2,
            self.support_epsilon if support_epsilon is None else support_epsilon,
        )


def delta(G: FiniteGroup, g: int | None = None) -> GroupVector:
    """Point mass at ``g`` (the identity by default)."""
    v = np.zeros(G.order)
    v[G.identity if g is None else g] = 1.0
    return GroupVector(G, v, nonneg=True, unit_l2=True)


def indicator(G: FiniteGroup, A: Iterable[int], normalize: bool = True) -> GroupVector:
    """``χ_A``, divided by ``√#A`` when ``normalize``."""
    A = np.unique(np.fromiter((int(a) for a in A), dtype=np.int64))
    v = np.zeros(G.order)
    v[A] = 1.0 / math.sqrt(len(A)) if normalize else 1.0
    return GroupVector(G, v, nonneg=True, unit_l2=normalize and len(A) > 0)


def uniform(G: FiniteGroup) -> GroupVector:
    return indicator(G, range(G.order))


def _same_group(op: str, *vecs: GroupVector) -> None:
    g0 = vecs[0].group
    for v in vecs[1:]:
        if v.group is not g0:
            raise _err(GroupMismatch, op, "vectors live on different groups")


def lp_norm(f: GroupVector, p: int = 2) -> float:
    if p == 1:
        return float(np.abs(f.values).sum())
    if p == 2:
        return float(np.linalg.norm(f.values))
    raise _err(UnsupportedExponent, "lp_norm", f"p must be 1 or 2, got {p}")


def right_translate(f: GroupVector, s: int) -> GroupVector:
    """``out(h) = f(h s)``."""
    return f.with_values(f.values[f.group.right_mult(s)])


def left_translate(f: GroupVector, g: int) -> GroupVector:
    """``out(h) = f(g⁻¹ h)``."""
    G = f.group
    return f.with_values(f.values[G.left_mult(G.inverse[g])])


def involute(f: GroupVector) -> GroupVector:
    """``out(g) = f(g⁻¹)``."""
    return f.with_values(f.values[f.group.inverse])


def mazur_2_to_1(f: GroupVector) -> GroupVector:
    """Squares entries: unit nonnegative l2 vectors to unit nonnegative l1 vectors."""
    _mazur_check(f, 2, "mazur_2_to_1")
    return GroupVector(f.group, f.values**2, nonneg=True, support_epsilon=f.support_epsilon**2)


def mazur_1_to_2(f: GroupVector) -> GroupVector:
    """Square roots of entries: inverse of :func:`mazur_2_to_1`."""
    _mazur_check(f, 1, "mazur_1_to_2")
    return GroupVector(
        f.group, np.sqrt(f.values), nonneg=True, support_epsilon=math.sqrt(f.support_epsilon)
    )


def _mazur_check(f: GroupVector, p: int, op: str) -> None:
    if np.any(f.values < 0):
        raise _err(NegativeEntry, op, "input has a negative entry")
    nrm = lp_norm(f, p)
    if abs(nrm - 1.0) > MAZUR_INPUT_TOL:
        raise _err(NotUnitNorm, op, f"input l{p} norm is {nrm!r}, not 1")


def convolve(alpha: GroupVector, f: GroupVector) -> GroupVector:
    """``(alpha ∗ f)(z) = Σ_x alpha(x) f(x⁻¹ z)``, summed over the support of alpha."""
    _same_group("convolve", alpha, f)
    G = f.group
    out = np.zeros(G.order)
    fv = f.values
    for x in np.flatnonzero(alpha.values):
        out += alpha.values[x] * fv[G.left_mult(G.inverse[x])]
    return GroupVector(G, out, support_epsilon=FLOAT_SUPPORT_EPSILON)


def _generator_list(S: GeneratingSet, symmetric: bool) -> tuple[int, ...]:
    return S.symmetrized if symmetric else S.generators


def generator_displacements(f: GroupVector, S: GeneratingSet, p: int = 2, symmetric: bool = False) -> np.ndarray:
    """``‖f - s.f‖_p`` for each generator, in order."""
    if S.group is not f.group:
        raise _err(GroupMismatch, "displacement", "generating set and vector live on different groups")
    if p not in (1, 2):
        raise _err(UnsupportedExponent, "displacement", f"p must be 1 or 2, got {p}")
    v = f.values
    out = []
    for s in _generator_list(S, symmetric):
        diff = v - v[f.group.right_mult(s)]
        out.append(np.abs(diff).sum() if p == 1 else np.linalg.norm(diff))
    return np.asarray(out, dtype=np.float64)


def displacement(f: GroupVector, S: GeneratingSet, p: int = 2, symmetric: bool = False) -> float:
    """Max over generators ``s`` of ``‖f - s.f‖_p``.

    Uses the generators as listed; ``symmetric=True`` ranges over ``S ∪ S⁻¹``.
    """
    d = generator_displacements(f, S, p, symmetric)
    return float(d.max()) if len(d) else 0.0


def ball_displacement(f: GroupVector, S: GeneratingSet, R: int, p: int = 2) -> float:
    """Max of ``‖f - γ.f‖_p`` over all ``γ`` with word length at most R."""
    if S.group is not f.group:
        raise _err(GroupMismatch, "ball_displacement", "generating set and vector live on different groups")
    v = f.values
    best = 0.0
    for g in S.ball(R):
        diff = v - v[f.group.right_mult(g)]
        best = max(best, float(np.abs(diff).sum() if p == 1 else np.linalg.norm(diff)))
    return best


# CSV serialization


def write_vector(path, f: GroupVector, group_file: str = "") -> None:
    """Write ``index,value`` rows after a ``#`` header line naming group and flags.

    Values are written with ``repr`` so that reading back is bit-exact.
    """
    lines = [
        f"# group={group_file} order={f.group.order} nonneg={int(f.nonneg)} "
        f"unit_l2={int(f.unit_l2)} support_epsilon={f.support_epsilon!r}",
        "index,value",
    ]
    lines += [f"{i},{float(x)!r}" for i, x in enumerate(f.values)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_vector(path, G: FiniteGroup) -> GroupVector:
    """Read a vector written by :func:`write_vector`. Missing indices read as 0."""
    op = "read_vector"
    text = Path(path).read_text().splitlines()
    meta: dict[str, str] = {}
    values = np.zeros(G.order)
    body = False
    for lineno, line in enumerate(text, 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    meta[k] = v
            continue
        if not body and line.replace(" ", "") == "index,value":
            body = True
            continue
        try:
            i_s, x_s = line.split(",")
            i = int(i_s)
            x = float(x_s)
        except ValueError as exc:
            raise _err(ParseError, op, f"{path}:{lineno}: bad row {line!r}") from exc
        if not 0 <= i < G.order:
            raise _err(ParseError, op, f"{path}:{lineno}: index {i} outside 0..{G.order - 1}")
        values[i] = x
    if "order" in meta and int(meta["order"]) != G.order:
        raise _err(GroupMismatch, op, f"vector file is for order {meta['order']}, group has order {G.order}")
    return GroupVector(
        G,
        values,
        nonneg=meta.get("nonneg", "0") == "1",
        unit_l2=meta.get("unit_l2", "0") == "1",
        support_epsilon=float(meta.get("support_epsilon", "0.0")),
    )
