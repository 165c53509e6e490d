"""The kernel ``K_f(x, y) = <x*f, y*f>`` of left translates of f and its operator T_f.

T_f is realized twice: as a dense matrix-vector product with K_f, and as
``α ↦ (α ∗ f) ∗ f̌``. Its norm is compared against ``‖f‖₁²``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import EntryOutOfRange, GroupMismatch, NoConvergence, PreconditionViolated
from .group_core import FiniteGroup
from .group_functions import GroupVector, convolve, involute, lp_norm

DENSE_EIG_MAX = 5000
KERNEL_EXPORT_MAX = 200
POWER_TOL = 1e-10
POWER_MAX_ITER = 100_000
IDENTITY_RTOL = 1e-8

_MOD = "operators"


def _err(cls, op, msg, **kw):
    return cls(msg, module=_MOD, operation=op, **kw)


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    group: FiniteGroup
    entries: np.ndarray

    def min_eigenvalue(self) -> float:
        return float(scipy.linalg.eigh(self.entries, eigvals_only=True, subset_by_index=[0, 0])[0])


@dataclass(frozen=True, eq=False)
class OperatorHandle:
    f: GroupVector
    mode: str = "convolution"

    def __post_init__(self):
        if self.mode not in ("dense_kernel", "convolution"):
            raise ValueError(f"unknown mode {self.mode!r}")
        _check_range("OperatorHandle", self.f)

    @property
    def group(self) -> FiniteGroup:
        return self.f.group

    def with_mode(self, mode: str) -> "OperatorHandle":
        return OperatorHandle(self.f, mode)


def _check_range(op: str, f: GroupVector) -> None:
    v = f.values
    if np.any(v < 0) or np.any(v > 1):
        bad = int(np.flatnonzero((v < 0) | (v > 1))[0])
        raise _err(EntryOutOfRange, op, f"entry {bad} = {v[bad]!r} outside [0, 1]")


def translate_matrix(f: GroupVector) -> np.ndarray:
    """Rows are the left translates: ``row x = x*f``, i.e. ``row[x, z] = f(x⁻¹ z)``."""
    G = f.group
    n = G.order
    if G.has_table:
        # (x⁻¹ z) for all x, z: table[inverse[x], z]
        return f.values[G.table[G.inverse]]
    out = np.empty((n, n))
    for x in range(n):
        out[x] = f.values[G.left_mult(G.inverse[x])]
    return out


def kernel(f: GroupVector) -> KernelMatrix:
    """Dense ``K(x, y) = Σ_z f(x⁻¹z) f(y⁻¹z)``."""
    _check_range("kernel", f)
    if f.group.order > DENSE_EIG_MAX:
        raise _err(PreconditionViolated, "kernel", f"order {f.group.order} exceeds dense cap {DENSE_EIG_MAX}")
    P = translate_matrix(f)
    K = P @ P.T
    return KernelMatrix(f.group, K)


def apply_T(h: OperatorHandle, alpha: GroupVector) -> GroupVector:
    if alpha.group is not h.group:
        raise _err(GroupMismatch, "apply_T", "operator and vector live on different groups")
    if h.mode == "dense_kernel":
        K = _cached_kernel(h)
        return GroupVector(h.group, K.entries @ alpha.values)
    return convolve(convolve(alpha, h.f), involute(h.f))


def _cached_kernel(h: OperatorHandle) -> KernelMatrix:
    K = h.__dict__.get("_kernel")
    if K is None:
        K = kernel(h.f)
        object.__setattr__(h, "_kernel", K)
    return K


@dataclass
class PowerResult:
    value: float
    iterations: int
    residual: float
    vector: np.ndarray


def power_iteration(matvec, n: int, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER) -> PowerResult:
    """Top eigenvalue of a symmetric PSD operator, started from the normalized ones vector.

    Stops when the Rayleigh quotient changes by less than ``tol`` relatively.
    """
    x = np.full(n, 1.0 / np.sqrt(n))
    lam = 0.0
    for it in range(1, max_iter + 1):
        y = matvec(x)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return PowerResult(0.0, it, 0.0, x)
        lam_new = float(x @ y)
        x_new = y / ny
        if abs(lam_new - lam) <= tol * abs(lam_new):
            res = float(np.linalg.norm(matvec(x_new) - lam_new * x_new))
            return PowerResult(lam_new, it, res, x_new)
        x, lam = x_new, lam_new
    res = float(np.linalg.norm(matvec(x) - lam * x))
    raise _err(NoConvergence, "operator_norm", f"power iteration stalled after {max_iter} steps",
               iterate=x, residual=res)


def operator_norm(h: OperatorHandle, method: str = "dense_eig") -> float:
    """``‖T_f‖`` by power iteration on T_f or by a dense symmetric eigensolve of K_f."""
    G = h.group
    if method == "dense_eig":
        if G.order > DENSE_EIG_MAX:
            raise _err(
                PreconditionViolated, "operator_norm",
                f"order {G.order} exceeds dense cap {DENSE_EIG_MAX}; use method='power_iteration'",
            )
        K = _cached_kernel(h).entries
        return float(scipy.linalg.eigh(K, eigvals_only=True, subset_by_index=[G.order - 1, G.order - 1])[0])
    if method == "power_iteration":
        def mv(x):
            return apply_T(h, GroupVector(G, x)).values
        return power_iteration(mv, G.order).value
    raise ValueError(f"unknown method {method!r}")


def verify_norm_identity(f: GroupVector, methods=("dense_eig", "power_iteration")) -> dict:
    """Compare ``‖T_f‖`` (each method) with ``‖f‖₁²``."""
    _check_range("verify_norm_identity", f)
    target = lp_norm(f, 1) ** 2
    out: dict = {"group_order": f.group.order, "l1_norm_squared": target}
    ok = True
    for m in methods:
        mode = "dense_kernel" if m == "dense_eig" else "convolution"
        val = operator_norm(OperatorHandle(f, mode), m)
        gap = abs(val - target)
        rel = gap / target if target > 0 else gap
        out[m] = {"norm": val, "abs_gap": gap, "rel_gap": rel}
        ok &= rel <= IDENTITY_RTOL
    out["max_rel_gap"] = max(out[m]["rel_gap"] for m in methods)
    out["pass"] = bool(ok)
    return out


def export_kernel_csv(K: KernelMatrix, path) -> None:
    if K.group.order > KERNEL_EXPORT_MAX:
        raise _err(PreconditionViolated, "export_kernel_csv", f"order {K.group.order} exceeds export cap {KERNEL_EXPORT_MAX}")
    rows = [",".join(repr(float(x)) for x in row) for row in K.entries]
    Path(path).write_text("\n".join(rows) + "\n")
