"""Application of a splitting scheme to a concrete split H = A + B.

Provides the dense step matrix S_h for spectral diagnostics, a matrix-free
path driven by caller-supplied exponential actions, and the reversibility /
convergence-order diagnostics built on top of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from unisplit import linalg
from unisplit.schemes import SplittingScheme

__all__ = [
    "StepOperatorPair",
    "dense_operator_pair",
    "step_matrix",
    "apply_scheme",
    "exact_propagator",
    "reversibility_report",
    "OrderFit",
    "empirical_order",
    "eigenphase_error",
]


@dataclass
class StepOperatorPair:
    """Matrix-free exponential actions e^{zA} u and e^{zB} u with cost counters.

    The counters are per-instance state; create one pair per run.
    """

    exp_a: Callable[[complex, np.ndarray], np.ndarray]
    exp_b: Callable[[complex, np.ndarray], np.ndarray]
    a_applications: int = 0
    b_applications: int = 0


def dense_operator_pair(a, b) -> StepOperatorPair:
    """Exact dense actions, for oracles and small problems."""
    am = linalg.as_matrix(a, square=True)
    bm = linalg.as_matrix(b, square=True)
    return StepOperatorPair(
        exp_a=lambda z, u: linalg.expm(z * am) @ u,
        exp_b=lambda z, u: linalg.expm(z * bm) @ u,
    )


def step_matrix(scheme: SplittingScheme, a, b, h: float) -> np.ndarray:
    """Dense step operator: product of expm(i h c Op) over the factor sequence.

    The first factor in application order multiplies the state first, so it is
    the rightmost term of the accumulated product.
    """
    am = linalg.as_matrix(a, square=True)
    bm = linalg.as_matrix(b, square=True)
    if am.shape != bm.shape:
        raise linalg.DimensionError(f"shape mismatch {am.shape} vs {bm.shape}")
    s = np.eye(am.shape[0], dtype=complex)
    for f in scheme.factors:
        op = am if f.op == "A" else bm
        s = linalg.expm(1j * h * f.coeff * op) @ s
    return s


def apply_scheme(
    scheme: SplittingScheme, ops: StepOperatorPair, u, h: float
) -> np.ndarray:
    """One scheme step of the state ``u`` via the matrix-free actions."""
    v = linalg.as_vector(u)
    for f in scheme.factors:
        z = 1j * h * f.coeff
        if f.op == "A":
            v = ops.exp_a(z, v)
            ops.a_applications += 1
        else:
            v = ops.exp_b(z, v)
            ops.b_applications += 1
    return v


def exact_propagator(h_matrix, t: float) -> np.ndarray:
    """Exact flow expm(i t H)."""
    return linalg.expm(1j * t * linalg.as_matrix(h_matrix, square=True))


def reversibility_report(
    scheme: SplittingScheme, a, b, h: float
) -> dict[str, float]:
    """Residuals of the reversibility identities for real A, B.

    ``sc2_residual`` = ||conj(S_h) S_h - I||_F (holds for any real split);
    ``sc3_residual`` = ||conj(S_h)^T - S_{-h}||_F (meaningful when A and B are
    real symmetric; reported unconditionally as a diagnostic).
    """
    s_h = step_matrix(scheme, a, b, h)
    n = s_h.shape[0]
    sc2 = linalg.frobenius(s_h.conj() @ s_h - np.eye(n))
    s_back = step_matrix(scheme, a, b, -h)
    sc3 = linalg.frobenius(s_h.conj().T - s_back)
    return {"sc2_residual": sc2, "sc3_residual": sc3}


@dataclass(frozen=True)
class OrderFit:
    """Least-squares slope of log(error) against log(h)."""

    slope: float
    intercept: float
    h_used: tuple[float, ...]
    errors: tuple[float, ...]
    residuals: tuple[float, ...]
    excluded: tuple[float, ...]  # h values outside the fit window


def _fit_loglog(
    h_values, errors, err_min: float = 1e-12, err_max: float = 1e-1
) -> OrderFit:
    h_arr = np.asarray(h_values, dtype=float)
    e_arr = np.asarray(errors, dtype=float)
    keep = (e_arr >= err_min) & (e_arr <= err_max)
    if keep.sum() < 2:
        raise linalg.NumericalError(
            "fewer than two points inside the fit window "
            f"[{err_min:g}, {err_max:g}]; errors: {e_arr}"
        )
    lh, le = np.log(h_arr[keep]), np.log(e_arr[keep])
    slope, intercept = np.polyfit(lh, le, 1)
    resid = le - (slope * lh + intercept)
    return OrderFit(
        slope=float(slope),
        intercept=float(intercept),
        h_used=tuple(h_arr[keep]),
        errors=tuple(e_arr[keep]),
        residuals=tuple(resid),
        excluded=tuple(h_arr[~keep]),
    )


def empirical_order(scheme: SplittingScheme, a, b, h_grid) -> OrderFit:
    """Local-error order: slope of log ||S_h - expm(i h H)||_F vs log h.

    Points below the round-off plateau (error < 1e-12) or outside the
    asymptotic window (error > 1e-1) are excluded and reported.
    """
    am = linalg.as_matrix(a, square=True)
    bm = linalg.as_matrix(b, square=True)
    hm = am + bm
    errors = [
        linalg.frobenius(step_matrix(scheme, am, bm, h) - exact_propagator(hm, h))
        for h in h_grid
    ]
    return _fit_loglog(h_grid, errors)


def eigenphase_error(
    scheme: SplittingScheme, a, b, h: float, warn: bool = True
) -> float:
    """Max distance from the eigenvalues of S_h to the exact phases e^{i h lam}.

    H = A + B must be real symmetric.  Eigenvalues are paired greedily to the
    nearest exact phase; a pairing-ambiguity warning is attached to the result
    via ``warnings`` when two exact phases fall within twice the pairing
    distance (valid only for h small enough that phase gaps dominate the
    method error).
    """
    if h == 0.0:
        return 0.0
    am = linalg.as_matrix(a, square=True)
    bm = linalg.as_matrix(b, square=True)
    lam, _ = linalg.eig_symmetric(am + bm)
    exact = np.exp(1j * h * lam)
    omega = linalg.eig_general(step_matrix(scheme, am, bm, h))
    dist = np.abs(omega[:, None] - exact[None, :])
    worst = 0.0
    ambiguous = False
    for i in range(len(omega)):
        j = int(np.argmin(dist[i]))
        d = float(dist[i, j])
        others = np.delete(dist[i], j)
        if others.size and float(np.min(others)) < 2.0 * d:
            ambiguous = True
        worst = max(worst, d)
    if ambiguous and warn:
        import warnings

        warnings.warn(
            f"eigenphase pairing ambiguous at h={h}: two exact phases within "
            "2x the pairing distance",
            RuntimeWarning,
            stacklevel=2,
        )
    return worst
