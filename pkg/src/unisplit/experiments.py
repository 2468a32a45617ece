"""Seeded random-matrix classes, unit-modulus sweeps and conservation runs.

Random matrices are drawn from a counter-based Philox generator keyed by
(seed, substream), so identical specs produce bit-identical matrices on any
platform.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from unisplit import linalg
from unisplit.propagator import step_matrix
from unisplit.schemes import SplittingScheme

__all__ = [
    "MatrixClass",
    "MatrixClassSpec",
    "DiagnosticSeries",
    "generate",
    "dh_sweep",
    "spectral_projectors",
    "conservation_run",
    "drift_slope",
]

#: Unit-modulus threshold below which an eigenvalue counts as "1 up to round-off".
DH_THRESHOLD = 1e-10

#: Minimum eigenvalue gap for "simple spectrum" classes; also the grouping
#: tolerance used when building spectral projectors.
EIGENVALUE_GAP = 1e-6


class MatrixClass(enum.Enum):
    SYM_SIMPLE = "SYM_SIMPLE"
    SYM_SIMPLE_NONSYM_SPLIT = "SYM_SIMPLE_NONSYM_SPLIT"
    REAL_SIMPLE_EIGS = "REAL_SIMPLE_EIGS"
    ARBITRARY = "ARBITRARY"
    MULTIPLE_EIGS_DIAG = "MULTIPLE_EIGS_DIAG"
    MULTIPLE_EIGS_NONSYM_SPLIT = "MULTIPLE_EIGS_NONSYM_SPLIT"


@dataclass(frozen=True)
class MatrixClassSpec:
    matrix_class: MatrixClass
    n: int = 10
    seed: int = 0
    multiplicities: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be at least 2")
        cls = self.matrix_class
        if cls in (MatrixClass.MULTIPLE_EIGS_DIAG,
                   MatrixClass.MULTIPLE_EIGS_NONSYM_SPLIT):
            mult = self.multiplicities or (self.n // 2, self.n - self.n // 2)
            object.__setattr__(self, "multiplicities", tuple(mult))
            if sum(self.multiplicities) != self.n:
                raise ValueError(
                    f"multiplicities {self.multiplicities} do not sum to n={self.n}"
                )


def _rng(spec: MatrixClassSpec, substream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[spec.seed, substream]))


def _uniform(spec: MatrixClassSpec, substream: int) -> np.ndarray:
    return _rng(spec, substream).uniform(0.0, 1.0, size=(spec.n, spec.n))


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2.0


def _distinct_values(rng: np.random.Generator, n: int) -> np.ndarray | None:
    vals = np.sort(rng.uniform(0.0, 1.0, size=n))
    if np.min(np.diff(vals)) <= EIGENVALUE_GAP:
        return None
    return vals


def generate(spec: MatrixClassSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(H, A, B) real matrices with H = A + B exactly, per the class recipe.

    Specs that happen to draw a near-degenerate "simple" spectrum (gap below
    ``EIGENVALUE_GAP``) regenerate from the next substream.
    """
    cls = spec.matrix_class
    if cls is MatrixClass.SYM_SIMPLE:
        h = _sym(_uniform(spec, 0))
        a = _sym(_uniform(spec, 1))
        return h, a, h - a
    if cls is MatrixClass.SYM_SIMPLE_NONSYM_SPLIT:
        h = _sym(_uniform(spec, 0))
        a = _uniform(spec, 1)
        return h, a, h - a
    if cls is MatrixClass.REAL_SIMPLE_EIGS:
        for attempt in range(64):
            rng = _rng(spec, 10 + attempt)
            vals = _distinct_values(rng, spec.n)
            if vals is None:
                continue
            p = rng.uniform(0.0, 1.0, size=(spec.n, spec.n)) + np.eye(spec.n)
            if np.linalg.cond(p) > 1e4:
                continue
            h = p @ np.diag(vals) @ np.linalg.inv(p)
            a = rng.uniform(0.0, 1.0, size=(spec.n, spec.n))
            return h, a, h - a
        raise linalg.NumericalError("could not draw a well-conditioned spectrum")
    if cls is MatrixClass.ARBITRARY:
        h = _uniform(spec, 0)
        a = _uniform(spec, 1)
        return h, a, h - a
    if cls in (MatrixClass.MULTIPLE_EIGS_DIAG,
               MatrixClass.MULTIPLE_EIGS_NONSYM_SPLIT):
        for attempt in range(64):
            rng = _rng(spec, 10 + attempt)
            distinct = _distinct_values(rng, len(spec.multiplicities))
            if distinct is None:
                continue
            vals = np.repeat(distinct, spec.multiplicities)
            q, _ = np.linalg.qr(rng.standard_normal((spec.n, spec.n)))
            h = q @ np.diag(vals) @ q.T
            if cls is MatrixClass.MULTIPLE_EIGS_DIAG:
                a = _sym(rng.uniform(0.0, 1.0, size=(spec.n, spec.n)))
            else:
                a = rng.uniform(0.0, 1.0, size=(spec.n, spec.n))
            return h, a, h - a
        raise linalg.NumericalError("could not draw distinct repeated eigenvalues")
    raise ValueError(f"unknown matrix class {cls}")


@dataclass
class DiagnosticSeries:
    """Tabular diagnostic record: one abscissa column plus named value columns."""

    abscissa: str
    columns: tuple[str, ...]
    rows: list[tuple[float, ...]] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, x: float, values: dict[str, float]) -> None:
        if self.rows and x <= self.rows[-1][0]:
            raise ValueError("abscissa must be strictly increasing")
        row = (float(x),) + tuple(float(values[c]) for c in self.columns)
        if not all(np.isfinite(row)):
            raise ValueError(f"non-finite diagnostic value at {self.abscissa}={x}")
        self.rows.append(row)

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name) + 1
        return np.array([r[idx] for r in self.rows])

    @property
    def x(self) -> np.ndarray:
        return np.array([r[0] for r in self.rows])

    def to_csv(self, comments: list[str] | None = None) -> str:
        lines = [f"# {c}" for c in (comments or [])]
        lines.append(",".join((self.abscissa,) + self.columns))
        for row in self.rows:
            lines.append(",".join(f"{v:.17g}" for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "abscissa": self.abscissa,
                "columns": list(self.columns),
                "rows": [list(r) for r in self.rows],
                "meta": self.meta,
            },
            indent=2,
        )


def dh_sweep(
    scheme: SplittingScheme,
    a,
    b,
    h_grid,
    threshold: float = DH_THRESHOLD,
) -> DiagnosticSeries:
    """D_h = max_j || |omega_j| - 1 || over the eigenvalues of S_h, per h.

    ``series.meta['h_star']`` records the largest grid point below the first h
    with D_h > threshold (None when the very first point already exceeds it).
    Eigensolver failures are recorded per-point and the sweep continues.
    """
    series = DiagnosticSeries(abscissa="h", columns=("D_h",))
    series.meta["scheme"] = scheme.name
    series.meta["threshold"] = threshold
    failures: list[float] = []
    h_star = None
    exceeded = False
    for h in sorted(float(x) for x in h_grid):
        try:
            omega = linalg.eig_general(step_matrix(scheme, a, b, h))
        except linalg.NumericalError:
            failures.append(h)
            continue
        d_h = float(np.max(np.abs(np.abs(omega) - 1.0)))
        series.add(h, {"D_h": d_h})
        if not exceeded:
            if d_h > threshold:
                exceeded = True
            else:
                h_star = h
    series.meta["h_star"] = h_star
    series.meta["failures"] = failures
    return series


def spectral_projectors(
    h_matrix, gap_tol: float = EIGENVALUE_GAP
) -> list[tuple[float, np.ndarray]]:
    """Spectral projectors of a real diagonalizable matrix with real spectrum.

    Eigenvalues closer than ``gap_tol`` are grouped into one eigenspace.
    Raises :class:`linalg.NumericalError` when a genuinely complex eigenvalue
    is detected (class not covered by the theory).
    """
    hm = linalg.as_matrix(h_matrix, square=True)
    scale = max(linalg.frobenius(hm), 1.0)
    symmetric = np.max(np.abs(hm - hm.T)) <= 1e-12 * scale
    if symmetric:
        w, q = linalg.eig_symmetric(hm)
        v = q.astype(complex)
        w_inv = q.T.astype(complex)
    else:
        w, v = np.linalg.eig(hm.real)
        if np.max(np.abs(w.imag)) > gap_tol:
            raise linalg.NumericalError(
                f"complex eigenvalues detected (max |Im| = {np.max(np.abs(w.imag)):.3e})"
            )
        order = np.argsort(w.real)
        w, v = w[order].real, v[:, order]
        w_inv = np.linalg.inv(v)

    projectors = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[start] > gap_tol:
            group = slice(start, i)
            pi = v[:, group] @ w_inv[group, :]
            projectors.append((float(np.mean(w[group])), pi))
            start = i
    return projectors


def conservation_run(
    scheme: SplittingScheme,
    a,
    b,
    u0,
    h: float,
    n_steps: int,
    sample_every: int = 1,
    projectors: list[tuple[float, np.ndarray]] | None = None,
    overflow: float = 1e12,
) -> DiagnosticSeries:
    """Iterate S_h and record mass/energy/projection conservation errors.

    Columns: ``mass_err`` = |M(u_n) - M(u_0)|, ``energy_err`` = |Hform(u_n) -
    Hform(u_0)| and, per projector, ``proj_err_k`` = || |Pi_k u_n| - |Pi_k u_0| ||.
    Aborts with :class:`linalg.NumericalError` on overflow (signals h > h*).
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    am = linalg.as_matrix(a, square=True)
    bm = linalg.as_matrix(b, square=True)
    hm = am + bm
    u = linalg.as_vector(u0)
    s_h = step_matrix(scheme, am, bm, h)

    proj = projectors or []
    cols = ("mass_err", "energy_err") + tuple(
        f"proj_err_{k}" for k in range(len(proj))
    )
    series = DiagnosticSeries(abscissa="n", columns=cols)
    series.meta["scheme"] = scheme.name
    series.meta["h"] = h

    mass0 = float(np.vdot(u, u).real)
    energy0 = float(np.vdot(u, hm @ u).real)
    proj_norm0 = [float(np.linalg.norm(p @ u)) for _, p in proj]

    def record(n: int, state: np.ndarray) -> None:
        vals = {
            "mass_err": abs(float(np.vdot(state, state).real) - mass0),
            "energy_err": abs(float(np.vdot(state, hm @ state).real) - energy0),
        }
        for k, (_, p) in enumerate(proj):
            vals[f"proj_err_{k}"] = abs(
                float(np.linalg.norm(p @ state)) - proj_norm0[k]
            )
        series.add(n, vals)

    for n in range(1, n_steps + 1):
        u = s_h @ u
        norm = float(np.linalg.norm(u))
        if not np.isfinite(norm) or norm > overflow:
            raise linalg.NumericalError(
                f"state overflow at step {n} (|u| = {norm:.3e}); h exceeds h*"
            )
        if n % sample_every == 0 or n == n_steps:
            record(n, u)
    return series


def drift_slope(series: DiagnosticSeries, column: str) -> float:
    """Ordinary least-squares slope of an error column against step index."""
    y = series.column(column)
    x = series.x
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
