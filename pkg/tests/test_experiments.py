import json

import numpy as np
import pytest

from unisplit import experiments as ex
from unisplit import linalg, schemes
from unisplit.experiments import (
    DiagnosticSeries,
    MatrixClass,
    MatrixClassSpec,
    conservation_run,
    dh_sweep,
    drift_slope,
    generate,
    spectral_projectors,
)


def spec_of(cls, **kw):
    return MatrixClassSpec(matrix_class=MatrixClass[cls], n=10, seed=0, **kw)


@pytest.mark.parametrize("cls", [m.name for m in MatrixClass])
def test_generate_split_is_exact(cls):
    h, a, b = generate(spec_of(cls))
    assert h.shape == (10, 10)
    assert np.array_equal(b, h - a)  # B is defined as the exact remainder
    assert np.isrealobj(h) and np.isrealobj(a)


def test_sym_simple_symmetry():
    h, a, b = generate(spec_of("SYM_SIMPLE"))
    assert np.allclose(h, h.T) and np.allclose(a, a.T) and np.allclose(b, b.T)


def test_nonsym_split_keeps_h_symmetric():
    h, a, _ = generate(spec_of("SYM_SIMPLE_NONSYM_SPLIT"))
    assert np.allclose(h, h.T)
    assert not np.allclose(a, a.T)


def test_real_simple_eigs_are_real_and_distinct():
    h, _, _ = generate(spec_of("REAL_SIMPLE_EIGS"))
    w = np.linalg.eigvals(h)
    assert np.max(np.abs(w.imag)) < 1e-8
    gaps = np.diff(np.sort(w.real))
    assert np.min(gaps) > ex.EIGENVALUE_GAP / 2


def test_multiple_eigs_multiplicities():
    spec = spec_of("MULTIPLE_EIGS_DIAG", multiplicities=(4, 3, 3))
    h, a, _ = generate(spec)
    w = np.sort(np.linalg.eigvalsh(h))
    # eigenvalues cluster into groups of the requested sizes
    groups = np.split(w, np.where(np.diff(w) > 1e-6)[0] + 1)
    assert sorted(len(g) for g in groups) == [3, 3, 4]
    assert np.allclose(a, a.T)


def test_multiplicities_must_sum_to_n():
    with pytest.raises(ValueError):
        spec_of("MULTIPLE_EIGS_DIAG", multiplicities=(3, 3))


def test_generation_is_deterministic():
    h1, a1, _ = generate(spec_of("ARBITRARY"))
    h2, a2, _ = generate(spec_of("ARBITRARY"))
    assert np.array_equal(h1, h2) and np.array_equal(a1, a2)
    h3, _, _ = generate(MatrixClassSpec(MatrixClass.ARBITRARY, n=10, seed=1))
    assert not np.array_equal(h1, h3)


class TestDiagnosticSeries:
    def test_add_and_columns(self):
        s = DiagnosticSeries(abscissa="h", columns=("e",))
        s.add(0.1, {"e": 1.0})
        s.add(0.2, {"e": 2.0})
        assert np.array_equal(s.x, [0.1, 0.2])
        assert np.array_equal(s.column("e"), [1.0, 2.0])

    def test_abscissa_monotone(self):
        s = DiagnosticSeries(abscissa="h", columns=("e",))
        s.add(0.2, {"e": 1.0})
        with pytest.raises(ValueError):
            s.add(0.2, {"e": 1.0})

    def test_rejects_nonfinite(self):
        s = DiagnosticSeries(abscissa="h", columns=("e",))
        with pytest.raises(ValueError):
            s.add(0.1, {"e": np.inf})

    def test_csv_layout(self):
        s = DiagnosticSeries(abscissa="h", columns=("e",))
        s.add(0.5, {"e": 3.0})
        text = s.to_csv(comments=["hello"])
        lines = text.splitlines()
        assert lines[0] == "# hello"
        assert lines[1] == "h,e"
        assert lines[2] == "0.5,3"

    def test_json_round_trip(self):
        s = DiagnosticSeries(abscissa="t", columns=("a", "b"))
        s.add(1.0, {"a": 0.25, "b": -1.0})
        s.meta["note"] = "x"
        doc = json.loads(s.to_json())
        assert doc["columns"] == ["a", "b"]
        assert doc["rows"] == [[1.0, 0.25, -1.0]]
        assert doc["meta"] == {"note": "x"}


def test_dh_sweep_threshold_detection(sym_split):
    _, a, b = sym_split
    series = dh_sweep(schemes.get_scheme("S31"), a, b, np.geomspace(0.01, 10, 20))
    assert series.meta["h_star"] is not None
    d = series.column("D_h")
    assert d[0] <= 1e-12
    assert d[-1] > 1e-6


def test_dh_sweep_no_threshold_on_generic_matrices():
    _, a, b = generate(spec_of("ARBITRARY"))
    series = dh_sweep(schemes.get_scheme("S31"), a, b, np.geomspace(0.01, 1, 10))
    assert series.meta["h_star"] is None


def test_spectral_projectors_partition(sym_split):
    h, _, _ = sym_split
    proj = spectral_projectors(h)
    total = sum(p for _, p in proj)
    assert np.allclose(total, np.eye(10), atol=1e-10)
    for _, p in proj:
        assert np.allclose(p @ p, p, atol=1e-10)
        assert np.allclose(p @ h, h @ p, atol=1e-10)


def test_spectral_projectors_group_multiplicities():
    h, _, _ = generate(spec_of("MULTIPLE_EIGS_DIAG", multiplicities=(5, 5)))
    proj = spectral_projectors(h)
    assert len(proj) == 2
    ranks = sorted(round(np.trace(p).real) for _, p in proj)
    assert ranks == [5, 5]


def test_conservation_run_reversible_scheme(sym_split, rng):
    """Below the threshold the errors stay bounded (similar-to-unitary, not
    unitary: the oscillation amplitude scales like h^p, it does not grow)."""
    _, a, b = sym_split
    u0 = rng.standard_normal(10)
    u0 = u0 / np.linalg.norm(u0)
    coarse = conservation_run(schemes.get_scheme("S31"), a, b, u0,
                              h=0.05, n_steps=400, sample_every=20)
    fine = conservation_run(schemes.get_scheme("S31"), a, b, u0,
                            h=0.01, n_steps=2000, sample_every=100)
    assert coarse.column("mass_err").max() < 1e-3
    # order-3 scheme: shrinking h by 5 shrinks the bound by roughly 5^3
    assert fine.column("mass_err").max() < coarse.column("mass_err").max() / 50
    assert fine.column("energy_err").max() < 1e-6


def test_conservation_run_overflow_aborts(sym_split):
    _, a, b = sym_split
    u0 = np.ones(10) / np.sqrt(10.0)
    with pytest.raises(linalg.NumericalError, match="overflow"):
        conservation_run(schemes.drift_comparator(), a, b, u0,
                         h=5.0, n_steps=2000, sample_every=100)


def test_drift_slope_recovers_linear_trend():
    s = DiagnosticSeries(abscissa="n", columns=("e",))
    for n in range(1, 50):
        s.add(float(n), {"e": 3e-8 * n + 1e-9})
    assert drift_slope(s, "e") == pytest.approx(3e-8, rel=1e-6)
