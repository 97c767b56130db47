import logging
import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.linalg import expm

from padfs.measures import (
    CovarianceMatrix,
    MeasureReport,
    beamsplitter_output,
    covariance_matrix,
    entropy_h,
    find_inversion,
    linear_entropy_closed_form,
    linear_entropy_potential,
    measure_report,
    moments,
    rel_entropy_non_gaussianity,
    skew_info_measure,
    wigner_log_negativity,
)
from padfs.special_numerics import QuadratureSpec
from padfs.states import FockVector, PadfsParams, limiting_state, padfs_coefficients, to_density_matrix


def _v(alpha, n, k):
    return padfs_coefficients(PadfsParams(alpha, n, k))


def _fock1_wln_oracle():
    # radial integral of |(2/pi)(4r^2 - 1) e^{-2r^2}| 2 pi r dr, split at the node r = 1/2
    f = lambda r: abs(4 * (4 * r * r - 1) * math.exp(-2 * r * r) * r)
    total = quad(f, 0, 0.5)[0] + quad(f, 0.5, np.inf)[0]
    return math.log2(total)


def test_fock1_wln_oracle_closed_form():
    assert _fock1_wln_oracle() == pytest.approx(math.log2(4 * math.exp(-0.5) - 1), abs=1e-12)


def test_beamsplitter_single_photon():
    table = beamsplitter_output(limiting_state("fock", 1))
    assert set(table) == {(0, 1), (1, 0)}
    for amp in table.values():
        assert abs(amp) == pytest.approx(1 / math.sqrt(2))


def test_beamsplitter_vacuum():
    assert beamsplitter_output(limiting_state("vacuum")) == {(0, 0): 1.0}


def test_beamsplitter_preserves_norm():
    table = beamsplitter_output(_v(0.5, 1, 1))
    assert sum(abs(a) ** 2 for a in table.values()) == pytest.approx(1.0, abs=1e-10)


def _dense_beamsplitter_le(v, dim=40):
    # mix with vacuum via exp(theta (a† b - a b†)) on a dense two-mode space
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    eye = np.eye(dim)
    A, B = np.kron(a, eye), np.kron(eye, a)
    u = expm((math.pi / 4) * (A.conj().T @ B - A @ B.conj().T))
    psi_in = np.kron(v.full(dim), np.eye(dim)[0])
    phi = (u @ psi_in).reshape(dim, dim)
    rho_b = phi.T @ phi.conj()
    return 1 - float(np.sum(np.abs(rho_b) ** 2))


@pytest.mark.parametrize("alpha,n,k", [(0.5, 1, 1), (0.9, 2, 1), (0.3 + 0.4j, 0, 2)])
def test_linear_entropy_matches_dense_unitary(alpha, n, k):
    v = _v(alpha, n, k)
    dim = v.dim + 2
    assert linear_entropy_potential(v) == pytest.approx(_dense_beamsplitter_le(v, dim), abs=1e-10)


def test_linear_entropy_examples():
    assert linear_entropy_potential(limiting_state("coherent", 0.7)) == pytest.approx(0.0, abs=1e-10)
    assert linear_entropy_potential(limiting_state("fock", 1)) == pytest.approx(0.5, abs=1e-12)
    assert linear_entropy_potential(_v(0.0, 1, 1)) == pytest.approx(linear_entropy_potential(limiting_state("fock", 2)))


@pytest.mark.parametrize("alpha", [0.0, 0.4, 1.1, 2.0, 0.6 - 0.8j])
@pytest.mark.parametrize("n,k", [(0, 0), (1, 1), (2, 3), (3, 1)])
def test_linear_entropy_dual_path(alpha, n, k):
    v = _v(alpha, n, k)
    assert linear_entropy_closed_form(v) == pytest.approx(linear_entropy_potential(v), abs=1e-10)


@pytest.mark.parametrize("alpha", [0.0, 0.7, 1.5 + 1j])
def test_skew_info_coherent(alpha):
    assert skew_info_measure(limiting_state("coherent", alpha)) == pytest.approx(0.5, abs=1e-10)


@pytest.mark.parametrize("n", range(5))
def test_skew_info_fock(n):
    assert skew_info_measure(limiting_state("fock", n)) == pytest.approx(n + 0.5, abs=1e-12)


def test_skew_info_padfs_above_classical():
    assert skew_info_measure(_v(0.5, 1, 1)) > 0.5


def test_moments_coherent():
    alpha = 0.8 - 0.3j
    a1, a2, nbar = moments(limiting_state("coherent", alpha))
    assert a1 == pytest.approx(alpha, abs=1e-12)
    assert a2 == pytest.approx(alpha**2, abs=1e-12)
    assert nbar == pytest.approx(abs(alpha) ** 2, abs=1e-12)


def test_covariance_examples():
    vac = covariance_matrix(limiting_state("vacuum"))
    assert (vac.sqq, vac.spp, vac.sqp) == pytest.approx((1, 1, 0))
    for m in range(4):
        c = covariance_matrix(limiting_state("fock", m))
        assert (c.sqq, c.spp, c.sqp) == pytest.approx((2 * m + 1, 2 * m + 1, 0))
    for alpha in (0.3, 1.2, 2.0):
        assert covariance_matrix(_v(alpha, 2, 1)).sqp == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.4 + 0.9j, -1.3 + 0.2j])
def test_covariance_coherent_is_identity(alpha):
    c = covariance_matrix(limiting_state("coherent", alpha))
    np.testing.assert_allclose(c.as_array(), np.eye(2), atol=1e-10)


def test_covariance_uncertainty_bound():
    rng = np.random.default_rng(9)
    for _ in range(20):
        alpha = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        c = covariance_matrix(_v(alpha, int(rng.integers(0, 4)), int(rng.integers(0, 4))))
        assert c.sqq > 0 and c.spp > 0
        assert c.det >= 1 - 1e-9


def test_printed_covariance_gap_is_logged(caplog):
    with caplog.at_level(logging.DEBUG, logger="padfs.measures"):
        covariance_matrix(_v(0.5, 1, 1))
    assert any("printed covariance formula" in r.getMessage() for r in caplog.records)


def test_entropy_function():
    assert entropy_h(1.0) == 0.0
    assert entropy_h(0.5) == 0.0
    assert entropy_h(3.0) == pytest.approx(2.0, abs=1e-15)


def test_rel_entropy_examples():
    assert rel_entropy_non_gaussianity(limiting_state("coherent", 0.7)) < 1e-8
    assert rel_entropy_non_gaussianity(limiting_state("fock", 1)) == pytest.approx(2.0, abs=1e-12)


def test_rel_entropy_pacs_decreases_with_alpha():
    vals = [rel_entropy_non_gaussianity(limiting_state("pacs", a, 1)) for a in np.arange(0.0, 2.01, 0.1)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_rel_entropy_rejects_unphysical_covariance(monkeypatch):
    import padfs.measures as mod

    monkeypatch.setattr(mod, "covariance_matrix", lambda v: CovarianceMatrix(0.5, 0.5, 0.0))
    with pytest.raises(ValueError):
        mod.rel_entropy_non_gaussianity(limiting_state("vacuum"))


def test_wln_coherent_is_zero():
    w = wigner_log_negativity(PadfsParams(0.7, 0, 0))
    assert w.value == 0.0
    assert abs(w.raw) < 1e-3


def test_wln_fock1_matches_radial_oracle():
    w = wigner_log_negativity(PadfsParams(0.0, 1, 0))
    assert w.converged
    assert w.value == pytest.approx(_fock1_wln_oracle(), abs=1e-4)


def test_wln_density_matrix_path_agrees_with_analytic():
    p = PadfsParams(0.5, 1, 1)
    rho = to_density_matrix(padfs_coefficients(p))
    spec = QuadratureSpec(refinement_levels=3, min_levels=3)
    analytic = wigner_log_negativity(p, spec).value
    assert wigner_log_negativity(rho, spec, params_hint=p).value == pytest.approx(analytic, abs=1e-10)
    assert wigner_log_negativity(rho, spec).value == pytest.approx(analytic, abs=1e-4)


def test_wln_padfs_above_pacs():
    assert wigner_log_negativity(PadfsParams(0.5, 1, 1)).value > wigner_log_negativity(PadfsParams(0.5, 0, 1)).value


def test_wln_rejects_unknown_source():
    with pytest.raises(TypeError):
        wigner_log_negativity("fock")


def test_measure_report_examples():
    vac = measure_report(PadfsParams(0.0, 0, 0))
    assert (vac.linear_entropy, vac.skew_info, vac.wln, vac.rel_entropy_ng) == pytest.approx((0, 0.5, 0, 0), abs=1e-10)

    f1 = measure_report(PadfsParams(0.0, 1, 0))
    assert f1.linear_entropy == pytest.approx(0.5)
    assert f1.skew_info == pytest.approx(1.5)
    assert f1.wln > 0
    assert f1.rel_entropy_ng == pytest.approx(2.0)

    r = measure_report(PadfsParams(0.5, 1, 1))
    assert r.linear_entropy > 0 and r.skew_info > 0.5 and r.wln > 0 and r.rel_entropy_ng > 0
    assert r.converged


def test_measure_report_subset():
    r = measure_report(PadfsParams(0.5, 1, 1), measures=("LE",))
    assert r.linear_entropy > 0
    assert r.wln == 0 and r.skew_info == 0 and r.rel_entropy_ng == 0


def test_measure_report_rejects_nonfinite():
    with pytest.raises(ValueError):
        MeasureReport(float("nan"), 0.5, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("phase", [0.3, math.pi / 2, 2.5])
def test_global_phase_invariance(phase):
    v = _v(0.8, 1, 2)
    w = FockVector(v.offset, v.amps * np.exp(1j * phase))
    for f in (linear_entropy_potential, linear_entropy_closed_form, skew_info_measure, rel_entropy_non_gaussianity):
        assert f(w) == pytest.approx(f(v), abs=1e-12)
    hint = PadfsParams(0.8, 1, 2)
    spec = QuadratureSpec(refinement_levels=2, min_levels=2)
    w_v = wigner_log_negativity(to_density_matrix(v), spec, params_hint=hint).value
    w_w = wigner_log_negativity(to_density_matrix(w), spec, params_hint=hint).value
    assert w_w == pytest.approx(w_v, abs=1e-12)


def test_linear_entropy_crossing_is_unique():
    alphas = np.arange(0.1, 1.0001, 0.01)
    diff = [linear_entropy_potential(_v(a, 1, 1)) - linear_entropy_potential(_v(a, 1, 2)) for a in alphas]
    signs = np.sign(diff)
    assert np.count_nonzero(signs[1:] != signs[:-1]) == 1


def test_ordering_is_measure_specific():
    found = False
    for a in np.arange(0.6, 0.91, 0.05):
        v1, v2 = _v(a, 1, 1), _v(a, 1, 2)
        le_says_k1 = linear_entropy_potential(v1) > linear_entropy_potential(v2)
        n_says_k2 = skew_info_measure(v2) > skew_info_measure(v1)
        found |= le_says_k1 and n_says_k2
    assert found


def test_find_inversion():
    assert find_inversion("LE", 1, 1, 2, (0.2, 0.8)) == pytest.approx(0.45, abs=0.02)
    with pytest.raises(ValueError, match="no sign change"):
        find_inversion("LE", 1, 1, 1, (0.2, 0.8))
