"""Nonclassicality and non-Gaussianity quantifiers for pure single-mode states.

* linear entropy potential: mix with vacuum on a 50:50 beamsplitter, ``1 - Tr rho_B^2``
* skew-information measure: ``1/2 + <a†a> - |<a>|^2``
* Wigner logarithmic negativity: ``log2 integral |W|``
* relative entropy of non-Gaussianity: ``h(sqrt(det sigma))``
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.special import gammaln

from .special_numerics import QuadratureSpec, default_radius, integrate_phase_space
from .states import DensityMatrix, FockVector, PadfsParams, padfs_coefficients
from .wigner import wigner_generic, wigner_padfs

logger = logging.getLogger(__name__)

__all__ = [
    "beamsplitter_output",
    "linear_entropy_potential",
    "linear_entropy_closed_form",
    "skew_info_measure",
    "moments",
    "CovarianceMatrix",
    "covariance_matrix",
    "covariance_printed_form",
    "entropy_h",
    "rel_entropy_non_gaussianity",
    "WlnResult",
    "wigner_log_negativity",
    "MeasureReport",
    "measure_report",
    "WLN_ABS_FLOOR",
    "find_inversion",
]

# round-off level of a ~1e6-term quadrature sum of an O(1) integrand
WLN_ABS_FLOOR = 1e-12


def beamsplitter_output(v: FockVector) -> Dict[Tuple[int, int], complex]:
    """Two-mode state after mixing ``v`` with vacuum on a symmetric beamsplitter.

    Input photon number ``s`` maps to
    ``2^(-s/2) sum_j sqrt(C(s, j)) i^(s-j) |j, s-j>``. Returned as a sparse map
    ``(n_A, n_B) -> amplitude``.
    """
    out: Dict[Tuple[int, int], complex] = {}
    for idx, c in enumerate(v.amps):
        if c == 0:
            continue
        s = v.offset + idx
        scale = c * 2.0 ** (-s / 2)
        for j in range(s + 1):
            out[(j, s - j)] = out.get((j, s - j), 0j) + scale * math.sqrt(math.comb(s, j)) * 1j ** (s - j)
    return out


def _reduced_b(table: Dict[Tuple[int, int], complex]) -> np.ndarray:
    na = max(a for a, _ in table) + 1
    nb = max(b for _, b in table) + 1
    phi = np.zeros((na, nb), dtype=complex)
    for (a, b), amp in table.items():
        phi[a, b] = amp
    # rho_B[b, b'] = sum_a phi[a, b] conj(phi[a, b'])
    return phi.T @ phi.conj()


def linear_entropy_potential(v: FockVector) -> float:
    """``1 - Tr(rho_B^2)`` from the explicit two-mode state and partial trace over mode A."""
    rho_b = _reduced_b(beamsplitter_output(v))
    return float(1.0 - np.sum(np.abs(rho_b) ** 2))


def _log_binom(top, j):
    valid = (j >= 0) & (j <= top) & (top >= 0)
    t = np.where(valid, top, 0)
    jj = np.where(valid, j, 0)
    return np.where(valid, gammaln(t + 1) - gammaln(jj + 1) - gammaln(t - jj + 1), -np.inf)


def linear_entropy_closed_form(v: FockVector) -> float:
    """Quadruple-sum expression for the linear entropy potential.

    Sums ``C_m C*_m' C_r C*_(m+r-m')`` against the beamsplitter binomial weights and
    ``(1/2)^(m+r+2k)``, where ``k`` is the vector offset. Binomials with an
    out-of-range lower index are zero.
    """
    c = np.asarray(v.amps)
    k = v.offset
    size = len(c)
    m = np.arange(size)[:, None, None]
    mp = np.arange(size)[None, :, None]
    r = np.arange(size)[None, None, :]
    s = m + r - mp
    valid = (s >= 0) & (s < size)
    s_idx = np.where(valid, s, 0)
    prod = c[m] * c[mp].conj() * c[r] * np.where(valid, c[s_idx].conj(), 0)

    weights = np.zeros(prod.shape)
    base = -(m + r + 2 * k) * math.log(2.0)
    for k1 in range(size + k):
        j = r - mp + k1
        logw = 0.5 * (
            _log_binom(m + k, k1) + _log_binom(mp + k, k1) + _log_binom(r + k, j) + _log_binom(s + k, j)
        )
        with np.errstate(invalid="ignore"):
            weights += np.where(valid, np.exp(logw + base), 0.0)
    total = np.sum(prod * weights)
    return float(1.0 - total.real)


def moments(v: FockVector) -> Tuple[complex, complex, float]:
    """``(<a>, <a^2>, <a†a>)`` from the amplitudes."""
    psi = v.full()
    ns = np.arange(len(psi))
    a1 = np.sum(psi[:-1].conj() * np.sqrt(ns[1:]) * psi[1:]) if len(psi) > 1 else 0j
    a2 = np.sum(psi[:-2].conj() * np.sqrt(ns[2:] * ns[1:-1]) * psi[2:]) if len(psi) > 2 else 0j
    nbar = float(np.sum(ns * np.abs(psi) ** 2))
    return complex(a1), complex(a2), nbar


def skew_info_measure(v: FockVector) -> float:
    """``1/2 + <a†a> - <a†><a>`` for a pure state."""
    a1, _, nbar = moments(v)
    return 0.5 + nbar - abs(a1) ** 2


@dataclass(frozen=True)
class CovarianceMatrix:
    """Quadrature covariances with ``sigma_uv = <uv + vu> - 2<u><v>``; vacuum is the identity."""

    sqq: float
    spp: float
    sqp: float

    @property
    def det(self) -> float:
        return self.sqq * self.spp - self.sqp**2

    def as_array(self) -> np.ndarray:
        return np.array([[self.sqq, self.sqp], [self.sqp, self.spp]])


def covariance_printed_form(v: FockVector) -> CovarianceMatrix:
    """Alternative closed-form amplitude sums for the covariance entries.

    Kept only as a cross-check; it does not reduce to the vacuum identity and
    disagrees with the moment route in general.
    """
    c = np.asarray(v.amps)
    k = v.offset
    m = np.arange(len(c))
    size = len(c)
    c2 = np.zeros(size, dtype=complex)
    c2[: size - 2] = c[2:] * c[: size - 2].conj() if size > 2 else 0
    c1 = np.zeros(size, dtype=complex)
    c1[: size - 1] = c[1:] * c[:-1].conj() if size > 1 else 0
    root2 = np.sqrt((m + k + 1) * (m + k + 2))
    quad = 2 * np.abs(c) ** 2 * (m + k) * (m + k - 1)
    plus = np.sum(c2.real * root2 + quad - 1) + np.sum((c1 + c1.conj()).real ** 2 * (m + k + 1))
    minus = np.sum(c2.real * root2 - quad - 1) - np.sum((c1 - c1.conj()) ** 2 * (m + k + 1)).real
    sqp = np.sum(c2.imag * root2) - np.sum((c1**2).imag * (m + k + 1))
    return CovarianceMatrix(float(plus), float(minus), float(sqp))


def covariance_matrix(v: FockVector) -> CovarianceMatrix:
    """Covariance matrix from ``<a>``, ``<a^2>``, ``<a†a>`` with ``q = (a + a†)/sqrt 2``.

    The alternative amplitude sums of :func:`covariance_printed_form` are evaluated
    alongside and their deviation is logged at DEBUG level.
    """
    a1, a2, nbar = moments(v)
    sqq = 1.0 + 2.0 * nbar + 2.0 * a2.real - 4.0 * a1.real**2
    spp = 1.0 + 2.0 * nbar - 2.0 * a2.real - 4.0 * a1.imag**2
    sqp = 2.0 * a2.imag - 4.0 * a1.real * a1.imag
    cov = CovarianceMatrix(sqq, spp, sqp)
    if logger.isEnabledFor(logging.DEBUG):
        printed = covariance_printed_form(v)
        gap = np.max(np.abs(printed.as_array() - cov.as_array()))
        logger.debug("printed covariance formula deviates from moments by %.3e", gap)
    return cov


def entropy_h(z: float) -> float:
    """Von Neumann entropy (bits) of a single-mode Gaussian with symplectic eigenvalue ``z``."""
    z = max(float(z), 1.0)
    if z == 1.0:
        return 0.0
    up, down = (z + 1) / 2, (z - 1) / 2
    return up * math.log2(up) - down * math.log2(down)


def rel_entropy_non_gaussianity(v: FockVector) -> float:
    """Entropy of the Gaussian state sharing the first and second moments of ``v``."""
    det = covariance_matrix(v).det
    if det < 1.0 - 1e-6:
        raise ValueError(f"unphysical covariance matrix, det = {det}")
    return entropy_h(math.sqrt(max(det, 0.0)))


@dataclass(frozen=True)
class WlnResult:
    value: float
    error: float
    converged: bool
    raw: float  # log2 of the integral before flooring


def _wln_setup(source, spec: QuadratureSpec, params_hint: Optional[PadfsParams]):
    if isinstance(source, PadfsParams):
        p = source
        resolved = spec.resolved(p.alpha, default_radius(p.alpha, p.n, p.k, spec.center))
        return (lambda pts: np.abs(wigner_padfs(p, pts))), resolved
    if isinstance(source, DensityMatrix):
        rho = source

        def f(pts):
            return np.abs(wigner_generic(rho, pts))

        if params_hint is not None:
            center = params_hint.alpha if spec.center is None else spec.center
            radius = default_radius(params_hint.alpha, params_hint.n, params_hint.k, center)
        else:
            nbar = rho.mean_photon_number()
            center = 0j if spec.center is None else spec.center
            radius = 5.0 + math.sqrt(2.0 * max(nbar, 0.0)) + 3.0 * math.sqrt(nbar + 1.0)
        return f, spec.resolved(center, radius)
    raise TypeError(f"unsupported source {type(source).__name__}")


def wigner_log_negativity(
    source: Union[PadfsParams, DensityMatrix],
    spec: QuadratureSpec = QuadratureSpec(),
    params_hint: Optional[PadfsParams] = None,
) -> WlnResult:
    """``log2`` of the integral of ``|W|`` over phase space.

    ``params_hint`` lets a mixed state reuse the radius rule of the PADFS it came
    from. Values below the propagated quadrature error (or ``WLN_ABS_FLOOR``) are
    reported as 0.
    """
    f, resolved = _wln_setup(source, spec, params_hint)
    res = integrate_phase_space(f, resolved)
    raw = math.log2(res.value)
    err = res.error / (res.value * math.log(2.0))
    value = raw if raw > max(err, WLN_ABS_FLOOR) else 0.0
    return WlnResult(value=value, error=err, converged=res.converged, raw=raw)


@dataclass(frozen=True)
class MeasureReport:
    linear_entropy: float
    skew_info: float
    wln: float
    rel_entropy_ng: float
    quadrature_error: float
    converged: bool = True

    def __post_init__(self):
        vals = (self.linear_entropy, self.skew_info, self.wln, self.rel_entropy_ng, self.quadrature_error)
        if not all(math.isfinite(x) for x in vals):
            raise ValueError(f"non-finite measure in {self}")


def measure_report(
    params: PadfsParams,
    spec: QuadratureSpec = QuadratureSpec(),
    measures=("LE", "N", "WLN", "delta"),
) -> MeasureReport:
    """Bundle the quantifiers named in ``measures`` for one parameter point (others are left at 0)."""
    v = padfs_coefficients(params)
    le = linear_entropy_potential(v) if "LE" in measures else 0.0
    skew = skew_info_measure(v) if "N" in measures else 0.0
    if "WLN" in measures:
        w = wigner_log_negativity(params, spec)
        wln, err, ok = w.value, w.error, w.converged
    else:
        wln, err, ok = 0.0, 0.0, True
    delta = rel_entropy_non_gaussianity(v) if "delta" in measures else 0.0
    return MeasureReport(le, skew, wln, delta, err, ok)


_SCALAR_MEASURES = {
    "LE": linear_entropy_potential,
    "N": skew_info_measure,
    "delta": rel_entropy_non_gaussianity,
}


def find_inversion(
    measure: str,
    n: int,
    k1: int,
    k2: int,
    bracket: Tuple[float, float],
    tail_tolerance: float = 1e-14,
    tol: float = 1e-3,
) -> float:
    """Real ``alpha`` where ``measure`` for ``k1`` and ``k2`` added photons coincide.

    Plain bisection on the sign of the difference; the bracket must straddle a
    sign change.
    """
    func = _SCALAR_MEASURES[measure]

    def diff(a: float) -> float:
        return func(padfs_coefficients(PadfsParams(a, n, k1, tail_tolerance))) - func(
            padfs_coefficients(PadfsParams(a, n, k2, tail_tolerance))
        )

    lo, hi = float(bracket[0]), float(bracket[1])
    f_lo, f_hi = diff(lo), diff(hi)
    if not f_lo * f_hi < 0:
        raise ValueError(f"no sign change of {measure}(k={k1}) - {measure}(k={k2}) on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = diff(mid)
        if f_mid == 0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
