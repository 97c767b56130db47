"""Photon loss (amplitude damping at zero temperature) and its effect on Wigner negativity."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from .measures import WLN_ABS_FLOOR, WlnResult, wigner_log_negativity
from .special_numerics import QuadratureSpec, default_radius, integrate_phase_space
from .states import DensityMatrix, PadfsParams, padfs_coefficients, to_density_matrix
from .wigner import wigner_generic, wigner_padfs

__all__ = [
    "LossParams",
    "evolve_loss",
    "noisy_wigner",
    "noisy_wigner_convolution",
    "wln_decay_curve",
    "wln_threshold",
    "wigner_at_origin_witness",
    "THRESHOLD_UPPER_BOUND",
]

# at T = 1/2 every evolved Wigner function is a rescaled Husimi Q, hence >= 0
THRESHOLD_UPPER_BOUND = 0.5 * math.log(2.0)


@dataclass(frozen=True)
class LossParams:
    """Rescaled loss time ``kappa t``; ``T = 1 - exp(-2 kappa t)`` and efficiency ``1 - T``."""

    kappa_t: float = 0.0

    def __post_init__(self):
        if not self.kappa_t >= 0 or not math.isfinite(self.kappa_t):
            raise ValueError(f"kappa_t must be a finite nonnegative number, got {self.kappa_t}")

    @property
    def T(self) -> float:
        return -math.expm1(-2.0 * self.kappa_t)

    @property
    def efficiency(self) -> float:
        return math.exp(-2.0 * self.kappa_t)


def evolve_loss(rho: DensityMatrix, loss: LossParams) -> DensityMatrix:
    """Apply the loss channel with Kraus operators
    ``<m-j|A_j|m> = sqrt(C(m, j)) exp(-kappa_t (m - j)) T^(j/2)``.
    """
    if loss.kappa_t == 0:
        return rho
    r = rho.elements
    dim = r.shape[0]
    kt = loss.kappa_t
    T = loss.T
    out = np.zeros_like(r)
    ms = np.arange(dim)
    log_t = math.log(T)
    for j in range(dim):
        m = ms[j:]
        logf = 0.5 * (gammaln(m + 1) - gammaln(j + 1) - gammaln(m - j + 1)) - kt * (m - j) + 0.5 * j * log_t
        f = np.exp(logf)
        if f.max() < 1e-300:
            break
        out[: dim - j, : dim - j] += np.outer(f, f) * r[j:, j:]
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out)


def noisy_wigner(params: PadfsParams, loss: LossParams, gamma):
    """Wigner function of the PADFS after loss, via Kraus evolution and the parity sum."""
    if loss.kappa_t == 0:
        return wigner_padfs(params, gamma)
    rho = evolve_loss(to_density_matrix(padfs_coefficients(params)), loss)
    return wigner_generic(rho, gamma)


def noisy_wigner_convolution(params: PadfsParams, loss: LossParams, zeta: complex, rel_tolerance: float = 1e-10) -> float:
    """Evolved Wigner function at one point as a Gaussian smoothing of the initial one.

    ``W(zeta, t) = (2/T) integral d^2gamma/pi exp(-(2/T)|zeta - gamma e^-kt|^2) W(gamma, 0)``;
    used to cross-check :func:`noisy_wigner`.
    """
    if loss.kappa_t == 0:
        return wigner_padfs(params, zeta)
    T = loss.T
    shrink = math.exp(-loss.kappa_t)
    width = math.sqrt(T / 4.0) / shrink
    center = complex(zeta) / shrink

    def integrand(g):
        kern = np.exp(-(2.0 / T) * np.abs(zeta - g * shrink) ** 2)
        return (2.0 / (T * math.pi)) * kern * wigner_padfs(params, g)

    spec = QuadratureSpec(center=center, radius=8.0 * width, refinement_levels=5, rel_tolerance=rel_tolerance, base_points=32)
    return integrate_phase_space(integrand, spec).value


def _evolved_spec(params: PadfsParams, loss: LossParams, spec: QuadratureSpec) -> QuadratureSpec:
    center = params.alpha * math.exp(-loss.kappa_t) if spec.center is None else spec.center
    radius = default_radius(params.alpha, params.n, params.k, center) if spec.radius is None else spec.radius
    return replace(spec, center=center, radius=radius)


def _wln_at(params: PadfsParams, rho0: DensityMatrix, kappa_t: float, spec: QuadratureSpec) -> WlnResult:
    loss = LossParams(kappa_t)
    rho = evolve_loss(rho0, loss)
    return wigner_log_negativity(rho, _evolved_spec(params, loss, spec))


def wln_decay_curve(
    params: PadfsParams, kt_grid: Sequence[float], spec: QuadratureSpec = QuadratureSpec()
) -> List[Tuple[float, WlnResult]]:
    """Wigner logarithmic negativity of the evolved state at each ``kappa t``."""
    kts = [float(x) for x in kt_grid]
    if any(b < a for a, b in zip(kts, kts[1:])):
        raise ValueError("kt_grid must be sorted ascending")
    rho0 = to_density_matrix(padfs_coefficients(params))
    return [(kt, _wln_at(params, rho0, kt, spec)) for kt in kts]


def _is_negative(w: WlnResult) -> bool:
    return w.raw > max(3.0 * w.error, WLN_ABS_FLOOR)


def wln_threshold(params: PadfsParams, spec: QuadratureSpec = QuadratureSpec(), tol: float = 1e-3) -> float:
    """Smallest ``kappa t`` beyond which the Wigner negativity is lost, by bisection.

    A point counts as negative while its WLN exceeds three times the quadrature
    error estimate. Every refinement level is evaluated so a small negative
    region cannot slip through a coarse grid.
    """
    spec = replace(spec, min_levels=spec.refinement_levels)
    rho0 = to_density_matrix(padfs_coefficients(params))
    if not _is_negative(_wln_at(params, rho0, 0.0, spec)):
        raise ValueError("state has no Wigner negativity at kappa_t = 0")
    lo, hi = 0.0, THRESHOLD_UPPER_BOUND + 0.01
    while _is_negative(_wln_at(params, rho0, hi, spec)):
        lo, hi = hi, 2.0 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _is_negative(_wln_at(params, rho0, mid, spec)):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def wigner_at_origin_witness(rho: DensityMatrix) -> float:
    """``W(0)``: ``(2/pi)`` times the mean photon-number parity."""
    return wigner_generic(rho, 0.0)
