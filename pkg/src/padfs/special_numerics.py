"""Special functions and the 2-D phase-space quadrature used across the package.

Laguerre polynomials with integer (possibly negative) superscript, log-factorials,
normalized displaced-Fock matrix elements, and a grid-doubling midpoint rule over
a disk in the complex plane.
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln

__all__ = [
    "QuadratureSpec",
    "QuadratureResult",
    "laguerre_general",
    "laguerre_recurrence",
    "log_factorial",
    "generalized_binomial",
    "binomial",
    "displacement_elements",
    "integrate_phase_space",
    "default_radius",
]


def log_factorial(n: int) -> float:
    """Natural log of ``n!``.

    Exact integer factorial is used up to 20 so the result is correctly rounded there;
    larger arguments go through ``lgamma``.
    """
    n = int(n)
    if n < 0:
        raise ValueError(f"log_factorial needs n >= 0, got {n}")
    if n <= 20:
        return math.log(math.factorial(n))
    return math.lgamma(n + 1)


def generalized_binomial(top: int, j: int) -> float:
    """Binomial C(top, j) for any integer ``top`` and ``j >= 0`` via the falling product.

    Negative ``top`` is allowed (no gamma poles); ``j < 0`` gives 0.
    """
    if j < 0:
        return 0.0
    num = 1
    for r in range(j):
        num *= top - r
    return num / math.factorial(j)


def binomial(n: int, j: int) -> int:
    """Ordinary binomial with C(n, j) = 0 outside ``0 <= j <= n``."""
    if j < 0 or n < 0 or j > n:
        return 0
    return math.comb(n, j)


def laguerre_general(n: int, a: int, x):
    """Associated Laguerre polynomial L_n^a(x) for integer ``a`` of either sign.

    Defined by the finite series
    ``sum_i (-1)^i C(n+a, n-i) x^i / i!`` with generalized binomials, so negative
    superscripts need no special casing. A scalar ``x`` is summed in exact rational
    arithmetic, which removes the cancellation of the alternating series and gives
    a correctly rounded result. For an ndarray ``x`` the stable degree recurrence
    is used when ``a >= 0`` and the float series otherwise.
    """
    n = int(n)
    a = int(a)
    if n < 0:
        raise ValueError(f"Laguerre degree must be >= 0, got {n}")
    if np.ndim(x) == 0:
        return _laguerre_exact(n, a, float(x))
    x = np.asarray(x, dtype=float)
    if a >= 0:
        return laguerre_recurrence(n, a, x)
    coeffs = [
        (-1) ** i * generalized_binomial(n + a, n - i) / math.factorial(i)
        for i in range(n + 1)
    ]
    out = np.full_like(x, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        out = out * x + c
    return out


def _laguerre_exact(n: int, a: int, x: float) -> float:
    if not math.isfinite(x):
        raise ValueError(f"Laguerre argument must be finite, got {x}")
    xq = Fraction(x)
    total = Fraction(0)
    power = Fraction(1)
    for i in range(n + 1):
        j = n - i
        num = 1
        for r in range(j):
            num *= n + a - r
        total += Fraction((-1) ** i * num, math.factorial(j) * math.factorial(i)) * power
        power *= xq
    return float(total)


def laguerre_recurrence(n: int, a: int, x):
    """L_n^a(x) from the three-term recurrence in the degree (``a >= 0`` only).

    Numerically stable where the series is not; used as a cross-check and for
    high-degree evaluations.
    """
    if n < 0:
        raise ValueError(f"Laguerre degree must be >= 0, got {n}")
    if a < 0:
        raise ValueError("laguerre_recurrence requires a >= 0")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + a - x
    for m in range(1, n):
        prev, cur = cur, ((2 * m + 1 + a - x) * cur - (m + a) * prev) / (m + 1)
    return cur if np.ndim(cur) else float(cur)


def displacement_elements(beta, dim: int, max_offset: Optional[int] = None):
    """Normalized radial parts of the displacement-operator matrix elements.

    For every offset ``d`` and row ``m`` with ``m + d < dim`` returns

        g[d][m] = sqrt(m!/(m+d)!) |beta|^d exp(-|beta|^2/2) L_m^d(|beta|^2),

    so that ``<m+d|D(beta)|m> = u^d g[d][m]`` and ``<m|D(beta)|m+d> = (-conj(u))^d g[d][m]``
    with ``u = beta/|beta|``. The starting value is built in log space and the
    degree recurrence is run on the normalized sequence, so nothing overflows for
    ``dim`` in the hundreds. ``beta`` may be an array; each ``g[d]`` then has
    shape ``(dim - d,) + beta.shape``.

    Returns ``(g, u)``.
    """
    beta = np.asarray(beta, dtype=complex)
    x = np.abs(beta) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(x > 0, beta / np.sqrt(x), 1.0 + 0j)
        logx = np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), -np.inf)
    if max_offset is None:
        max_offset = dim - 1
    g = []
    for d in range(min(max_offset, dim - 1) + 1):
        rows = dim - d
        out = np.empty((rows,) + x.shape)
        if d == 0:
            g0 = np.exp(-x / 2)
        else:
            with np.errstate(invalid="ignore"):
                g0 = np.where(x > 0, np.exp(0.5 * d * logx - 0.5 * x - 0.5 * gammaln(d + 1)), 0.0)
        out[0] = g0
        if rows > 1:
            out[1] = (1.0 + d - x) * g0 / math.sqrt(1.0 + d)
        for m in range(1, rows - 1):
            out[m + 1] = (
                (2 * m + 1 + d - x) * out[m] - math.sqrt(m * (m + d)) * out[m - 1]
            ) / math.sqrt((m + 1) * (m + 1 + d))
        g.append(out)
    return g, u


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for :func:`integrate_phase_space`.

    ``center`` and ``radius`` may be left as ``None`` by callers that apply a
    state-dependent default (see :func:`default_radius`). Grid level ``l`` uses
    ``base_points * 2**l`` midpoints per axis for ``l = 0..refinement_levels``;
    at least ``min_levels`` doublings are done before convergence can be declared.
    """

    center: Optional[complex] = None
    radius: Optional[float] = None
    refinement_levels: int = 4
    rel_tolerance: float = 1e-4
    base_points: int = 64
    min_levels: int = 1

    def __post_init__(self):
        if self.radius is not None and not self.radius > 0:
            raise ValueError(f"radius must be > 0, got {self.radius}")
        if not self.rel_tolerance > 0:
            raise ValueError(f"rel_tolerance must be > 0, got {self.rel_tolerance}")
        if self.refinement_levels < 1:
            raise ValueError("refinement_levels must be a positive integer")
        if self.base_points < 2:
            raise ValueError("base_points must be >= 2")
        if not 1 <= self.min_levels <= self.refinement_levels:
            raise ValueError("min_levels must lie in [1, refinement_levels]")

    def resolved(self, center: complex, radius: float) -> "QuadratureSpec":
        """Fill in missing center/radius with the given defaults."""
        return replace(
            self,
            center=complex(center) if self.center is None else self.center,
            radius=float(radius) if self.radius is None else self.radius,
        )


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    converged: bool
    levels_used: int


def default_radius(alpha: complex, n: int, k: int, center: Optional[complex] = None) -> float:
    """Integration cutoff that puts the exp(-2|gamma - alpha|^2) tail below ~1e-10."""
    offset = 0.0 if center is None else abs(complex(center) - complex(alpha))
    return 5.0 + offset + math.sqrt(2.0 * (k + n + abs(alpha) ** 2))


def _midpoint_disk(f, center: complex, radius: float, npts: int) -> float:
    h = 2.0 * radius / npts
    offs = -radius + h * (np.arange(npts) + 0.5)
    xx, yy = np.meshgrid(offs, offs, indexing="xy")
    inside = xx**2 + yy**2 <= radius**2
    pts = (center.real + xx[inside]) + 1j * (center.imag + yy[inside])
    vals = np.asarray(f(pts), dtype=float)
    return float(vals.sum() * h * h)


def integrate_phase_space(f: Callable[[np.ndarray], np.ndarray], spec: QuadratureSpec) -> QuadratureResult:
    """Integrate ``f`` over the disk ``|gamma - center| <= radius`` with d^2gamma = dx dy.

    ``f`` takes a 1-D complex array of points and returns real values; it must be
    free of side effects. Tensor midpoint rule on the bounding square, doubling the
    resolution until two successive estimates agree to ``rel_tolerance``. The
    returned error is the last difference; ``converged`` is False when the level
    budget ran out first (the finest value is still returned).
    """
    if spec.center is None or spec.radius is None:
        raise ValueError("QuadratureSpec needs center and radius; call spec.resolved(...) first")
    center = complex(spec.center)
    prev = _midpoint_disk(f, center, spec.radius, spec.base_points)
    err = math.inf
    for level in range(1, spec.refinement_levels + 1):
        cur = _midpoint_disk(f, center, spec.radius, spec.base_points * 2**level)
        err = abs(cur - prev)
        prev = cur
        if level >= spec.min_levels and err <= spec.rel_tolerance * max(abs(cur), 1e-300):
            return QuadratureResult(cur, err, True, level)
    return QuadratureResult(prev, err, False, spec.refinement_levels)
