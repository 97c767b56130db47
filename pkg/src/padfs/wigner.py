"""Wigner functions: closed form for PADFS and the displaced-parity sum for any density matrix.

Convention: ``W(gamma) = (2/pi) Tr[rho D(2 gamma) Pi]`` with ``Pi = (-1)^{a†a}``, so
the vacuum gives ``(2/pi) exp(-2|gamma|^2)`` and ``integral W d^2gamma = 1`` with
``d^2gamma = d(Re gamma) d(Im gamma)``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Union

import numpy as np
from scipy.integrate import trapezoid

from .special_numerics import binomial, laguerre_general
from .states import DensityMatrix, PadfsParams

__all__ = [
    "padfs_norm_squared",
    "wigner_padfs",
    "wigner_generic",
    "wigner_grid",
    "WignerGrid",
    "effective_dim",
]

_TWO_OVER_PI = 2.0 / math.pi


def padfs_norm_squared(alpha: complex, n: int, k: int) -> float:
    """``|| a†^k D(alpha)|n> ||^2`` in closed form.

    Uses ``D† a^k a†^k D = (a + alpha)^k (a† + conj alpha)^k``, giving the finite sum
    ``sum_j C(k, j)^2 |alpha|^(2(k-j)) (n+j)!/n!``. Its inverse is ``|N|^2``.
    """
    x = abs(alpha) ** 2
    total = 0.0
    for j in range(k + 1):
        xpow = x ** (k - j) if k - j else 1.0
        total += binomial(k, j) ** 2 * xpow * math.perm(n + j, j)
    return total


def _cpow(z, e: int):
    # 0**0 := 1
    return np.ones_like(z) if e == 0 else z**e


def wigner_padfs(params: PadfsParams, gamma):
    """Closed-form Wigner function of the PADFS at ``gamma`` (scalar or array).

    W = 2|N|^2/(n! pi) exp(-2|gamma - alpha|^2)
        * [sum_t S_tt P_tt + 2 Re sum_{t' < t} S_t't P_t't]

    with ``eta = 2 gamma - alpha``,
    ``P_t't = (-1)^(k+t) (k+t')! eta^(t-t') L_(k+t')^(t-t')(|eta|^2)`` and
    ``S_t't = C(n,t') C(n,t) conj(alpha)^(n-t') alpha^(n-t)``.
    """
    alpha, n, k = params.alpha, params.n, params.k
    scalar = np.isscalar(gamma)
    gamma = np.asarray(gamma, dtype=complex)
    eta = 2.0 * gamma - alpha
    x = np.abs(eta) ** 2
    astar = alpha.conjugate()

    diag = np.zeros(gamma.shape)
    cross = np.zeros(gamma.shape, dtype=complex)
    for t in range(n + 1):
        for tp in range(t + 1):
            s = binomial(n, tp) * binomial(n, t) * _cpow(astar, n - tp) * _cpow(alpha, n - t)
            if s == 0:
                continue
            d = t - tp
            p = (-1) ** (k + t) * math.factorial(k + tp) * laguerre_general(k + tp, d, x)
            if d == 0:
                diag += (s * p).real
            else:
                cross += s * p * eta**d
    bracket = diag + 2.0 * cross.real
    pref = 2.0 / (padfs_norm_squared(alpha, n, k) * math.factorial(n) * math.pi)
    w = pref * np.exp(-2.0 * np.abs(gamma - alpha) ** 2) * bracket
    return float(w) if scalar else w


def effective_dim(rho: np.ndarray, bound: float = 1e-15) -> int:
    """Smallest ``D`` such that dropping rows/columns ``>= D`` moves W by at most ``bound``.

    Every displaced-parity matrix element has modulus <= 1, so the change is at most
    ``(2/pi) * sum`` of the dropped ``|rho_ij|``.
    """
    a = np.abs(rho)
    dim = a.shape[0]
    # mass[D] = sum of |rho_ij| with max(i, j) >= D
    shell = np.array([a[i, : i + 1].sum() + a[:i, i].sum() for i in range(dim)])
    tail = np.cumsum(shell[::-1])[::-1]
    for d in range(1, dim + 1):
        if d == dim or _TWO_OVER_PI * tail[d] <= bound:
            return d
    return dim


_CHUNK = 1 << 16


def _parity_sum(rho: np.ndarray, beta: np.ndarray) -> np.ndarray:
    # sum_{m,n} rho_mn (-1)^m <n|D(beta)|m> for a flat array of beta, one offset at a time
    dim = rho.shape[0]
    x = np.abs(beta) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(x > 0, beta / np.sqrt(x), 1.0 + 0j)
        logx = np.log(np.where(x > 0, x, 1.0))
    sign = (-1.0) ** np.arange(dim)
    total = np.zeros(beta.shape)
    acc = np.zeros(beta.shape, dtype=complex)
    upow = np.ones(beta.shape, dtype=complex)
    for d in range(dim):
        if d:
            upow = upow * u
        coeff = sign[: dim - d] * np.diagonal(rho, offset=d)
        last = np.flatnonzero(coeff)
        if last.size == 0:
            continue
        rows = last[-1] + 1
        s = radial_displacement_sum(x, logx, d, coeff[:rows])
        if d == 0:
            total += s.real
        else:
            acc += upow * s
    return total + 2.0 * acc.real


def radial_displacement_sum(x: np.ndarray, logx: np.ndarray, d: int, coeff: np.ndarray) -> np.ndarray:
    """``sum_m coeff[m] g_m^d(x)`` with the normalized displacement recurrence run in place.

    Same sequence as :func:`displacement_elements`, keeping only two rows alive.
    """
    if d == 0:
        g_prev = np.exp(-x / 2)
    else:
        g_prev = np.where(x > 0, np.exp(0.5 * d * logx - 0.5 * x - 0.5 * math.lgamma(d + 1)), 0.0)
    out = coeff[0] * g_prev
    if len(coeff) == 1:
        return out
    g_cur = (1.0 + d - x) * g_prev / math.sqrt(1.0 + d)
    out = out + coeff[1] * g_cur
    for m in range(1, len(coeff) - 1):
        g_prev, g_cur = g_cur, (
            (2 * m + 1 + d - x) * g_cur - math.sqrt(m * (m + d)) * g_prev
        ) / math.sqrt((m + 1) * (m + 1 + d))
        out = out + coeff[m + 1] * g_cur
    return out


def wigner_generic(rho: Union[DensityMatrix, np.ndarray], gamma, trim: bool = True):
    """Wigner function of an arbitrary Fock-basis density matrix.

    Evaluates ``(2/pi) sum_{m,n} rho_mn (-1)^m <n|D(2 gamma)|m>``, which is the parity
    sum ``(2/pi) sum_j (-1)^j <j|D†(gamma) rho D(gamma)|j>`` rewritten through
    ``D(gamma) Pi D†(gamma) = D(2 gamma) Pi``; the sum is finite over the support of rho.
    """
    rho = rho.elements if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if trim:
        d_eff = effective_dim(rho)
        rho = rho[:d_eff, :d_eff]
    scalar = np.isscalar(gamma)
    gamma = np.asarray(gamma, dtype=complex)
    flat = 2.0 * gamma.ravel()
    out = np.empty(flat.shape)
    for start in range(0, flat.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        out[sl] = _parity_sum(rho, flat[sl])
    w = _TWO_OVER_PI * out.reshape(gamma.shape)
    return float(w) if scalar else w


@dataclass(frozen=True)
class WignerGrid:
    """Wigner values on a uniform grid; ``values[iy, ix]`` is W(x_axis[ix] + i y_axis[iy])."""

    x_axis: np.ndarray = field(repr=False)
    y_axis: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @property
    def min_value(self) -> float:
        return float(self.values.min())

    @property
    def min_location(self) -> complex:
        iy, ix = np.unravel_index(np.argmin(self.values), self.values.shape)
        return complex(self.x_axis[ix], self.y_axis[iy])

    def integral(self) -> float:
        """Trapezoid estimate of the integral of W over the window."""
        return float(trapezoid(trapezoid(self.values, self.x_axis, axis=1), self.y_axis))

    def write_csv(self, stream: IO[str], comments: Iterable[str] = ()) -> None:
        """Header ``x,y,w`` then one row per node, 17 significant digits.

        ``comments`` are written first as ``# ...`` lines.
        """
        for line in comments:
            stream.write(f"# {line}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["x", "y", "w"])
        for iy, y in enumerate(self.y_axis):
            for ix, x in enumerate(self.x_axis):
                writer.writerow([fmt(x), fmt(y), fmt(self.values[iy, ix])])


def fmt(value: float) -> str:
    """Locale-free 17-significant-digit formatting."""
    return format(float(value), ".17g")


def wigner_grid(
    source: Union[PadfsParams, DensityMatrix],
    window=((-3.0, 3.0), (-3.0, 3.0)),
    resolution: Union[int, tuple] = 121,
) -> WignerGrid:
    """Sample W over a rectangular window.

    ``source`` picks the path: ``PadfsParams`` uses the closed form, a
    ``DensityMatrix`` the parity sum.
    """
    nx, ny = (resolution, resolution) if np.isscalar(resolution) else resolution
    if nx < 2 or ny < 2:
        raise ValueError("resolution must be >= 2 points per axis")
    (x0, x1), (y0, y1) = window
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    pts = xs[None, :] + 1j * ys[:, None]
    if isinstance(source, PadfsParams):
        vals = wigner_padfs(source, pts)
    elif isinstance(source, DensityMatrix):
        vals = wigner_generic(source, pts)
    else:
        raise TypeError(f"unsupported Wigner source {type(source).__name__}")
    return WignerGrid(xs, ys, np.asarray(vals, dtype=float))
