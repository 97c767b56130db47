"""Photon-added displaced Fock states in a truncated photon-number basis.

The unnormalized amplitude on ``|m + k>`` is

    sqrt(n! (m+k)!) / m! * alpha^(m-n) * L_n^(m-n)(|alpha|^2) * exp(-|alpha|^2 / 2)

which is ``a†^k D(alpha) |n>`` written out in the Fock basis. For ``m < n`` the
negative-superscript identity turns this into ``(-conj(alpha))^(n-m) m!/n! L_m^(n-m)``
so no negative powers of ``alpha`` are formed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .special_numerics import laguerre_general, log_factorial

__all__ = [
    "PadfsParams",
    "FockVector",
    "DensityMatrix",
    "padfs_coefficients",
    "limiting_state",
    "to_density_matrix",
    "unnormalized_amplitude",
]

DEFAULT_TAIL_TOL = 1e-14


@dataclass(frozen=True)
class PadfsParams:
    """State triple: displacement ``alpha``, Fock parameter ``n``, added photons ``k``."""

    alpha: complex = 0j
    n: int = 0
    k: int = 0
    tail_tolerance: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"Fock parameter n must be a nonnegative integer, got {self.n}")
        if int(self.k) != self.k or self.k < 0:
            raise ValueError(f"photon addition k must be a nonnegative integer, got {self.k}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        if not 0 < self.tail_tolerance <= 1e-6:
            raise ValueError(f"tail_tolerance must be in (0, 1e-6], got {self.tail_tolerance}")


@dataclass(frozen=True)
class FockVector:
    """Pure state with ``amps[j] = <offset + j|psi>``.

    ``truncation`` is the highest retained photon number.
    """

    offset: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def truncation(self) -> int:
        return self.offset + len(self.amps) - 1

    @property
    def dim(self) -> int:
        """Smallest Fock dimension holding the state."""
        return self.truncation + 1

    def full(self, dim: int | None = None) -> np.ndarray:
        """Amplitudes embedded in ``|0>..|dim-1>``."""
        dim = self.dim if dim is None else dim
        if dim < self.dim:
            raise ValueError(f"dim {dim} too small for a state reaching photon number {self.truncation}")
        out = np.zeros(dim, dtype=complex)
        out[self.offset : self.dim] = self.amps
        return out

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))


@dataclass(frozen=True)
class DensityMatrix:
    elements: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.array(self.elements, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        rho.setflags(write=False)
        object.__setattr__(self, "elements", rho)

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.elements).real)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.elements.conj().T, self.elements)))

    def mean_photon_number(self) -> float:
        return float(np.real(np.diag(self.elements) @ np.arange(self.dim)))

    def check(self, atol: float = 1e-10) -> None:
        """Raise if not Hermitian, unit trace and positive semidefinite."""
        rho = self.elements
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(self.trace() - 1.0) > atol:
            raise ValueError(f"density matrix trace {self.trace()} != 1")
        if np.linalg.eigvalsh(rho).min() < -atol:
            raise ValueError("density matrix has negative eigenvalues")


def unnormalized_amplitude(m: int, alpha: complex, n: int, k: int) -> complex:
    """Amplitude of ``a†^k D(alpha)|n>`` on ``|m + k>`` (before normalization).

    Magnitudes of the factorial/power prefactor are accumulated in log space.
    """
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    if alpha == 0:
        return 1.0 + 0j if m == n else 0j
    log_pref = 0.5 * (log_factorial(n) + log_factorial(m + k)) - log_factorial(m) - 0.5 * x
    phase = alpha / abs(alpha)
    if m >= n:
        d = m - n
        lag = laguerre_general(n, d, x)
        power = phase**d
    else:
        d = n - m
        # alpha^(m-n) L_n^(m-n)(x) = (-conj alpha)^d m!/n! L_m^d(x)
        lag = laguerre_general(m, d, x)
        power = (-phase.conjugate()) ** d
        log_pref += log_factorial(m) - log_factorial(n)
    log_pref += d * math.log(abs(alpha))
    return complex(math.exp(log_pref) * lag * power)


def padfs_coefficients(params: PadfsParams) -> FockVector:
    """Normalized PADFS amplitudes, truncated once the tail is below ``tail_tolerance``.

    Starts from ``k + n + ceil(|alpha|^2 + 10|alpha| + 30)`` retained terms and keeps
    extending while the next normalized probability is above tolerance.
    """
    alpha, n, k, tol = params.alpha, params.n, params.k, params.tail_tolerance
    if alpha == 0:
        return FockVector(offset=n + k, amps=[1.0])
    r = abs(alpha)
    count = n + math.ceil(r * r + 10 * r + 30) + 1
    amps = [unnormalized_amplitude(m, alpha, n, k) for m in range(count)]
    norm2 = sum(abs(a) ** 2 for a in amps)
    while True:
        nxt = unnormalized_amplitude(len(amps), alpha, n, k)
        if abs(nxt) ** 2 < tol * norm2 and abs(amps[-1]) ** 2 < tol * norm2:
            break
        amps.append(nxt)
        norm2 += abs(nxt) ** 2
    vec = np.array(amps) / math.sqrt(norm2)
    return FockVector(offset=k, amps=vec)


_FAMILIES = {
    "vacuum": lambda: (0.0, 0, 0),
    "fock": lambda n: (0.0, n, 0),
    "coherent": lambda alpha: (alpha, 0, 0),
    "dfs": lambda alpha, n: (alpha, n, 0),
    "pacs": lambda alpha, k: (alpha, 0, k),
    "padfs": lambda alpha, n, k: (alpha, n, k),
}


def limiting_state(name: str, *args, tail_tolerance: float = DEFAULT_TAIL_TOL) -> FockVector:
    """Named special case of the PADFS family.

    ``limiting_state("fock", 3)``, ``limiting_state("coherent", 0.7)``,
    ``limiting_state("dfs", alpha, n)``, ``limiting_state("pacs", alpha, k)``,
    ``limiting_state("vacuum")``.
    """
    try:
        build = _FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown state family {name!r}; choose from {sorted(_FAMILIES)}") from None
    alpha, n, k = build(*args)
    if name in ("vacuum", "fock"):
        return FockVector(offset=n, amps=[1.0])
    return padfs_coefficients(PadfsParams(alpha, n, k, tail_tolerance))


def family_params(name: str, *args, tail_tolerance: float = DEFAULT_TAIL_TOL) -> PadfsParams:
    """The ``PadfsParams`` a named family maps to."""
    if name not in _FAMILIES:
        raise ValueError(f"unknown state family {name!r}")
    alpha, n, k = _FAMILIES[name](*args)
    return PadfsParams(alpha, n, k, tail_tolerance)


def to_density_matrix(v: FockVector, dim: int | None = None) -> DensityMatrix:
    """|psi><psi| embedded in a ``dim``-dimensional Fock space."""
    psi = v.full(dim)
    return DensityMatrix(np.outer(psi, psi.conj()))
