"""Cat states, coherent-state qubits and the squeezed-photon approximation."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._search import golden_section_max, scan_then_golden
from .fock import (
    FockVector,
    _squeezed_series,
    coherent_state,
    cutoff_for,
    squeezed_photon,
)

__all__ = [
    "CatSpec",
    "DegenerateStateError",
    "OptimalSqueezing",
    "QubitSpec",
    "ResourceKind",
    "cat_fidelity_closed",
    "cat_state",
    "optimal_r_numeric",
    "optimal_r_closed_form",
    "qubit_state",
    "squeezed_cutoff",
    "stationary_residual",
]

R_BOUND = 5.0


class DegenerateStateError(ValueError):
    """The requested superposition has (numerically) zero norm."""


@dataclass(frozen=True)
class QubitSpec:
    """``cos(theta)|alpha> + exp(i phi) sin(theta)|-alpha>`` (unnormalized)."""

    alpha: float
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @classmethod
    def from_coefficients(cls, alpha: float, mu: complex, nu: complex) -> QubitSpec:
        """Spec for ``mu|alpha> + nu|-alpha>`` up to a global phase."""
        mu, nu = complex(mu), complex(nu)
        scale = math.hypot(abs(mu), abs(nu))
        if scale == 0:
            raise DegenerateStateError("mu and nu both vanish")
        theta = math.atan2(abs(nu), abs(mu))
        phi = cmath.phase(nu) - cmath.phase(mu) if abs(mu) and abs(nu) else 0.0
        return cls(alpha, theta, phi)

    @property
    def mu(self) -> complex:
        return complex(math.cos(self.theta))

    @property
    def nu(self) -> complex:
        return cmath.exp(1j * self.phi) * math.sin(self.theta)

    @property
    def norm_sq(self) -> float:
        """Squared norm of ``mu|a> + nu|-a>`` for untruncated coherent states."""
        mu, nu = self.mu, self.nu
        overlap = math.exp(-2 * self.alpha**2)
        return abs(mu) ** 2 + abs(nu) ** 2 + 2 * overlap * (nu * mu.conjugate()).real

    def z_flipped(self) -> QubitSpec:
        """``mu|a> - nu|-a>``."""
        return QubitSpec(self.alpha, self.theta, self.phi + math.pi)


@dataclass(frozen=True)
class CatSpec:
    alpha: float
    parity: str = "odd"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.parity not in ("odd", "even"):
            raise ValueError(f"parity must be 'odd' or 'even', got {self.parity!r}")

    @property
    def norm_sq(self) -> float:
        x = math.exp(-2 * self.alpha**2)
        return 2 - 2 * x if self.parity == "odd" else 2 + 2 * x


def cat_state(spec: CatSpec, dim: int) -> FockVector:
    """``|a> - |-a>`` (odd) or ``|a> + |-a>`` (even), normalized."""
    coh = coherent_state(spec.alpha, dim)
    n = np.arange(dim)
    keep = (n % 2 == 1) if spec.parity == "odd" else (n % 2 == 0)
    amps = np.where(keep, 2 * coh.amps, 0)
    return FockVector(amps, coh.deficit).normalized()


def qubit_state(spec: QubitSpec, dim: int) -> FockVector:
    if spec.norm_sq < 1e-12:
        raise DegenerateStateError(
            f"qubit normalization {spec.norm_sq:.3e} vanishes (alpha={spec.alpha})"
        )
    plus = coherent_state(spec.alpha, dim)
    sign = (-1.0) ** np.arange(dim)
    amps = spec.mu * plus.amps + spec.nu * sign * plus.amps
    return FockVector(amps, plus.deficit).normalized()


def cat_fidelity_closed(alpha: float, r: float) -> float:
    """Fidelity of ``S(r)|1>`` with the normalized odd cat of size ``alpha``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    a2 = alpha * alpha
    return (
        math.exp(-a2) / (-2 * math.expm1(-2 * a2))
        * 4 * a2 / math.cosh(r) ** 3
        * math.exp(-a2 * math.tanh(r))
    )


def optimal_r_closed_form(alpha: float) -> float:
    """The closed-form squeezing with ``4 alpha^2`` under the inner root.

    Non-negative as written, and stationary for the cat fidelity only at
    ``alpha = 1`` (see :func:`stationary_residual`).
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    return math.acosh(math.sqrt(0.5 + math.sqrt(9 + 4 * alpha**2) / 6))


def stationary_residual(alpha: float, r: float) -> float:
    """``alpha^2 tanh^2 r - 3 tanh r - alpha^2``; zero at the fidelity optimum."""
    t = math.tanh(r)
    return alpha**2 * t * t - 3 * t - alpha**2


def _log_fidelity(alpha: float, r: float) -> float:
    return -3 * math.log(math.cosh(r)) - alpha**2 * math.tanh(r)


def _log_fidelity_ratio(alpha: float, r: float, ref: float) -> float:
    # log F(r) - log F(ref) without cancellation when r is close to ref
    d = r - ref
    x = math.tanh(ref) * math.sinh(d) + 2 * math.sinh(0.5 * d) ** 2
    return -3 * math.log1p(x) - alpha**2 * math.sinh(d) / (math.cosh(r) * math.cosh(ref))


class OptimalSqueezing(NamedTuple):
    r: float
    fidelity: float


def optimal_r_numeric(alpha: float, tol: float = 1e-9) -> OptimalSqueezing:
    """Signed squeezing maximizing :func:`cat_fidelity_closed` on [-5, 5].

    A 0.01 scan brackets the optimum and golden-section search narrows it.
    The last stage maximizes the log-fidelity relative to the current
    estimate, which stays resolvable well below ``sqrt(eps)``.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if alpha == 0:
        return OptimalSqueezing(0.0, 1.0)
    r1, _ = scan_then_golden(lambda r: _log_fidelity(alpha, r), -R_BOUND, R_BOUND, 0.01, 1e-7)
    half = 1e-6
    r2, _ = golden_section_max(
        lambda r: _log_fidelity_ratio(alpha, r, r1), r1 - half, r1 + half, min(tol, 1e-12)
    )
    return OptimalSqueezing(r2, cat_fidelity_closed(alpha, r2))


def squeezed_cutoff(r: float, tol: float = 1e-13) -> int:
    """Smallest cutoff leaving less than ``tol`` of ``S(r)|1>`` truncated."""
    dim = 32
    while True:
        amps = _squeezed_series(r, dim, 1)
        cum = np.cumsum(np.abs(amps) ** 2)
        hit = np.nonzero(cum >= 1 - tol)[0]
        if hit.size:
            return int(hit[0]) + 1
        if dim > 4096:
            raise ValueError(f"squeezing r={r} needs an impractical cutoff")
        dim *= 2


@dataclass(frozen=True)
class ResourceKind:
    """Source of odd-cat resources: exact cats or squeezed single photons.

    For ``squeezed_photon`` a fixed ``r`` is used as given; with ``r=None``
    the squeezing is chosen per cat size from ``r_policy`` (``"numeric"``:
    maximize the closed-form fidelity, ``"closed_form"``:
    :func:`optimal_r_closed_form`, sign-adjusted to the constructive branch).
    """

    variant: str = "exact_cat"
    r: float | None = None
    r_policy: str = "numeric"

    def __post_init__(self):
        if self.variant not in ("exact_cat", "squeezed_photon"):
            raise ValueError(f"unknown resource variant {self.variant!r}")
        if self.r_policy not in ("numeric", "closed_form"):
            raise ValueError(f"unknown r policy {self.r_policy!r}")
        if self.r is not None and not math.isfinite(self.r):
            raise ValueError("r must be finite")

    @classmethod
    def exact_cat(cls) -> ResourceKind:
        return cls("exact_cat")

    @classmethod
    def squeezed(cls, r: float | None = None, r_policy: str = "numeric") -> ResourceKind:
        return cls("squeezed_photon", r, r_policy)

    @property
    def is_exact(self) -> bool:
        return self.variant == "exact_cat"

    def squeezing(self, alpha_cat: float) -> float | None:
        if self.is_exact:
            return None
        if self.r is not None:
            return self.r
        if self.r_policy == "closed_form":
            return -optimal_r_closed_form(alpha_cat)
        return optimal_r_numeric(alpha_cat).r

    def odd_state(self, alpha_cat: float, dim: int) -> FockVector:
        """Exact odd cat of size ``alpha_cat`` or its squeezed-photon stand-in."""
        if self.is_exact:
            return cat_state(CatSpec(alpha_cat, "odd"), dim)
        return squeezed_photon(self.squeezing(alpha_cat), dim)

    def cutoff(self, alpha_cat: float) -> int:
        """Cutoff that holds the odd state with room for beamsplitter mixing."""
        d = cutoff_for(alpha_cat)
        if not self.is_exact:
            d = max(d, squeezed_cutoff(self.squeezing(alpha_cat)) + 8)
        return d
