"""Linear algebra on truncated multimode Fock spaces.

States are stored as dense complex arrays with one axis per mode, so that
``amps[n1, n2, ...]`` is the amplitude of ``|n1, n2, ...>``.  Every operation
returns a new value; arrays held by :class:`FockVector` and
:class:`MixedState` are marked read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse

__all__ = [
    "BeamsplitterSpec",
    "Conditioned",
    "CutoffError",
    "FockVector",
    "HeadroomError",
    "MixedState",
    "TruncationLeakError",
    "apply_beamsplitter",
    "apply_displacement",
    "apply_phase_rotation",
    "coherent_state",
    "condition_on_outcome",
    "cutoff_for",
    "fidelity",
    "fock_state",
    "squeezed_photon",
    "squeezed_vacuum",
    "tensor",
]

DEFICIT_TOL = 1e-10
LEAK_TOL = 1e-12
HEADROOM_TOL = 1e-8
EMPTY_TOL = 1e-14


class CutoffError(ValueError):
    """The truncation dimension is too small for the requested state."""


class TruncationLeakError(CutoffError):
    """A two-mode coupling would move population above the cutoff."""


class HeadroomError(CutoffError):
    """A displacement pushed population above the cutoff."""


def cutoff_for(beta_max: float) -> int:
    """Per-mode cutoff for coherent amplitudes up to ``beta_max``.

    Keeps Poisson tails below 1e-12 for the amplitudes used here.
    """
    b = abs(beta_max)
    return max(24, math.ceil(b * b + 7 * b + 12))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class FockVector:
    """Pure state on one or more truncated modes.

    Attributes:
        amps: complex array, one axis per mode; axis length is that mode's
            cutoff dimension.
        deficit: probability lost to truncation while building this state.
    """

    amps: np.ndarray
    deficit: float = 0.0

    def __post_init__(self):
        amps = _frozen(self.amps)
        if amps.ndim == 0 or min(amps.shape) < 1:
            raise ValueError(f"invalid mode dimensions {amps.shape}")
        object.__setattr__(self, "amps", amps)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.amps.shape

    @property
    def n_modes(self) -> int:
        return self.amps.ndim

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))

    def normalized(self) -> FockVector:
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return FockVector(self.amps / n, self.deficit)

    def inner(self, other: FockVector) -> complex:
        """Return ``<self|other>``."""
        if self.dims != other.dims:
            raise ValueError(f"dimension mismatch {self.dims} vs {other.dims}")
        return complex(np.vdot(self.amps, other.amps))

    def resized(self, dims: int | Sequence[int]) -> FockVector:
        """Zero-pad or cut each mode to ``dims``.

        Cutting discards amplitude; the discarded probability is added to
        ``deficit``.
        """
        if isinstance(dims, (int, np.integer)):
            dims = (int(dims),) * self.n_modes
        dims = tuple(int(d) for d in dims)
        if len(dims) != self.n_modes:
            raise ValueError("one dimension per mode required")
        out = np.zeros(dims, dtype=complex)
        keep = tuple(slice(0, min(a, b)) for a, b in zip(dims, self.dims))
        out[keep] = self.amps[keep]
        lost = np.vdot(self.amps, self.amps).real - np.vdot(out, out).real
        return FockVector(out, self.deficit + max(lost, 0.0))


@dataclass(frozen=True, eq=False)
class MixedState:
    """Density operator of a single truncated mode."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_pure(cls, state: FockVector) -> MixedState:
        if state.n_modes != 1:
            raise ValueError("MixedState holds a single mode")
        v = state.amps
        return cls(np.outer(v, v.conj()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalized(self) -> MixedState:
        t = self.trace()
        if t <= 0.0:
            raise ValueError("cannot normalize a traceless operator")
        return MixedState(self.matrix / t)

    def purity(self) -> float:
        rho = self.normalized().matrix
        return float(np.vdot(rho, rho).real)

    def eigenvalues(self) -> np.ndarray:
        h = 0.5 * (self.matrix + self.matrix.conj().T)
        return np.linalg.eigvalsh(h)

    def check(self, atol: float = 1e-10) -> None:
        """Raise ``ValueError`` unless Hermitian, unit trace and positive."""
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > atol:
            raise ValueError("density matrix is not Hermitian")
        if abs(self.trace() - 1.0) > 1e-9:
            raise ValueError(f"trace {self.trace()} differs from 1")
        if self.eigenvalues().min() < -1e-9:
            raise ValueError("density matrix has negative eigenvalues")


def _finish(amps: np.ndarray) -> FockVector:
    """Renormalize a truncated expansion, enforcing the deficit bound."""
    kept = float(np.vdot(amps, amps).real)
    deficit = max(1.0 - kept, 0.0)
    if deficit > DEFICIT_TOL:
        raise CutoffError(
            f"cutoff {amps.shape[0]} too small: truncation deficit {deficit:.3e}"
            f" exceeds {DEFICIT_TOL:g}"
        )
    return FockVector(amps / math.sqrt(kept), deficit)


def fock_state(n: int, dim: int) -> FockVector:
    if not 0 <= n < dim:
        raise CutoffError(f"photon number {n} needs dim > {n}, got {dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return FockVector(amps)


def coherent_state(beta: complex, dim: int) -> FockVector:
    """Coherent state ``|beta>`` truncated to ``dim`` photon numbers."""
    amps = np.empty(dim, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(beta) ** 2)
    for n in range(1, dim):
        amps[n] = amps[n - 1] * beta / math.sqrt(n)
    return _finish(amps)


def _squeezed_series(r: float, dim: int, offset: int) -> np.ndarray:
    if abs(r) > 5:
        raise ValueError(f"|r| must not exceed 5, got {r}")
    t = -math.tanh(r)
    amps = np.zeros(dim, dtype=complex)
    if offset >= dim:
        return amps
    # offset 0: S(r)|0>, offset 1: S(r)|1>
    c = math.cosh(r) ** -(0.5 + offset)
    amps[offset] = c
    n = 1
    while 2 * n + offset < dim:
        c *= t * math.sqrt((2 * n - 1 + 2 * offset) / (2 * n))
        amps[2 * n + offset] = c
        n += 1
    return amps


def squeezed_vacuum(r: float, dim: int) -> FockVector:
    """``S(r)|0>`` with ``S(r) = exp[(r/2)(a^2 - a^dag^2)]``; r is signed."""
    return _finish(_squeezed_series(r, dim, 0))


def squeezed_photon(r: float, dim: int) -> FockVector:
    """``S(r)|1>``; only odd photon numbers are populated."""
    if dim < 2:
        raise CutoffError("a squeezed photon needs dim >= 2")
    return _finish(_squeezed_series(r, dim, 1))


def tensor(states: Sequence[FockVector]) -> FockVector:
    if not states:
        raise ValueError("need at least one state")
    amps = states[0].amps
    kept = 1.0 - states[0].deficit
    for s in states[1:]:
        amps = np.multiply.outer(amps, s.amps)
        kept *= 1.0 - s.deficit
    return FockVector(amps, 1.0 - kept)


@dataclass(frozen=True)
class BeamsplitterSpec:
    """Two-mode coupler.

    ``real-5050`` maps coherent amplitudes as
    ``(b1, b2) -> (b1 cos t - b2 sin t, b1 sin t + b2 cos t)``, so at
    ``t = pi/4`` the input ``|a, a>`` leaves as ``|0, sqrt(2) a>``.
    ``symmetric`` maps ``(b1, b2) -> (b1 cos t + i b2 sin t, i b1 sin t + b2 cos t)``.
    """

    theta: float = math.pi / 4
    convention: str = "real-5050"

    def __post_init__(self):
        if self.convention not in ("real-5050", "symmetric"):
            raise ValueError(f"unknown beamsplitter convention {self.convention!r}")
        if not 0.0 <= self.theta <= math.pi / 2:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")

    def mode_matrix(self) -> np.ndarray:
        """2x2 unitary acting on the coherent amplitudes."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        if self.convention == "real-5050":
            return np.array([[c, -s], [s, c]], dtype=complex)
        return np.array([[c, 1j * s], [1j * s, c]], dtype=complex)

    def generator(self) -> np.ndarray:
        """Hermitian K with ``mode_matrix() == expm(-1j * K)``."""
        t = self.theta
        if self.convention == "real-5050":
            return np.array([[0, -1j * t], [1j * t, 0]], dtype=complex)
        return np.array([[0, -t], [-t, 0]], dtype=complex)


def _block_unitary(n_total: int, k: np.ndarray) -> np.ndarray:
    """exp(-i sum_jk K_jk a_j^dag a_k) on the span of |n, N-n>, n = 0..N."""
    n = np.arange(n_total + 1)
    gen = np.diag(k[0, 0] * n + k[1, 1] * (n_total - n)).astype(complex)
    hop = np.sqrt((n[:-1] + 1) * (n_total - n[:-1]))
    idx = np.arange(n_total)
    gen[idx + 1, idx] += k[0, 1] * hop
    gen[idx, idx + 1] += k[1, 0] * hop
    w, v = np.linalg.eigh(gen)
    return (v * np.exp(-1j * w)) @ v.conj().T


@lru_cache(maxsize=64)
def _beamsplitter_operator(dim: int, theta: float, convention: str):
    k = BeamsplitterSpec(theta, convention).generator()
    rows, cols, vals = [], [], []
    for total in range(dim):
        u = _block_unitary(total, k)
        n1 = np.arange(total + 1)
        flat = n1 * dim + (total - n1)
        rows.append(np.repeat(flat, total + 1))
        cols.append(np.tile(flat, total + 1))
        vals.append(u.ravel())
    op = scipy.sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim * dim, dim * dim),
    )
    n1, n2 = np.divmod(np.arange(dim * dim), dim)
    return op, (n1 + n2) >= dim


def apply_beamsplitter(
    state: FockVector, modes: tuple[int, int], spec: BeamsplitterSpec
) -> FockVector:
    """Couple two modes of ``state``.

    The unitary is assembled block by block in total photon number, which is
    exact on every block that fits below the cutoff.  Population in blocks
    that do not fit is dropped and must stay below ``LEAK_TOL``.
    """
    i, j = modes
    if i == j:
        raise ValueError("beamsplitter needs two distinct modes")
    d = state.dims[i]
    if state.dims[j] != d:
        raise ValueError(f"modes {i}, {j} have different cutoffs {d}, {state.dims[j]}")
    op, leak_mask = _beamsplitter_operator(d, float(spec.theta), spec.convention)
    moved = np.moveaxis(state.amps, (i, j), (0, 1))
    rest = moved.shape[2:]
    flat = moved.reshape(d * d, -1)
    leak = float(np.vdot(flat[leak_mask], flat[leak_mask]).real)
    if leak > LEAK_TOL:
        raise TruncationLeakError(
            f"{leak:.3e} of the population sits in photon-number blocks >= {d};"
            " raise the cutoff"
        )
    out = (op @ flat).reshape((d, d) + rest)
    return FockVector(np.moveaxis(out, (0, 1), (i, j)), state.deficit + leak)


@lru_cache(maxsize=256)
def _displacement_columns(dim: int, beta: complex) -> np.ndarray:
    big = 2 * dim + cutoff_for(abs(beta))
    a = np.diag(np.sqrt(np.arange(1, big)), 1).astype(complex)
    gen = beta * a.conj().T - np.conj(beta) * a
    return scipy.linalg.expm(gen)[:, :dim]


def apply_displacement(state: FockVector, mode: int, beta: complex) -> FockVector:
    """Apply ``D(beta) = exp(beta a^dag - beta* a)`` to one mode.

    The exponential is taken on an enlarged space and cut back to the mode's
    cutoff; the population pushed above the cutoff must stay below
    ``HEADROOM_TOL``.
    """
    d = state.dims[mode]
    cols = _displacement_columns(d, complex(beta))
    moved = np.moveaxis(state.amps, mode, 0)
    full = np.tensordot(cols, moved, axes=(1, 0))
    before = float(np.vdot(moved, moved).real)
    lost = float(np.vdot(full[d:], full[d:]).real)
    if before > 0 and lost / before > HEADROOM_TOL:
        raise HeadroomError(
            f"displacement by {beta} loses {lost / before:.3e} above cutoff {d}"
        )
    return FockVector(np.moveaxis(full[:d], 0, mode), state.deficit + lost)


def apply_phase_rotation(state, mode: int, phi: float):
    """Multiply the amplitude of ``|n>`` on ``mode`` by ``exp(i phi n)``.

    Also accepts a single-mode :class:`MixedState` (``mode`` must be 0).
    """
    if isinstance(state, MixedState):
        if mode != 0:
            raise ValueError("MixedState has a single mode")
        ph = np.exp(1j * phi * np.arange(state.dim))
        return MixedState(ph[:, None] * state.matrix * ph.conj()[None, :])
    d = state.dims[mode]
    shape = [1] * state.n_modes
    shape[mode] = d
    ph = np.exp(1j * phi * np.arange(d)).reshape(shape)
    return FockVector(state.amps * ph, state.deficit)


def fidelity(target: FockVector, state: FockVector | MixedState) -> float:
    """``|<t|s>|^2`` or ``<t|rho|t>`` with both arguments normalized first."""
    t = target.normalized()
    if isinstance(state, MixedState):
        if t.dims != (state.dim,):
            raise ValueError(f"dimension mismatch {t.dims} vs ({state.dim},)")
        rho = state.normalized().matrix
        v = t.amps
        val = np.vdot(v, rho @ v).real
    else:
        val = abs(t.inner(state.normalized())) ** 2
    return float(min(max(val, 0.0), 1.0))


class Conditioned(NamedTuple):
    """Result of a photon-number projection.

    ``state`` is ``None`` when the outcome is (numerically) impossible.
    """

    probability: float
    state: FockVector | None

    @property
    def empty(self) -> bool:
        return self.state is None


def condition_on_outcome(
    state: FockVector, measured_modes: Sequence[int], counts: Sequence[int]
) -> Conditioned:
    """Project ``measured_modes`` onto the photon numbers ``counts``."""
    if len(measured_modes) != len(counts):
        raise ValueError("one count per measured mode required")
    if len(set(measured_modes)) != len(measured_modes):
        raise ValueError("measured modes must be distinct")
    index: list = [slice(None)] * state.n_modes
    for m, n in zip(measured_modes, counts):
        if n < 0:
            raise ValueError("photon counts are non-negative")
        if n >= state.dims[m]:
            return Conditioned(0.0, None)
        index[m] = n
    total = float(np.vdot(state.amps, state.amps).real)
    branch = state.amps[tuple(index)]
    p = float(np.vdot(branch, branch).real) / total
    if p < EMPTY_TOL:
        return Conditioned(p, None)
    if branch.ndim == 0:
        raise ValueError("at least one mode must remain unmeasured")
    return Conditioned(p, FockVector(branch).normalized())
