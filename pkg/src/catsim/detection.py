"""Photon counting with finite efficiency.

Loss is modelled by the binomial POVM: a true photon number ``m`` is
reported as ``k`` with probability ``C(m, k) eta^k (1 - eta)^(m - k)``.
Conditional states are built by summing the kept mode's pure branches over
every true-count pattern, weighted by how likely it is to be reported as an
accepted outcome; no multimode density matrix is ever formed.
"""

from __future__ import annotations

import enum
from collections.abc import Callable, Collection, Sequence
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Union

import numpy as np
from scipy.stats import binom

from .fock import EMPTY_TOL, FockVector, MixedState

__all__ = [
    "DetectorModel",
    "Outcome",
    "OutcomeClass",
    "classify",
    "event_weights",
    "lossy_povm",
    "measure_event",
    "measure_modes",
]


class OutcomeClass(enum.Enum):
    ZERO = "zero"
    ODD = "odd"
    EVEN_NONZERO = "even"

    def contains(self, n: int) -> bool:
        return classify(n) is self


def classify(n: int) -> OutcomeClass:
    if n < 0:
        raise ValueError(f"photon count must be non-negative, got {n}")
    if n == 0:
        return OutcomeClass.ZERO
    return OutcomeClass.ODD if n % 2 else OutcomeClass.EVEN_NONZERO


@dataclass(frozen=True)
class DetectorModel:
    """Number-resolving counter with efficiency ``eta``.

    ``n_max`` is the largest reportable count.  Left as ``None`` it follows
    the cutoff of whichever mode is measured (``n_max = dim - 1``).
    """

    eta: float = 1.0
    n_max: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"efficiency must lie in [0, 1], got {self.eta}")
        if self.n_max is not None and self.n_max < 0:
            raise ValueError("n_max must be non-negative")

    @property
    def ideal(self) -> bool:
        return self.eta == 1.0

    def for_dim(self, dim: int) -> DetectorModel:
        if self.n_max is not None and self.n_max != dim - 1:
            raise ValueError(f"detector resolves {self.n_max} photons but mode cutoff is {dim}")
        return DetectorModel(self.eta, dim - 1)


def lossy_povm(model: DetectorModel, dim: int | None = None) -> np.ndarray:
    """Diagonals of the POVM elements as rows: ``out[k, m] = <m|Pi_k|m>``."""
    if dim is None:
        if model.n_max is None:
            raise ValueError("give a dimension or a detector with n_max set")
        dim = model.n_max + 1
    model.for_dim(dim)
    return _binomial_povm(float(model.eta), int(dim))


@lru_cache(maxsize=128)
def _binomial_povm(eta: float, dim: int) -> np.ndarray:
    k = np.arange(dim)
    out = binom.pmf(k[:, None], k[None, :], eta)
    out.flags.writeable = False
    return out


class Outcome(NamedTuple):
    """Probability of a measurement event and the kept mode's state."""

    probability: float
    state: MixedState | None

    @property
    def empty(self) -> bool:
        return self.state is None


Accept = Union[int, OutcomeClass, Collection[int], Callable[[int], bool]]


@lru_cache(maxsize=256)
def _class_mask(accept: OutcomeClass, dim: int) -> np.ndarray:
    return np.array([accept.contains(n) for n in range(dim)])


def _accept_mask(accept: Accept, dim: int) -> np.ndarray:
    counts = np.arange(dim)
    if isinstance(accept, OutcomeClass):
        return _class_mask(accept, dim)
    if isinstance(accept, (int, np.integer)):
        return counts == accept
    if callable(accept):
        return np.array([bool(accept(int(n))) for n in counts])
    return np.isin(counts, list(accept))


def _split(state: FockVector, measured_modes: Sequence[int]):
    kept = [m for m in range(state.n_modes) if m not in measured_modes]
    if len(kept) != 1 or len(set(measured_modes)) != len(measured_modes):
        raise ValueError("measure all modes but exactly one")
    order = list(measured_modes) + kept
    return np.transpose(state.amps, order), float(np.vdot(state.amps, state.amps).real)


def _outcome(rho: np.ndarray, total: float) -> Outcome:
    p = float(np.trace(rho).real) / total
    if p < EMPTY_TOL:
        return Outcome(max(p, 0.0), None)
    return Outcome(p, MixedState(rho / np.trace(rho).real))


def event_weights(
    dims: Sequence[int], model: DetectorModel, accepted: Sequence[Accept]
) -> np.ndarray:
    """Probability that each true-count pattern is reported as accepted."""
    if len(accepted) != len(dims):
        raise ValueError("one acceptance rule per measured mode required")
    weight = np.ones(tuple(dims))
    for axis, (dim, acc) in enumerate(zip(dims, accepted)):
        w = _accept_mask(acc, dim) @ lossy_povm(model, dim)
        shape = [1] * len(dims)
        shape[axis] = dim
        weight = weight * w.reshape(shape)
    return weight


def measure_event(
    state: FockVector,
    measured_modes: Sequence[int],
    model: DetectorModel,
    accepted: Sequence[Accept],
) -> Outcome:
    """Probability and conditional state for a product event.

    ``accepted[i]`` selects the reported counts accepted on
    ``measured_modes[i]``: a single count, an :class:`OutcomeClass`, a
    collection of counts or a predicate.
    """
    amps, total = _split(state, measured_modes)
    weight = event_weights([state.dims[m] for m in measured_modes], model, accepted)
    hit = weight > 0
    phi = np.sqrt(weight[hit])[:, None] * amps[hit]
    return _outcome(phi.T @ phi.conj(), total)


def measure_modes(
    state: FockVector,
    measured_modes: Sequence[int],
    model: DetectorModel,
    outcomes: Collection[tuple[int, ...]] | None = None,
) -> dict[tuple[int, ...], Outcome]:
    """Outcome table ``{reported counts: Outcome}``.

    With ``outcomes=None`` every count pattern up to the cutoffs is listed.
    """
    if outcomes is not None:
        return {
            tuple(o): measure_event(state, measured_modes, model, list(o)) for o in outcomes
        }
    amps, total = _split(state, measured_modes)
    # rho_m = psi_m psi_m^dag for every true-count pattern m, then fold each
    # measured axis through its POVM.
    rho = np.einsum("...i,...j->...ij", amps, amps.conj())
    for axis, mode in enumerate(measured_modes):
        povm = lossy_povm(model, state.dims[mode])
        rho = np.moveaxis(np.tensordot(povm, rho, axes=(1, axis)), 0, axis)
    table = {}
    for counts in np.ndindex(*rho.shape[:-2]):
        table[counts] = _outcome(rho[counts], total)
    return table
