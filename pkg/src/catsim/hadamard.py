"""The rotated Hadamard gate and the displacement fringe experiment.

Mode 0 carries the input qubit and modes 1, 2 the split odd cat.  A
symmetric beamsplitter at ``theta = pi/8`` mixes modes 0 and 1, which are
then counted; accepting one photon in each leaves mode 2 in
``(mu + i nu)|a> - (i mu + nu)|-a>`` for exact cat resources.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .detection import DetectorModel, OutcomeClass, event_weights, lossy_povm, measure_event
from .fock import (
    EMPTY_TOL,
    BeamsplitterSpec,
    FockVector,
    MixedState,
    _beamsplitter_operator,
    apply_beamsplitter,
    apply_displacement,
    coherent_state,
    condition_on_outcome,
    cutoff_for,
    tensor,
)
from .response import QubitResponse
from .states import DegenerateStateError, QubitSpec, ResourceKind
from .teleport import BS_5050, bell_resource, teleport_cutoff

__all__ = [
    "FringePoint",
    "GateOutput",
    "HadamardChannel",
    "HadamardConfig",
    "HadamardGrid",
    "Readout",
    "computational_readout",
    "count_prob_closed",
    "fringe_sweep",
    "hadamard_target",
    "rotated_hadamard",
    "visibility",
]

# true-count patterns whose acceptance weight is below this are dropped
WEIGHT_TOL = 1e-24


@dataclass(frozen=True)
class HadamardConfig:
    """Beamsplitter angle and accepted counts of the rotated Hadamard.

    ``accept_odd_pairs`` widens acceptance from the exact ``accepted``
    pattern to any pair of odd counts.
    """

    theta_bs: float = math.pi / 8
    accepted: tuple[int, int] = (1, 1)
    accept_odd_pairs: bool = False

    def __post_init__(self):
        if len(self.accepted) != 2 or min(self.accepted) < 0:
            raise ValueError(f"accepted must be two non-negative counts, got {self.accepted}")

    @property
    def beamsplitter(self) -> BeamsplitterSpec:
        return BeamsplitterSpec(self.theta_bs, "symmetric")

    @property
    def rules(self) -> list:
        if self.accept_odd_pairs:
            return [OutcomeClass.ODD, OutcomeClass.ODD]
        return [int(n) for n in self.accepted]


class GateOutput(NamedTuple):
    """Post-selection probability and the normalized output (None if empty)."""

    probability: float
    state: FockVector | MixedState | None

    @property
    def empty(self) -> bool:
        return self.state is None


def hadamard_target(qubit: QubitSpec, dim: int) -> FockVector:
    """``(mu + i nu)|a> - (i mu + nu)|-a>``, normalized."""
    a = qubit.mu + 1j * qubit.nu
    b = -(1j * qubit.mu + qubit.nu)
    plus = coherent_state(qubit.alpha, dim).amps
    minus = coherent_state(-qubit.alpha, dim).amps
    amps = a * plus + b * minus
    if np.vdot(amps, amps).real < 1e-12:
        raise DegenerateStateError("rotated Hadamard target vanishes")
    return FockVector(amps).normalized()


def count_prob_closed(qubit: QubitSpec, n: int, m: int) -> float:
    """Closed-form probability of counting ``(n, m)`` in the gate's detectors."""
    if n < 0 or m < 0:
        raise ValueError("photon counts are non-negative")
    a2 = qubit.alpha**2
    x = (qubit.mu.conjugate() * qubit.nu).real * math.exp(-2 * a2)
    left = (1 - 2 * x) / ((1 + 2 * x) * (1 - math.exp(-4 * a2)))
    right = a2 ** (n + m) * math.exp(-2 * a2) / (math.factorial(n) * math.factorial(m))
    return left * right


def rotated_hadamard(
    state: FockVector,
    alpha: float,
    kind: ResourceKind,
    cfg: HadamardConfig | None = None,
    detector: DetectorModel | None = None,
) -> GateOutput:
    """Full Fock-space run of the gate on a single-mode input.

    With ideal counters and an exact accepted pattern the output is pure;
    otherwise it is the kept mode's density matrix.
    """
    cfg = cfg or HadamardConfig()
    detector = detector or DetectorModel()
    d = max(state.dims[0], teleport_cutoff(alpha, kind))
    resource = bell_resource(alpha, kind).resized(d)
    full = tensor([state.resized(d), resource])
    full = apply_beamsplitter(full, (0, 1), cfg.beamsplitter)
    if detector.ideal and not cfg.accept_odd_pairs:
        cond = condition_on_outcome(full, (0, 1), cfg.rules)
        return GateOutput(cond.probability, cond.state)
    ev = measure_event(full, (0, 1), detector, cfg.rules)
    return GateOutput(ev.probability, ev.state)


class HadamardGrid:
    """Gate statistics for every qubit input, from two basis simulations.

    Args:
        alpha: qubit amplitude.
        kind: resource used for the Bell pair.
        cfg: gate configuration; its acceptance rule defines the ``"gate"`` event.
        detector: counter model for both gate detectors.
        counts: extra exact ``(n, m)`` count events to tabulate.
    """

    def __init__(
        self,
        alpha: float,
        kind: ResourceKind,
        cfg: HadamardConfig | None = None,
        detector: DetectorModel | None = None,
        counts=((1, 1), (2, 1), (1, 2), (2, 2)),
        dim: int | None = None,
    ):
        self.alpha = alpha
        self.cfg = cfg or HadamardConfig()
        self.detector = detector or DetectorModel()
        self.dim = dim or teleport_cutoff(alpha, kind)
        resource = bell_resource(alpha, kind, self.dim)
        inputs = [coherent_state(s * alpha, self.dim) for s in (1, -1)]
        outputs = [
            apply_beamsplitter(tensor([b, resource]), (0, 1), self.cfg.beamsplitter)
            for b in inputs
        ]
        events = {"gate": self.cfg.rules}
        events.update({tuple(c): list(c) for c in counts})
        self.response = QubitResponse(alpha, inputs, outputs, (0, 1), self.detector, events)

    def probability(self, key, thetas, phis) -> np.ndarray:
        mu, nu = _mesh(thetas, phis)
        return self.response.probability(key, mu, nu)

    def fidelity(self, thetas, phis, key="gate") -> np.ndarray:
        """Output fidelity against the rotated-Hadamard target."""
        mu, nu = _mesh(thetas, phis)
        return self.response.fidelity(key, mu, nu, mu + 1j * nu, -(1j * mu + nu))


def _mesh(thetas, phis):
    th, ph = np.meshgrid(np.asarray(thetas, float), np.asarray(phis, float), indexing="ij")
    return np.cos(th).astype(complex), np.exp(1j * ph) * np.sin(th)


class HadamardChannel:
    """The gate as a linear map on the input mode, for fast input sweeps.

    Photon number is conserved across the counted pair, so an input
    component ``|n>`` only reaches true-count patterns with
    ``m1 + m2 >= n``.  Components beyond the point where every acceptance
    weight is below ``WEIGHT_TOL`` are dropped; with ideal counters and an
    exact accepted pattern that leaves only a handful of input levels.
    """

    def __init__(
        self,
        alpha: float,
        kind: ResourceKind,
        cfg: HadamardConfig | None = None,
        detector: DetectorModel | None = None,
    ):
        self.alpha = alpha
        self.cfg = cfg or HadamardConfig()
        self.detector = detector or DetectorModel()
        self.resource = bell_resource(alpha, kind).amps
        self.out_dim = self.resource.shape[1]
        self.n_in = self._input_levels()
        self._ops = {}

    def _input_levels(self) -> int | None:
        grid = 2 * self.resource.shape[0] + 64
        w = event_weights([grid, grid], self.detector, self.cfg.rules)
        total = np.add.outer(np.arange(grid), np.arange(grid))
        tail = np.zeros(2 * grid)
        np.maximum.at(tail, total.ravel(), w.ravel())
        tail = np.maximum.accumulate(tail[::-1])[::-1]
        small = np.nonzero(tail[:grid] < WEIGHT_TOL)[0]
        return int(small[0]) if small.size else None

    def _kraus(self, levels: int) -> np.ndarray:
        """``sqrt(w) <m1, m2| U (|n> x R)`` stacked as ``[pattern, out, n]``."""
        if levels in self._ops:
            return self._ops[levels]
        d = levels
        op, _ = _beamsplitter_operator(d, float(self.cfg.theta_bs), "symmetric")
        res = np.zeros((d, self.out_dim), dtype=complex)
        rows = min(d, self.resource.shape[0])
        res[:rows] = self.resource[:rows]
        w = event_weights([d, d], self.detector, self.cfg.rules)
        m1, m2 = np.nonzero(w > 0)
        keep = m1 + m2 < d
        m1, m2 = m1[keep], m2[keep]
        flat_idx = m1 * d + m2
        out = np.empty((m1.size, self.out_dim, d), dtype=complex)
        for n in range(d):
            block = np.zeros((d, d, self.out_dim), dtype=complex)
            block[n] = res
            mixed = op @ block.reshape(d * d, self.out_dim)
            out[:, :, n] = mixed[flat_idx]
        out *= np.sqrt(w[m1, m2])[:, None, None]
        self._ops[levels] = out
        return out

    def apply(self, state: FockVector) -> GateOutput:
        """Gate probability and output for a normalized single-mode input."""
        amps = state.amps
        levels = self.n_in or amps.shape[0]
        head = np.zeros(levels, dtype=complex)
        k = min(levels, amps.shape[0])
        head[:k] = amps[:k]
        phi = self._kraus(levels) @ head
        rho = phi.T @ phi.conj()
        p = float(np.trace(rho).real) / float(np.vdot(amps, amps).real)
        if p < EMPTY_TOL:
            return GateOutput(max(p, 0.0), None)
        return GateOutput(p, MixedState(rho / np.trace(rho).real))


class Readout(NamedTuple):
    """Computational-basis readout: ``|a>``, ``|-a>``, failure, both-nonzero."""

    p_plus: float
    p_minus: float
    p_fail: float
    p_ambiguous: float


def computational_readout(
    state: FockVector | MixedState, alpha: float, detector: DetectorModel | None = None
) -> Readout:
    """Mix the signal with ``|alpha>`` on a 50:50 beamsplitter and count both ports.

    Photons only in the second port mean ``|alpha>``, only in the first mean
    ``|-alpha>``; no photons at all is a failed readout.
    """
    detector = detector or DetectorModel()
    if isinstance(state, MixedState):
        w, v = np.linalg.eigh(state.normalized().matrix)
        branches = [(wi, v[:, i]) for i, wi in enumerate(w) if wi > 1e-15 * w[-1]]
    else:
        branches = [(1.0, state.normalized().amps)]
    d = branches[0][1].shape[0] + cutoff_for(alpha)
    ref = coherent_state(alpha, d)
    probs = np.zeros((d, d))
    for weight, vec in branches:
        sig = FockVector(np.pad(vec, (0, d - vec.shape[0]))).normalized()
        out = apply_beamsplitter(tensor([sig, ref]), (0, 1), BS_5050).amps
        probs += weight * np.abs(out) ** 2
    povm = lossy_povm(detector, d)
    probs = povm @ probs @ povm.T
    probs /= probs.sum()
    return Readout(
        p_plus=float(probs[0, 1:].sum()),
        p_minus=float(probs[1:, 0].sum()),
        p_fail=float(probs[0, 0]),
        p_ambiguous=float(probs[1:, 1:].sum()),
    )


@dataclass(frozen=True)
class FringePoint:
    """One displacement of the fringe; readout values are conditioned on the gate."""

    delta: float
    p_plus: float
    p_minus: float
    p_readout_fail: float
    p_ambiguous: float
    p_gate: float

    @property
    def empty(self) -> bool:
        return not self.p_gate >= EMPTY_TOL


def fringe_sweep(
    alpha: float,
    kind: ResourceKind,
    deltas=None,
    detector: DetectorModel | None = None,
    *,
    cfg: HadamardConfig | None = None,
    readout_detector: DetectorModel | None = None,
    source: FockVector | None = None,
) -> list[FringePoint]:
    """Odd-cat source, displacement by ``i delta``, rotated Hadamard, readout.

    Args:
        alpha: qubit amplitude; the source is an odd cat of this size (or
            the squeezed photon that best approximates it).
        kind: resource for both the source and the gate's Bell pair.
        deltas: displacements; defaults to 81 points over ``[-2/alpha, 2/alpha]``.
        detector: counters inside the gate.
        readout_detector: counters of the final readout, ideal by default.
        source: override the prepared state.
    """
    if deltas is None:
        deltas = np.linspace(-2 / alpha, 2 / alpha, 81)
    channel = HadamardChannel(alpha, kind, cfg, detector)
    if source is None:
        source = kind.odd_state(alpha, kind.cutoff(alpha))
    points = []
    for delta in np.asarray(deltas, float):
        dim = max(source.dims[0] + cutoff_for(abs(delta)), channel.n_in or 0)
        shifted = apply_displacement(source.resized(dim), 0, 1j * delta)
        gate = channel.apply(shifted)
        if gate.empty:
            nan = math.nan
            points.append(FringePoint(float(delta), nan, nan, nan, nan, gate.probability))
            continue
        r = computational_readout(gate.state, alpha, readout_detector)
        points.append(
            FringePoint(float(delta), r.p_plus, r.p_minus, r.p_fail, r.p_ambiguous, gate.probability)
        )
    return points


def visibility(samples) -> float:
    """``(max - min) / (max + min)`` over the finite samples."""
    arr = np.asarray(list(samples), float)
    arr = arr[np.isfinite(arr)]
    if arr.size == 0:
        raise ValueError("visibility needs at least one finite sample")
    hi, lo = arr.max(), arr.min()
    if hi + lo == 0:
        return 0.0
    return float((hi - lo) / (hi + lo))
