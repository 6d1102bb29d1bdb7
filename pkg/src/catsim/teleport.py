"""Teleportation of coherent-state qubits through a split odd cat.

Mode 0 carries the input qubit, modes 1 and 2 the Bell resource made by
splitting an odd cat of size ``sqrt(2) alpha`` on a 50:50 beamsplitter.
Modes 0 and 1 are mixed on a second 50:50 beamsplitter and counted; mode 2
is the output.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._search import golden_section_max
from .detection import DetectorModel, OutcomeClass, measure_event
from .fock import (
    BeamsplitterSpec,
    FockVector,
    MixedState,
    apply_beamsplitter,
    apply_phase_rotation,
    coherent_state,
    cutoff_for,
    fidelity,
    fock_state,
    tensor,
)
from .response import QubitResponse
from .states import QubitSpec, ResourceKind, qubit_state

__all__ = [
    "BELL_CORRECTIONS",
    "ConcatenationResult",
    "Correction",
    "OutcomeResult",
    "TeleportGrid",
    "TeleportReport",
    "bell_resource",
    "concatenation_check",
    "min_p_succ",
    "p_fail_closed",
    "p_succ_closed",
    "teleport",
    "teleport_cutoff",
    "teleport_state",
]

Z, O, E = OutcomeClass.ZERO, OutcomeClass.ODD, OutcomeClass.EVEN_NONZERO
PATTERNS = [(a, b) for a in (Z, O, E) for b in (Z, O, E)]
BS_5050 = BeamsplitterSpec(math.pi / 4, "real-5050")


class Correction(enum.Enum):
    NONE = "I"
    X = "X"
    Z = "Z"
    XZ = "XZ"
    FAIL = "fail"

    @property
    def needs_x(self) -> bool:
        return self in (Correction.X, Correction.XZ)

    @property
    def needs_z(self) -> bool:
        return self in (Correction.Z, Correction.XZ)


BELL_CORRECTIONS = {
    (Z, O): Correction.NONE,
    (O, Z): Correction.X,
    (Z, E): Correction.Z,
    (E, Z): Correction.XZ,
    (Z, Z): Correction.FAIL,
}


def correction_for(pattern) -> Correction:
    return BELL_CORRECTIONS.get(tuple(pattern), Correction.FAIL)


def teleport_cutoff(alpha: float, kind: ResourceKind) -> int:
    return max(cutoff_for(math.sqrt(2) * alpha), kind.cutoff(math.sqrt(2) * alpha))


def bell_resource(alpha: float, kind: ResourceKind, dim: int | None = None) -> FockVector:
    """Split odd cat of size ``sqrt(2) alpha``: ``|a, a> - |-a, -a>`` for exact cats."""
    dim = dim or teleport_cutoff(alpha, kind)
    source = kind.odd_state(math.sqrt(2) * alpha, dim)
    return apply_beamsplitter(tensor([source, fock_state(0, dim)]), (0, 1), BS_5050)


class OutcomeResult(NamedTuple):
    """One Bell pattern: its probability and the corrected output's fidelity.

    ``fidelity`` is measured against the input, Z-flipped when the pattern
    leaves a pending Z correction; NaN when the pattern cannot occur.
    """

    probability: float
    fidelity: float
    correction: Correction
    state: MixedState | None


@dataclass
class TeleportReport:
    outcomes: dict = field(default_factory=dict)

    def probability(self, *patterns) -> float:
        return sum(self.outcomes[p].probability for p in patterns)

    @property
    def p_odd(self) -> float:
        return self.probability((Z, O), (O, Z))

    @property
    def p_even(self) -> float:
        return self.probability((Z, E), (E, Z))

    @property
    def p_fail(self) -> float:
        return self.outcomes[(Z, Z)].probability

    @property
    def p_other(self) -> float:
        """Patterns with counts on both detectors."""
        return self.probability(*(p for p in PATTERNS if p not in BELL_CORRECTIONS))

    @property
    def p_succ(self) -> float:
        """Retry-until-easy success probability from the simulated aggregates."""
        return self.p_odd + self.p_even**2 / (1 - self.p_odd)

    @property
    def total(self) -> float:
        return sum(o.probability for o in self.outcomes.values())


def teleport_state(
    source: FockVector,
    target: FockVector,
    alpha: float,
    kind: ResourceKind,
    detector: DetectorModel | None = None,
) -> TeleportReport:
    """Teleport an arbitrary single-mode ``source`` and score it against ``target``.

    ``source`` and ``target`` share one cutoff, used for every mode.
    """
    detector = detector or DetectorModel()
    d = source.dims[0]
    state = tensor([source, bell_resource(alpha, kind, d)])
    state = apply_beamsplitter(state, (0, 1), BS_5050)
    z_target = _z_flip(target, alpha)
    report = TeleportReport()
    for pattern in PATTERNS:
        ev = measure_event(state, (0, 1), detector, list(pattern))
        corr = correction_for(pattern)
        if ev.empty:
            report.outcomes[pattern] = OutcomeResult(ev.probability, math.nan, corr, None)
            continue
        rho = ev.state
        if corr.needs_x:
            rho = apply_phase_rotation(rho, 0, math.pi)
        ref = z_target if corr.needs_z else target
        report.outcomes[pattern] = OutcomeResult(ev.probability, fidelity(ref, rho), corr, rho)
    return report


def _z_flip(target: FockVector, alpha: float) -> FockVector:
    """Map ``mu|a> + nu|-a>`` to ``mu|a> - nu|-a>`` within the coherent span."""
    d = target.dims[0]
    plus = coherent_state(alpha, d).amps
    minus = coherent_state(-alpha, d).amps
    basis = np.stack([plus, minus], axis=1)
    coef, *_ = np.linalg.lstsq(basis, target.amps, rcond=None)
    return FockVector(basis @ (coef * np.array([1, -1]))).normalized()


def teleport(
    qubit: QubitSpec,
    kind: ResourceKind,
    detector: DetectorModel | None = None,
    dim: int | None = None,
) -> TeleportReport:
    """Full Fock-space simulation of one teleportation run."""
    dim = dim or teleport_cutoff(qubit.alpha, kind)
    psi = qubit_state(qubit, dim)
    return teleport_state(psi, psi, qubit.alpha, kind, detector)


def p_fail_closed(qubit: QubitSpec) -> float:
    """Closed-form probability of the zero-zero pattern with exact resources."""
    a2 = qubit.alpha**2
    x = math.exp(-2 * a2)
    num = math.exp(-a2) * math.sqrt(2 - 2 * x) * abs(qubit.mu + qubit.nu)
    den = math.sqrt((2 - 2 * x * x) * qubit.norm_sq)
    return (num / den) ** 2


def p_succ_closed(qubit: QubitSpec) -> float:
    p = p_fail_closed(qubit)
    return 1 - 2 * (p - p * p)


def _refine_min(f, x0, y0, hx, hy, tol=1e-10, max_rounds=50):
    """Coordinate descent with golden-section line searches."""
    x, y, best = x0, y0, f(x0, y0)
    for _ in range(max_rounds):
        x, _ = golden_section_max(lambda t: -f(t, y), x - hx, x + hx, 1e-9)
        y, _ = golden_section_max(lambda t: -f(x, t), y - hy, y + hy, 1e-9)
        val = f(x, y)
        if best - val < tol:
            best = min(best, val)
            break
        best = val
    return best, x, y


def min_p_succ(alpha: float, grid: int = 64) -> tuple[float, float, float]:
    """Minimum of :func:`p_succ_closed` over all inputs.

    Grid search over theta in [0, pi), phi in [0, 2 pi), then local
    refinement.  Returns ``(value, theta, phi)``.
    """
    def f(theta, phi):
        return p_succ_closed(QubitSpec(alpha, theta, phi))

    thetas = np.arange(grid) * math.pi / grid
    phis = np.arange(grid) * 2 * math.pi / grid
    vals = np.array([[f(t, p) for p in phis] for t in thetas])
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    best, t, p = _refine_min(f, thetas[i], phis[j], math.pi / grid, 2 * math.pi / grid)
    if best > vals[i, j]:
        return float(vals[i, j]), float(thetas[i]), float(phis[j])
    return best, t, p


class ConcatenationResult(NamedTuple):
    """Chained teleportation with pending-Z bookkeeping (up to three rounds).

    ``paths`` holds simulated probabilities of the success paths ``odd``,
    ``even,even`` and ``even,odd,even``; ``partial_sums`` the first three
    partial sums of the retry series built from round-one aggregates only.
    """

    paths: dict
    partial_sums: tuple
    p_odd: float
    p_even: float

    @property
    def total(self) -> float:
        return sum(self.paths.values())


def concatenation_check(qubit: QubitSpec, dim: int | None = None) -> ConcatenationResult:
    """Simulate up to three chained exact-cat teleporters.

    After an even result the output carries an uncorrected Z, and it is that
    state which enters the next round.
    """
    kind = ResourceKind.exact_cat()
    dim = dim or teleport_cutoff(qubit.alpha, kind)
    psi = qubit_state(qubit, dim)
    first = teleport_state(psi, psi, qubit.alpha, kind)
    carried = _dominant(first.outcomes[(Z, E)].state)
    second = teleport_state(carried, carried, qubit.alpha, kind)
    p_odd, p_even = first.p_odd, first.p_even
    paths = {
        "odd": p_odd,
        "even,even": p_even * second.p_even,
        "even,odd,even": p_even * second.p_odd * second.p_even,
    }
    partial = (
        p_odd,
        p_odd + p_even**2,
        p_odd + p_even**2 + p_even**2 * p_odd,
    )
    return ConcatenationResult(paths, partial, p_odd, p_even)


def _dominant(rho: MixedState) -> FockVector:
    w, v = np.linalg.eigh(rho.normalized().matrix)
    return FockVector(v[:, -1])


class TeleportGrid:
    """Teleporter response for every input, from two basis simulations."""

    def __init__(
        self,
        alpha: float,
        kind: ResourceKind,
        detector: DetectorModel | None = None,
        dim: int | None = None,
    ):
        self.alpha = alpha
        self.kind = kind
        self.detector = detector or DetectorModel()
        self.dim = dim or teleport_cutoff(alpha, kind)
        resource = bell_resource(alpha, kind, self.dim)
        inputs = [coherent_state(s * alpha, self.dim) for s in (1, -1)]
        outputs = [
            apply_beamsplitter(tensor([b, resource]), (0, 1), BS_5050) for b in inputs
        ]
        self.response = QubitResponse(
            alpha, inputs, outputs, (0, 1), self.detector, {p: list(p) for p in PATTERNS}
        )

    def evaluate(self, thetas, phis) -> dict:
        """Arrays over the ``(theta, phi)`` mesh, keyed by pattern.

        Each entry is ``(probability, fidelity)`` with the same conventions as
        :class:`OutcomeResult`.
        """
        th, ph = np.meshgrid(np.asarray(thetas, float), np.asarray(phis, float), indexing="ij")
        mu = np.cos(th).astype(complex)
        nu = np.exp(1j * ph) * np.sin(th)
        out = {}
        for pattern in PATTERNS:
            corr = correction_for(pattern)
            tmu, tnu = mu, (-nu if corr.needs_z else nu)
            if corr.needs_x:
                # rotating the state by pi equals swapping the target's basis weights
                tmu, tnu = tnu, tmu
            prob = self.response.probability(pattern, mu, nu)
            fid = self.response.fidelity(pattern, mu, nu, tmu, tnu)
            out[pattern] = (prob, fid)
        return out
