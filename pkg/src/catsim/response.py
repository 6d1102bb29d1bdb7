"""Measurement statistics of linear circuits over the whole qubit space.

Every circuit here is linear in its input mode, so running it on the two
basis states ``|alpha>`` and ``|-alpha>`` fixes its response to any input
``mu|alpha> + nu|-alpha>`` exactly.  Each measurement event reduces to a
2x2 block of kept-mode operators, and fidelities against targets in the
same coherent basis reduce to a 2x2x2x2 table of scalars, so sweeping a
dense grid of inputs costs only array arithmetic.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

import numpy as np

from .detection import Accept, DetectorModel, event_weights
from .fock import EMPTY_TOL, FockVector, coherent_state


class QubitResponse:
    """Event probabilities and output fidelities for arbitrary qubit inputs.

    Args:
        alpha: coherent amplitude of the qubit basis.
        inputs: the two (truncated, normalized) basis inputs ``|+-alpha>``.
        outputs: circuit outputs for each basis input, all on the same modes.
        measured_modes: modes that are counted; exactly one mode is kept.
        model: detector applied to every measured mode.
        events: name -> per-mode acceptance rules.
    """

    def __init__(
        self,
        alpha: float,
        inputs: Sequence[FockVector],
        outputs: Sequence[FockVector],
        measured_modes: Sequence[int],
        model: DetectorModel,
        events: Mapping[object, Sequence[Accept]],
    ):
        self.alpha = alpha
        self.input_gram = np.array([[u.inner(v) for v in inputs] for u in inputs])
        kept = [m for m in range(outputs[0].n_modes) if m not in measured_modes]
        if len(kept) != 1:
            raise ValueError("measure all modes but exactly one")
        order = list(measured_modes) + kept
        amps = [np.transpose(o.amps, order) for o in outputs]
        d_out = amps[0].shape[-1]
        self.output_basis = np.array(
            [coherent_state(s * alpha, d_out).amps for s in (1, -1)]
        )
        dims = amps[0].shape[:-1]
        self._trace = {}
        self._table = {}
        for key, accepted in events.items():
            w = np.sqrt(event_weights(dims, model, accepted))[..., None]
            phi = [(w * a).reshape(-1, d_out) for a in amps]
            # gram[a, b] = sum_m w_m psi_a[m] psi_b[m]^dag
            gram = np.array([[pa.T @ pb.conj() for pb in phi] for pa in phi])
            self._trace[key] = np.einsum("abii->ab", gram)
            v = self.output_basis
            self._table[key] = np.einsum("ci,abij,dj->abcd", v.conj(), gram, v)

    @property
    def events(self):
        return list(self._table)

    def _norm(self, c):
        g = self.input_gram
        return np.einsum("a...,ab,b...->...", c.conj(), g, c).real

    def probability(self, key, mu, nu) -> np.ndarray:
        """Probability of ``key`` for inputs ``mu|a> + nu|-a>`` (broadcast)."""
        c = np.array(np.broadcast_arrays(mu, nu), dtype=complex)
        num = np.einsum("a...,b...,ab->...", c, c.conj(), self._trace[key]).real
        return num / self._norm(c)

    def fidelity(self, key, mu, nu, target_mu, target_nu) -> np.ndarray:
        """Fidelity of the conditional output with ``tmu|a> + tnu|-a>``.

        Returns NaN where the event is numerically impossible.
        """
        c = np.array(np.broadcast_arrays(mu, nu, target_mu, target_nu), dtype=complex)
        c, t = c[:2], c[2:]
        num = np.einsum(
            "a...,b...,c...,d...,abcd->...", c, c.conj(), t.conj(), t, self._table[key]
        ).real
        trace = np.einsum("a...,b...,ab->...", c, c.conj(), self._trace[key]).real
        v = self.output_basis
        tgram = v.conj() @ v.T
        tnorm = np.einsum("a...,ab,b...->...", t.conj(), tgram, t).real
        prob = trace / self._norm(c)
        with np.errstate(invalid="ignore", divide="ignore"):
            fid = num / (trace * tnorm)
        return np.where(prob < EMPTY_TOL, np.nan, np.clip(fid, 0.0, 1.0))
