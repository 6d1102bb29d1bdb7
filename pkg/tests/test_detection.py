import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import comb

from catsim import (
    DetectorModel,
    FockVector,
    OutcomeClass,
    QubitSpec,
    ResourceKind,
    classify,
    coherent_state,
    condition_on_outcome,
    event_weights,
    fidelity,
    fock_state,
    lossy_povm,
    measure_event,
    measure_modes,
    qubit_state,
    tensor,
    teleport,
)
from catsim.teleport import BS_5050, O, Z, bell_resource, teleport_cutoff
from catsim.fock import apply_beamsplitter

eff = st.floats(0, 1)


def test_povm_examples():
    assert np.allclose(lossy_povm(DetectorModel(1.0), 6), np.eye(6))
    dark = lossy_povm(DetectorModel(0.0), 6)
    assert np.allclose(dark[0], 1) and np.allclose(dark[1:], 0)
    assert abs(lossy_povm(DetectorModel(0.9), 5)[1, 2] - 0.18) < 1e-15


@given(eff, st.integers(1, 40))
def test_povm_is_complete_and_binomial(eta, dim):
    povm = lossy_povm(DetectorModel(eta), dim)
    assert np.allclose(povm.sum(axis=0), 1, atol=1e-12)
    assert np.all(povm >= 0)
    assert np.allclose(np.tril(povm, -1).T, 0) or dim == 1
    m, k = min(dim - 1, 7), min(dim - 1, 3)
    if k <= m:
        want = comb(m, k) * eta**k * (1 - eta) ** (m - k)
        assert abs(povm[k, m] - want) < 1e-12


def test_detector_validation():
    with pytest.raises(ValueError):
        DetectorModel(1.1)
    with pytest.raises(ValueError):
        DetectorModel(0.5, -1)
    with pytest.raises(ValueError):
        DetectorModel(0.5, 3).for_dim(6)
    with pytest.raises(ValueError):
        lossy_povm(DetectorModel(0.5))
    assert lossy_povm(DetectorModel(0.5, 3)).shape == (4, 4)


def test_classify():
    assert classify(0) is OutcomeClass.ZERO
    assert classify(3) is OutcomeClass.ODD
    assert classify(4) is OutcomeClass.EVEN_NONZERO
    with pytest.raises(ValueError):
        classify(-1)


def test_lossy_example_keeps_unmeasured_mode():
    dim = 12
    psi = coherent_state(0.6, dim)
    out = measure_modes(tensor([fock_state(2, dim), psi]), (0,), DetectorModel(0.9), [(1,)])[(1,)]
    assert abs(out.probability - 0.18) < 1e-12
    assert fidelity(psi, out.state) > 1 - 1e-12


@given(st.integers(0, 2**32 - 1))
def test_ideal_detection_matches_projection(seed):
    rng = np.random.default_rng(seed)
    dims = (4, 5, 3)
    s = FockVector(rng.normal(size=dims) + 1j * rng.normal(size=dims)).normalized()
    table = measure_modes(s, (0, 2), DetectorModel(1.0))
    assert abs(sum(o.probability for o in table.values()) - 1) < 1e-12
    for counts, out in table.items():
        proj = condition_on_outcome(s, (0, 2), counts)
        assert abs(out.probability - proj.probability) < 1e-12
        if not proj.empty:
            assert fidelity(proj.state, out.state) > 1 - 1e-10
            assert out.state.purity() > 1 - 1e-10


@given(st.integers(0, 2**32 - 1), eff)
def test_lossy_table_sums_to_one_and_matches_events(seed, eta):
    rng = np.random.default_rng(seed)
    s = FockVector(rng.normal(size=(5, 4)) + 1j * rng.normal(size=(5, 4))).normalized()
    model = DetectorModel(eta)
    table = measure_modes(s, (0,), model)
    assert abs(sum(o.probability for o in table.values()) - 1) < 1e-12
    odd = measure_event(s, (0,), model, [OutcomeClass.ODD])
    assert abs(odd.probability - table[(1,)].probability - table[(3,)].probability) < 1e-12
    for o in table.values():
        if not o.empty:
            o.state.check()


@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.floats(0.1, 2.0))
def test_click_probability_monotone_in_efficiency(e1, e2, beta):
    lo, hi = sorted((e1, e2))
    s = tensor([coherent_state(beta, 30), fock_state(0, 4)])
    def click(eta):
        return measure_event(s, (0,), DetectorModel(eta), [lambda n: n >= 1]).probability
    assert click(lo) <= click(hi) + 1e-12


def test_event_weights_accept_forms():
    model = DetectorModel(0.8)
    w = event_weights([6, 6], model, [1, OutcomeClass.ODD])
    povm = lossy_povm(model, 6)
    assert np.allclose(w, np.outer(povm[1], povm[1] + povm[3] + povm[5]))
    assert np.allclose(event_weights([6], model, [{1, 3, 5}]), event_weights([6], model, [OutcomeClass.ODD]))
    with pytest.raises(ValueError):
        event_weights([6, 6], model, [1])


def test_measure_requires_one_kept_mode():
    s = tensor([fock_state(0, 3)] * 3)
    with pytest.raises(ValueError):
        measure_modes(s, (0,), DetectorModel())


def test_two_photon_masquerade_flips_parity():
    """A true count of 2 read as 1 leaves the Z-flipped output behind."""
    alpha = 1.0
    kind = ResourceKind.exact_cat()
    q = QubitSpec(alpha, 0.4, 0.9)
    dim = teleport_cutoff(alpha, kind)
    psi = qubit_state(q, dim)
    state = apply_beamsplitter(tensor([psi, bell_resource(alpha, kind, dim)]), (0, 1), BS_5050)
    true2 = condition_on_outcome(state, (0, 1), (0, 2)).state
    flipped = qubit_state(q.z_flipped(), dim)
    assert fidelity(flipped, true2) > 1 - 1e-10
    assert fidelity(psi, true2) < 0.9
    ideal = teleport(q, kind).outcomes[(Z, O)].fidelity
    lossy = teleport(q, kind, DetectorModel(0.9)).outcomes[(Z, O)].fidelity
    assert ideal > 1 - 1e-10 and lossy < ideal - 1e-3
