import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import eval_genlaguerre

from catsim import (
    BeamsplitterSpec,
    CutoffError,
    FockVector,
    HeadroomError,
    MixedState,
    TruncationLeakError,
    apply_beamsplitter,
    apply_displacement,
    apply_phase_rotation,
    coherent_state,
    condition_on_outcome,
    cutoff_for,
    fidelity,
    fock_state,
    squeezed_photon,
    squeezed_vacuum,
    tensor,
)

amplitude = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)
angle = st.floats(0, math.pi / 2)
convention = st.sampled_from(["real-5050", "symmetric"])


def random_state(seed, dims):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=dims) + 1j * rng.normal(size=dims)
    return FockVector(v).normalized()


# -- independent oracles ------------------------------------------------------


def bs_polynomial(n1, n2, matrix, dim):
    """|n1, n2> through the coupler, by expanding creation-operator polynomials.

    Each input creation operator maps to ``sum_k M[k, j] a_k^dag``; the output
    is read off the coefficients of the bivariate polynomial.
    """
    def power(j, n):
        c = np.zeros((2, 2), dtype=complex)
        c[1, 0], c[0, 1] = matrix[0, j], matrix[1, j]
        out = np.ones((1, 1), dtype=complex)
        for _ in range(n):
            out = _mul2d(out, c)
        return out

    poly = _mul2d(power(0, n1), power(1, n2))
    amps = np.zeros((dim, dim), dtype=complex)
    for p in range(poly.shape[0]):
        for q in range(poly.shape[1]):
            if poly[p, q] != 0:
                amps[p, q] = poly[p, q] * math.sqrt(
                    math.factorial(p) * math.factorial(q) / (math.factorial(n1) * math.factorial(n2))
                )
    return amps


def _mul2d(a, b):
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1), dtype=complex)
    for i, j in np.ndindex(*a.shape):
        if a[i, j] != 0:
            out[i : i + b.shape[0], j : j + b.shape[1]] += a[i, j] * b
    return out


def displacement_element(m, n, beta):
    """<m|D(beta)|n> from the associated Laguerre form."""
    x = abs(beta) ** 2
    pref = math.exp(-x / 2)
    if m >= n:
        return math.sqrt(math.factorial(n) / math.factorial(m)) * beta ** (m - n) * pref * eval_genlaguerre(n, m - n, x)
    return math.sqrt(math.factorial(m) / math.factorial(n)) * (-np.conj(beta)) ** (n - m) * pref * eval_genlaguerre(m, n - m, x)


def squeeze_expm(r, dim):
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    return scipy.linalg.expm(0.5 * r * (a @ a - a.T @ a.T))


# -- cutoff policy --------------------------------------------------------------


@pytest.mark.parametrize("beta,dim", [(0, 24), (1, 24), (2, 30), (math.sqrt(8), 40), (5, 72)])
def test_cutoff_policy(beta, dim):
    assert cutoff_for(beta) == dim


@given(st.floats(0, 6))
def test_cutoff_holds_coherent_tail(beta):
    assert coherent_state(beta, cutoff_for(beta)).deficit < 1e-12


# -- state construction ---------------------------------------------------------


def test_coherent_examples():
    assert abs(coherent_state(1.0, 30).amps[0] - math.exp(-0.5)) < 1e-14
    a, b = coherent_state(1.0, 40), coherent_state(-1.0, 40)
    assert abs(a.inner(b) - math.exp(-2)) < 1e-12
    assert np.allclose(coherent_state(0, 24).amps, fock_state(0, 24).amps)
    pair = tensor([a, a])
    assert abs(pair.amps[1, 1] - math.exp(-1)) < 1e-12


def test_fock_state_rejects_small_cutoff():
    with pytest.raises(CutoffError):
        fock_state(5, 5)


def test_truncation_deficit_reported():
    with pytest.raises(CutoffError):
        coherent_state(3.0, 10)
    s = coherent_state(1.0, 18)
    assert 0 < s.deficit < 1e-10
    assert abs(s.norm() - 1) < 1e-12


def test_squeezed_frozen_values():
    assert abs(squeezed_vacuum(0.5, 40).amps[2] - (-0.30771918)) < 1e-8
    assert abs(squeezed_photon(0.3, 40).amps[3] - (-0.33382549)) < 1e-8


@pytest.mark.parametrize("r", [-1.0, -0.3, 0.2, 0.5, 0.9])
def test_squeezing_series_matches_expm(r):
    s = squeeze_expm(r, 600)
    assert np.allclose(squeezed_vacuum(r, 160).amps, s[:160, 0], atol=1e-12)
    assert np.allclose(squeezed_photon(r, 160).amps, s[:160, 1], atol=1e-12)


def test_squeezed_parity_and_bounds():
    sp = squeezed_photon(-0.6, 60).amps
    assert np.all(sp[::2] == 0)
    sv = squeezed_vacuum(0.6, 60).amps
    assert np.all(sv[1::2] == 0)
    assert np.allclose(squeezed_photon(0.0, 10).amps, fock_state(1, 10).amps)
    with pytest.raises(ValueError):
        squeezed_photon(5.5, 10)
    with pytest.raises(CutoffError):
        squeezed_photon(0.1, 1)


# -- beamsplitter ----------------------------------------------------------------


@given(st.integers(0, 5), st.integers(0, 5), angle, convention)
def test_beamsplitter_matches_polynomial_expansion(n1, n2, theta, conv):
    dim = 12
    spec = BeamsplitterSpec(theta, conv)
    out = apply_beamsplitter(tensor([fock_state(n1, dim), fock_state(n2, dim)]), (0, 1), spec)
    assert np.allclose(out.amps, bs_polynomial(n1, n2, spec.mode_matrix(), dim), atol=1e-11)


@given(amplitude, amplitude, angle, convention)
def test_beamsplitter_maps_coherent_amplitudes(b1, b2, theta, conv):
    dim = 40
    spec = BeamsplitterSpec(theta, conv)
    out = apply_beamsplitter(tensor([coherent_state(b1, dim), coherent_state(b2, dim)]), (0, 1), spec)
    c1, c2 = spec.mode_matrix() @ np.array([b1, b2])
    assert fidelity(tensor([coherent_state(c1, dim), coherent_state(c2, dim)]), out) > 1 - 1e-9


def test_fifty_fifty_examples():
    dim = 30
    out = apply_beamsplitter(tensor([coherent_state(1, dim)] * 2), (0, 1), BeamsplitterSpec())
    want = tensor([coherent_state(0, dim), coherent_state(math.sqrt(2), dim)])
    assert fidelity(want, out) > 1 - 1e-10
    # split odd cat -> |a,a> - |-a,-a>
    a = 1.0
    cat = FockVector(coherent_state(math.sqrt(2) * a, dim).amps - coherent_state(-math.sqrt(2) * a, dim).amps)
    bell = apply_beamsplitter(tensor([cat.normalized(), fock_state(0, dim)]), (0, 1), BeamsplitterSpec())
    ref = FockVector(
        tensor([coherent_state(a, dim)] * 2).amps - tensor([coherent_state(-a, dim)] * 2).amps
    )
    assert fidelity(ref, bell) > 1 - 1e-10


@given(st.integers(0, 2**32 - 1), angle, convention)
def test_beamsplitter_is_unitary_and_conserves_photons(seed, theta, conv):
    dim = 8
    n = np.add.outer(np.arange(dim), np.arange(dim))
    amps = random_state(seed, (dim, dim, 3)).amps * (n < dim)[:, :, None]
    state = FockVector(amps).normalized()
    out = apply_beamsplitter(state, (0, 1), BeamsplitterSpec(theta, conv))
    assert abs(out.norm() - 1) < 1e-12
    for total in range(dim):
        mask = (n == total)[:, :, None]
        before = np.sum(np.abs(state.amps * mask) ** 2)
        after = np.sum(np.abs(out.amps * mask) ** 2)
        assert abs(before - after) < 1e-12


def test_beamsplitter_mode_order_and_third_mode():
    dim = 10
    s = tensor([fock_state(1, dim), fock_state(0, dim), fock_state(2, dim)])
    spec = BeamsplitterSpec(0.4, "symmetric")
    direct = apply_beamsplitter(s, (0, 2), spec)
    # the same coupler on (2, 0) is the transposed mode matrix
    sym = np.moveaxis(apply_beamsplitter(FockVector(np.moveaxis(s.amps, 2, 0)), (0, 2), spec).amps, 0, 2)
    assert abs(direct.norm() - 1) < 1e-12
    assert np.allclose(direct.amps[:, 1, :], 0)
    assert sym.shape == direct.amps.shape


def test_beamsplitter_leak_raises():
    s = tensor([fock_state(4, 6), fock_state(4, 6)])
    with pytest.raises(TruncationLeakError):
        apply_beamsplitter(s, (0, 1), BeamsplitterSpec())


def test_beamsplitter_rejects_bad_arguments():
    with pytest.raises(ValueError):
        BeamsplitterSpec(0.3, "other")
    with pytest.raises(ValueError):
        BeamsplitterSpec(2.0)
    s = tensor([fock_state(0, 5), fock_state(0, 6)])
    with pytest.raises(ValueError):
        apply_beamsplitter(s, (0, 1), BeamsplitterSpec())
    with pytest.raises(ValueError):
        apply_beamsplitter(s, (0, 0), BeamsplitterSpec())


@given(angle, convention)
def test_generator_exponentiates_to_mode_matrix(theta, conv):
    spec = BeamsplitterSpec(theta, conv)
    assert np.allclose(scipy.linalg.expm(-1j * spec.generator()), spec.mode_matrix(), atol=1e-12)


# -- displacement and phase ------------------------------------------------------


@pytest.mark.parametrize("beta", [0.3, -0.7j, 1 + 0.5j, 1.4])
def test_displacement_matches_laguerre(beta):
    dim = 40
    for n in range(6):
        col = apply_displacement(fock_state(n, dim), 0, beta).amps
        want = np.array([displacement_element(m, n, beta) for m in range(12)])
        assert np.allclose(col[:12], want, atol=1e-11)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_displacement_shifts_coherent_state(a, d):
    dim = 50
    out = apply_displacement(coherent_state(a, dim), 0, 1j * d)
    assert fidelity(coherent_state(a + 1j * d, dim), out) > 1 - 1e-9


def test_displacement_headroom_error():
    with pytest.raises(HeadroomError):
        apply_displacement(fock_state(0, 8), 0, 2.5)


@given(st.integers(0, 2**32 - 1), amplitude)
def test_displacement_unitary_within_headroom(seed, beta):
    dim = 60
    amps = np.zeros(dim, dtype=complex)
    amps[:8] = random_state(seed, 8).amps
    out = apply_displacement(FockVector(amps), 0, beta)
    assert abs(out.norm() - 1) < 1e-9


def test_phase_rotation():
    dim = 30
    out = apply_phase_rotation(coherent_state(1.2, dim), 0, math.pi)
    assert fidelity(coherent_state(-1.2, dim), out) > 1 - 1e-12
    rho = MixedState.from_pure(coherent_state(0.7, dim))
    rot = apply_phase_rotation(rho, 0, math.pi / 2)
    assert fidelity(coherent_state(0.7j, dim), rot) > 1 - 1e-12
    with pytest.raises(ValueError):
        apply_phase_rotation(rho, 1, 0.1)


# -- measurement, fidelity, mixed states ---------------------------------------


def test_condition_on_outcome_examples():
    dim = 20
    s = tensor([coherent_state(1, dim), coherent_state(0.5, dim)])
    out = condition_on_outcome(s, (0,), (1,))
    assert abs(out.probability - math.exp(-1)) < 1e-12
    assert fidelity(coherent_state(0.5, dim), out.state) > 1 - 1e-12
    empty = condition_on_outcome(tensor([fock_state(0, dim), fock_state(1, dim)]), (0,), (3,))
    assert empty.empty and empty.probability == 0
    assert condition_on_outcome(s, (0,), (dim,)).empty


@given(st.integers(0, 2**32 - 1))
def test_condition_on_outcome_probabilities_sum_to_one(seed):
    s = random_state(seed, (5, 4, 3))
    total = sum(condition_on_outcome(s, (0, 2), (a, b)).probability for a in range(5) for b in range(3))
    assert abs(total - 1) < 1e-12


def test_condition_on_outcome_errors():
    s = tensor([fock_state(0, 4), fock_state(0, 4)])
    with pytest.raises(ValueError):
        condition_on_outcome(s, (0, 1), (0,))
    with pytest.raises(ValueError):
        condition_on_outcome(s, (0, 0), (0, 0))
    with pytest.raises(ValueError):
        condition_on_outcome(s, (0,), (-1,))
    with pytest.raises(ValueError):
        condition_on_outcome(s, (0, 1), (0, 0))


def test_fidelity_pure_and_mixed():
    dim = 20
    a, b = coherent_state(1, dim), coherent_state(-1, dim)
    assert abs(fidelity(a, b) - math.exp(-4)) < 1e-12
    rho = MixedState(0.5 * (MixedState.from_pure(a).matrix + MixedState.from_pure(b).matrix))
    assert abs(fidelity(a, rho) - 0.5 * (1 + math.exp(-4))) < 1e-12
    assert abs(rho.purity() - 0.5 * (1 + math.exp(-4))) < 1e-12
    with pytest.raises(ValueError):
        fidelity(coherent_state(1, 10), rho)


def test_resized_tracks_deficit():
    s = coherent_state(2, 40)
    cut = s.resized(5)
    assert cut.dims == (5,)
    assert abs(cut.deficit - (1 - np.sum(np.abs(s.amps[:5]) ** 2))) < 1e-12
    assert np.allclose(cut.resized(40).amps[:5], s.amps[:5])
    with pytest.raises(ValueError):
        s.resized((3, 3))


def test_fock_vector_is_immutable():
    s = coherent_state(1, 20)
    with pytest.raises(ValueError):
        s.amps[0] = 0
