import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catsim import (
    CatSpec,
    DetectorModel,
    FockVector,
    HadamardChannel,
    HadamardConfig,
    HadamardGrid,
    MixedState,
    QubitSpec,
    ResourceKind,
    apply_displacement,
    cat_state,
    coherent_state,
    computational_readout,
    count_prob_closed,
    fidelity,
    fringe_sweep,
    hadamard_target,
    qubit_state,
    rotated_hadamard,
    visibility,
)
from catsim.teleport import teleport_cutoff

EXACT = ResourceKind.exact_cat()
SQUEEZED = ResourceKind.squeezed()
thetas = st.floats(0, math.pi)
phis = st.floats(0, 2 * math.pi)


def count_oracle(q, n, m, theta=math.pi / 8):
    """P(n, m) for exact resources, from the four product-coherent branches.

    After the symmetric coupler every branch is a product of coherent states
    of modulus alpha, so counting (n, m) leaves A|a> - B|-a> with
    branch-dependent phases e^{+-i theta (n+m)} and parity signs.
    """
    a2 = q.alpha**2
    x = math.exp(-2 * a2)
    s = n + m
    mu, nu = q.mu, q.nu
    A = mu * cmath.exp(1j * theta * s) + nu * (-1) ** n * cmath.exp(-1j * theta * s)
    B = mu * (-1) ** m * cmath.exp(-1j * theta * s) + nu * (-1) ** s * cmath.exp(1j * theta * s)
    out = abs(A) ** 2 + abs(B) ** 2 - 2 * x * (A.conjugate() * B).real
    norm_in = 1 + 2 * x * (mu.conjugate() * nu).real
    norm_bell = 2 * (1 - x * x)
    return x * a2**s / (math.factorial(n) * math.factorial(m)) * out / (norm_in * norm_bell)


COUNTS = [(1, 1), (2, 1), (1, 2), (2, 2), (0, 1), (3, 0), (3, 1), (0, 0)]


@pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0, 2.0])
def test_count_probabilities_match_oracle(alpha):
    grid = HadamardGrid(alpha, EXACT, counts=COUNTS)
    ts, ps = np.linspace(0.05, 3.0, 7), np.linspace(0, 6, 5)
    for c in COUNTS:
        sim = grid.probability(c, ts, ps)
        for i, t in enumerate(ts):
            for j, p in enumerate(ps):
                q = QubitSpec(alpha, t, p)
                if q.norm_sq > 1e-6:
                    assert abs(sim[i, j] - count_oracle(q, *c)) < 1e-12


@given(st.floats(0.1, 2.5), thetas, phis)
def test_printed_count_formula_is_exact_for_single_pairs(alpha, theta, phi):
    q = QubitSpec(alpha, theta, phi)
    if q.norm_sq < 1e-6:
        return
    assert abs(count_prob_closed(q, 1, 1) - count_oracle(q, 1, 1)) < 1e-12


def test_count_formula_examples():
    q = QubitSpec(1.0, math.pi / 4)
    left = count_prob_closed(q, 0, 0) / math.exp(-2)
    assert abs(left - 0.775803) < 1e-6
    total = sum(count_prob_closed(QubitSpec(1.0, 0.0, 0.0), n, m) for n in range(40) for m in range(40))
    left0 = 1 / (1 - math.exp(-4))
    assert abs(total - left0) < 1e-12
    with pytest.raises(ValueError):
        count_prob_closed(q, -1, 0)


def test_count_ratio_of_printed_formula():
    q = QubitSpec(0.7, 0.3, 0.4)
    assert abs(count_prob_closed(q, 1, 1) / count_prob_closed(q, 2, 1) - 2 / 0.49) < 1e-12


@pytest.mark.xfail(strict=True, reason="simulated P(2,2)/P(1,1) depends on the input")
def test_two_two_ratio_is_alpha4_over_4():
    alpha = 1.0
    grid = HadamardGrid(alpha, EXACT)
    ts = np.linspace(0.1, 3.0, 9)
    ratio = grid.probability((2, 2), ts, ts) / grid.probability((1, 1), ts, ts)
    assert np.allclose(ratio, alpha**4 / 4, rtol=1e-6)


@pytest.mark.xfail(strict=True, reason="simulated P(1,1)/P(2,1) depends on the input")
def test_one_one_over_two_one_is_two_over_alpha2():
    alpha = 0.5
    grid = HadamardGrid(alpha, EXACT)
    ts = np.linspace(0.1, 3.0, 9)
    ratio = grid.probability((1, 1), ts, ts) / grid.probability((2, 1), ts, ts)
    assert np.allclose(ratio, 2 / alpha**2, rtol=1e-6)


def test_target_example():
    alpha, dim = 1.0, 30
    q = QubitSpec.from_coefficients(alpha, 1, 1j)
    assert fidelity(coherent_state(-alpha, dim), hadamard_target(q, dim)) > 1 - 1e-12


@given(st.sampled_from([0.3, 0.5, 1.0, 2.0]), thetas, phis)
def test_exact_gate_is_perfect(alpha, theta, phi):
    q = QubitSpec(alpha, theta, phi)
    if q.norm_sq < 1e-6:
        return
    dim = teleport_cutoff(alpha, EXACT)
    out = rotated_hadamard(qubit_state(q, dim), alpha, EXACT)
    assert abs(out.probability - count_oracle(q, 1, 1)) < 1e-12
    if not out.empty:
        assert fidelity(hadamard_target(q, dim), out.state) > 1 - 1e-9


def _coefficients(state, alpha):
    d = state.dims[0]
    basis = np.stack([coherent_state(alpha, d).amps, coherent_state(-alpha, d).amps], axis=1)
    coef, *_ = np.linalg.lstsq(basis, state.amps, rcond=None)
    return coef


@pytest.mark.parametrize("theta,phi", [(0.3, 0.2), (1.0, 2.0), (2.2, 4.0)])
def test_conjugated_gate_squares_to_identity(theta, phi):
    """Z'^-1 H Z' is the Hadamard, so two conjugated gates return the input.

    ``Z'`` maps ``mu|a> + nu|-a>`` to ``mu|a> - i nu|-a>``; the relabelings
    are classical and the two gates are simulated in Fock space.
    """
    alpha = 1.0
    dim = teleport_cutoff(alpha, EXACT)
    q = QubitSpec(alpha, theta, phi)
    coef = np.array([q.mu, -1j * q.nu])
    state = qubit_state(QubitSpec.from_coefficients(alpha, *coef), dim)
    for _ in range(2):
        state = rotated_hadamard(state, alpha, EXACT).state
    mu, nu = _coefficients(state, alpha) * np.array([1, 1j])
    back = qubit_state(QubitSpec.from_coefficients(alpha, mu, nu), dim)
    assert fidelity(qubit_state(q, dim), back) > 1 - 1e-9


@pytest.mark.parametrize(
    "kind,eta,cfg",
    [
        (EXACT, 1.0, HadamardConfig()),
        (SQUEEZED, 1.0, HadamardConfig()),
        (SQUEEZED, 0.9, HadamardConfig()),
        (EXACT, 0.8, HadamardConfig(accept_odd_pairs=True)),
    ],
)
def test_channel_matches_direct_simulation(kind, eta, cfg):
    alpha = 0.5
    det = DetectorModel(eta)
    channel = HadamardChannel(alpha, kind, cfg, det)
    dim = max(teleport_cutoff(alpha, kind), channel.n_in or 0)
    inputs = [
        qubit_state(QubitSpec(alpha, 0.6, 1.1), dim),
        apply_displacement(cat_state(CatSpec(alpha), dim), 0, 0.7j),
    ]
    for psi in inputs:
        fast = channel.apply(psi)
        direct = rotated_hadamard(psi, alpha, kind, cfg, det)
        assert abs(fast.probability - direct.probability) < 1e-12
        rho = direct.state if isinstance(direct.state, MixedState) else MixedState.from_pure(direct.state)
        d = min(rho.dim, fast.state.dim)
        assert np.allclose(rho.matrix[:d, :d], fast.state.matrix[:d, :d], atol=1e-10)


def test_channel_input_levels():
    assert HadamardChannel(1.0, EXACT).n_in == 3
    assert HadamardChannel(1.0, EXACT, detector=DetectorModel(0.8)).n_in > 3


def test_config_validation():
    with pytest.raises(ValueError):
        HadamardConfig(accepted=(1, -1))
    assert HadamardConfig(accept_odd_pairs=True).rules[0].name == "ODD"
    assert HadamardConfig().beamsplitter.convention == "symmetric"


@pytest.mark.parametrize("alpha", [0.3, 1.0, 2.0])
def test_readout_of_basis_states(alpha):
    dim = 40
    fail = math.exp(-2 * alpha**2)
    plus = computational_readout(coherent_state(alpha, dim), alpha)
    assert abs(plus.p_plus - (1 - fail)) < 1e-12
    assert abs(plus.p_fail - fail) < 1e-12
    assert plus.p_minus < 1e-14 and plus.p_ambiguous < 1e-14
    minus = computational_readout(MixedState.from_pure(coherent_state(-alpha, dim)), alpha)
    assert abs(minus.p_minus + minus.p_ambiguous - (1 - fail)) < 1e-12
    assert minus.p_plus < 1e-14


def test_lossy_readout_sums_to_one():
    r = computational_readout(cat_state(CatSpec(0.8), 30), 0.8, DetectorModel(0.7))
    assert abs(sum(r) - 1) < 1e-12


def test_fringe_ideal_exact():
    alpha = 0.5
    pts = fringe_sweep(alpha, EXACT, np.linspace(-2, 2, 9))
    for p in pts:
        if not p.empty:
            assert abs(p.p_plus + p.p_minus + p.p_readout_fail + p.p_ambiguous - 1) < 1e-10
    assert visibility([p.p_plus for p in pts]) > 0.5


def test_visibility():
    assert visibility([0.2, math.nan, 0.6]) == pytest.approx(0.5)
    assert visibility([0.0, 0.0]) == 0.0
    with pytest.raises(ValueError):
        visibility([math.nan])
