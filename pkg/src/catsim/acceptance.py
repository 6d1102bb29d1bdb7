"""Acceptance suite: twelve numbered criteria with measured values.

Every criterion runs at its stated tolerance and returns named checks.
Numerical precondition failures (cutoffs too small, degenerate states) are
reported as failed criteria with the diagnostic, never raised.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .detection import DetectorModel, lossy_povm, measure_modes
from .fock import (
    BeamsplitterSpec,
    CutoffError,
    apply_beamsplitter,
    apply_displacement,
    apply_phase_rotation,
    coherent_state,
    condition_on_outcome,
    fidelity,
    tensor,
)
from .hadamard import (
    HadamardGrid,
    count_prob_closed,
    fringe_sweep,
    hadamard_target,
    rotated_hadamard,
    visibility,
)
from .states import (
    DegenerateStateError,
    QubitSpec,
    ResourceKind,
    cat_fidelity_closed,
    optimal_r_numeric,
    optimal_r_closed_form,
    qubit_state,
    stationary_residual,
)
from .teleport import (
    BS_5050,
    TeleportGrid,
    Z,
    O,
    E,
    bell_resource,
    min_p_succ,
    p_fail_closed,
    teleport,
    teleport_cutoff,
)

__all__ = ["Check", "CriterionResult", "VerifyReport", "CRITERIA", "run_criterion", "verify"]

EXACT = ResourceKind.exact_cat()
SQUEEZED = ResourceKind.squeezed()
TELEPORT_ALPHAS = (0.5, 1.0, 2.0)
HADAMARD_ALPHAS = (0.3, 0.5, 1.0, 2.0)
FRINGE_ALPHAS = (0.3, 0.5, 1.0)
ETA_SEQUENCE = (1.0, 0.95, 0.9, 0.8)


def input_grid(n: int = 64):
    """``theta`` over [0, pi) and ``phi`` over [0, 2 pi), ``n`` points each."""
    return np.arange(n) * math.pi / n, np.arange(n) * 2 * math.pi / n


@dataclass
class Check:
    label: str
    passed: bool
    value: object
    target: str

    def __post_init__(self):
        self.passed = bool(self.passed)
        if isinstance(self.value, (np.floating, np.integer)):
            self.value = self.value.item()


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list = field(default_factory=list)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and bool(self.checks) and all(c.passed for c in self.checks)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.error:
            detail = self.error
        else:
            detail = "; ".join(
                f"{c.label}={_fmt(c.value)} [{c.target}]{'' if c.passed else ' !'}"
                for c in self.checks
            )
        return f"{status} criterion {self.number:2d} {self.title}: {detail}"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    return str(v)


@dataclass
class VerifyReport:
    results: list
    dim: int | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        return [r.line() for r in self.results]

    def to_dict(self) -> dict:
        return {
            "dim_override": self.dim,
            "passed": self.passed,
            "n_passed": sum(r.passed for r in self.results),
            "n_criteria": len(self.results),
            "criteria": [r.to_dict() for r in self.results],
        }


# -- criterion 1 -----------------------------------------------------------


def criterion_1(dim=None) -> list[Check]:
    value, theta, phi = min_p_succ(1.0, grid=64)
    checks = [Check("min P_succ(alpha=1)", abs(value - 0.67) <= 0.005, value, "0.67 +- 0.005")]
    thetas, phis = input_grid(64)
    for alpha in TELEPORT_ALPHAS:
        d = dim or teleport_cutoff(alpha, EXACT)
        resource = bell_resource(alpha, EXACT, d)
        worst = 0.0
        for t in thetas:
            for p in phis:
                q = QubitSpec(alpha, t, p)
                state = apply_beamsplitter(tensor([qubit_state(q, d), resource]), (0, 1), BS_5050)
                sim = condition_on_outcome(state, (0, 1), (0, 0)).probability
                worst = max(worst, abs(sim - p_fail_closed(q)))
        checks.append(Check(f"max |P00 sim - closed| a={alpha}", worst <= 1e-6, worst, "<= 1e-6"))
    return checks


# -- criterion 2 -----------------------------------------------------------


def criterion_2(dim=None) -> list[Check]:
    thetas, phis = input_grid(64)
    checks = []
    for alpha in TELEPORT_ALPHAS:
        worst = max(p_fail_closed(QubitSpec(alpha, t, p)) for t in thetas for p in phis)
        checks.append(Check(f"max P_fail a={alpha}", worst <= 0.5 + 1e-9, worst, "<= 0.5 + 1e-9"))
    return checks


# -- criterion 3 -----------------------------------------------------------


def criterion_3(dim=None) -> list[Check]:
    rng = np.random.default_rng(20070601)
    angles = np.column_stack([rng.uniform(0, math.pi, 10), rng.uniform(0, 2 * math.pi, 10)])
    checks = []
    for alpha in TELEPORT_ALPHAS:
        worst = 0.0
        for theta, phi in angles:
            rep = teleport(QubitSpec(alpha, theta, phi), EXACT, dim=dim)
            worst = max(worst, abs(rep.p_odd - 0.5))
        checks.append(Check(f"max |P_odd - 1/2| a={alpha}", worst <= 1e-6, worst, "<= 1e-6"))
    return checks


# -- criterion 4 -----------------------------------------------------------


def criterion_4(dim=None) -> list[Check]:
    thetas, phis = input_grid(64)
    checks = []
    for alpha in TELEPORT_ALPHAS:
        fid = TeleportGrid(alpha, EXACT, dim=dim).evaluate(thetas, phis)[(Z, O)][1]
        worst = float(np.max(1 - fid))
        # direct simulation on a coarse sub-grid as a cross-check of the linear engine
        direct = max(
            1 - teleport(QubitSpec(alpha, t, p), EXACT, dim=dim).outcomes[(Z, O)].fidelity
            for t in thetas[::16]
            for p in phis[::16]
        )
        worst = max(worst, direct)
        checks.append(Check(f"max 1-F(zero,odd) a={alpha}", worst <= 1e-9, worst, "<= 1e-9"))
    return checks


# -- criterion 5 -----------------------------------------------------------


def criterion_5(dim=None) -> list[Check]:
    thetas, phis = input_grid(64)
    res = TeleportGrid(1.0, SQUEEZED, dim=dim).evaluate(thetas, phis)
    fid = res[(Z, O)][1]
    best = np.unravel_index(np.nanargmax(fid), fid.shape)
    mu = math.cos(thetas[best[0]])
    nu = complex(np.exp(1j * phis[best[1]])) * math.sin(thetas[best[0]])
    # weight of the input on the even cat; zero on the mu = -nu axis
    even_weight = abs(mu + nu) ** 2 / 2
    p_odd = res[(Z, O)][0] + res[(O, Z)][0]
    p_even = res[(Z, E)][0] + res[(E, Z)][0]
    p_succ = p_odd + p_even**2 / (1 - p_odd)
    return [
        Check("max F(zero,odd)", np.nanmax(fid) > 0.99, float(np.nanmax(fid)), "> 0.99"),
        Check("min F(zero,odd)", np.nanmin(fid) > 0.9, float(np.nanmin(fid)), "> 0.9"),
        Check("even-cat weight at argmax", even_weight < 0.05, even_weight, "< 0.05 (mu = -nu axis)"),
        Check("min P_succ (retry bookkeeping)", abs(p_succ.min() - 0.67) <= 0.005, float(p_succ.min()),
              "0.67 +- 0.005"),
    ]


# -- criterion 6 -----------------------------------------------------------


def criterion_6(dim=None) -> list[Check]:
    f1 = optimal_r_numeric(1.0).fidelity
    f2 = optimal_r_numeric(math.sqrt(2)).fidelity
    f0 = optimal_r_numeric(0.01).fidelity
    grid = [optimal_r_numeric(a / 10).fidelity for a in range(1, 21)]
    steps = np.diff(grid)
    return [
        Check("F_max(1)", abs(f1 - 0.997) <= 0.001, f1, "0.997 +- 0.001"),
        Check("F_max(sqrt 2)", abs(f2 - 0.974) <= 0.001, f2, "0.974 +- 0.001"),
        Check("F_max(0.01)", f0 >= 0.9999, f0, ">= 0.9999"),
        Check("max step of F_max on 0.1..2.0", np.all(steps < 0), float(steps.max()), "< 0"),
    ]


# -- criterion 7 -----------------------------------------------------------


def _fidelity_gradient(alpha: float, r: float) -> float:
    """dF/dr of the closed-form cat fidelity."""
    return cat_fidelity_closed(alpha, r) * (-3 * math.tanh(r) - alpha**2 / math.cosh(r) ** 2)


def criterion_7(dim=None) -> list[Check]:
    alpha = 2.0
    r_print = optimal_r_closed_form(alpha)
    opt = optimal_r_numeric(alpha)
    # r is signed and the constructive optimum is negative, so the printed
    # magnitude is tested on that branch; the other sign is only reported
    grad = abs(_fidelity_gradient(alpha, -r_print))
    grad_pos = abs(_fidelity_gradient(alpha, r_print))
    h = 1e-6
    fd = abs(cat_fidelity_closed(alpha, -r_print + h) - cat_fidelity_closed(alpha, -r_print - h)) / (2 * h)
    resid = abs(stationary_residual(alpha, opt.r))
    return [
        Check("|r| printed closed form", abs(r_print - 0.5493) <= 1e-4, r_print, "~0.5493"),
        Check("|dF/dr| at -|r| printed", grad > 0.1, grad, "> 0.1"),
        Check("|dF/dr| at +|r| printed", True, grad_pos, "reported"),
        Check("|dF/dr| finite difference", fd > 0.1, fd, "> 0.1"),
        Check("|r| numeric optimum", True, abs(opt.r), "reported"),
        Check("stationary residual at optimum", resid <= 1e-8, resid, "<= 1e-8"),
    ]


# -- criterion 8 -----------------------------------------------------------


def criterion_8(dim=None) -> list[Check]:
    thetas, phis = input_grid(16)
    checks = []
    for alpha in HADAMARD_ALPHAS:
        grid = HadamardGrid(alpha, EXACT, dim=dim)
        worst = float(np.nanmax(1 - grid.fidelity(thetas, phis)))
        d = grid.dim
        for t in thetas[::4]:
            for p in phis[::4]:
                q = QubitSpec(alpha, t, p)
                out = rotated_hadamard(qubit_state(q, d), alpha, EXACT)
                worst = max(worst, 1 - fidelity(hadamard_target(q, out.state.dims[0]), out.state))
        checks.append(Check(f"max 1-F(H target) a={alpha}", worst <= 1e-9, worst, "<= 1e-9"))
    return checks


# -- criterion 9 -----------------------------------------------------------


def _spread(x) -> float:
    x = np.asarray(x, float)
    return float((x.max() - x.min()) / abs(x.mean()))


def criterion_9(dim=None) -> list[Check]:
    thetas, phis = input_grid(16)
    checks = []
    for alpha in (0.5, 1.0):
        grid = HadamardGrid(alpha, EXACT, dim=dim)
        sim = {}
        for counts in ((1, 1), (2, 1), (2, 2)):
            sim[counts] = grid.probability(counts, thetas, phis)
            closed = np.array(
                [[count_prob_closed(QubitSpec(alpha, t, p), *counts) for p in phis] for t in thetas]
            )
            s = _spread(sim[counts] / closed)
            checks.append(Check(f"ratio spread {counts} a={alpha}", s < 1e-6, s, "< 1e-6"))
        ratio = sim[(1, 1)] / sim[(2, 1)]
        err = float(np.max(np.abs(ratio * alpha**2 / 2 - 1)))
        checks.append(Check(f"max rel err P11/P21 vs 2/a^2 a={alpha}", err <= 1e-6, err, "<= 1e-6"))
    return checks


# -- criterion 10 ----------------------------------------------------------


def criterion_10(dim=None) -> list[Check]:
    checks = []
    for alpha in FRINGE_ALPHAS:
        deltas = np.linspace(-2 / alpha, 2 / alpha, 81)
        exact = fringe_sweep(alpha, EXACT, deltas)
        mid = exact[40]
        checks.append(Check(f"|P+ - P-| at delta=0 a={alpha}", abs(mid.p_plus - mid.p_minus) <= 1e-9,
                            abs(mid.p_plus - mid.p_minus), "<= 1e-9"))
        sym = max(
            abs(p.p_plus - q.p_minus)
            for p, q in zip(exact, exact[::-1])
            if not (p.empty or q.empty)
        )
        checks.append(Check(f"mirror asymmetry a={alpha}", sym <= 1e-9, sym, "<= 1e-9"))
        vis = []
        for eta in (1.0, 0.8):
            pts = fringe_sweep(alpha, SQUEEZED, deltas, DetectorModel(eta))
            norm_err = max(
                abs(p.p_plus + p.p_minus + p.p_readout_fail + p.p_ambiguous - 1)
                for p in pts
                if not p.empty
            )
            checks.append(Check(f"sum err a={alpha} eta={eta}", norm_err <= 1e-9, norm_err, "<= 1e-9"))
            vis.append(visibility(p.p_plus for p in pts))
        checks.append(Check(f"V squeezed a={alpha}", vis[0] < 1, vis[0], "< 1"))
        checks.append(Check(f"V drop 1.0->0.8 a={alpha}", vis[0] - vis[1] < 0.05, vis[0] - vis[1], "< 0.05"))
    return checks


# -- criterion 11 ----------------------------------------------------------


def criterion_11(dim=None) -> list[Check]:
    thetas, phis = input_grid(64)
    mins = []
    for eta in ETA_SEQUENCE:
        fid = TeleportGrid(1.0, SQUEEZED, DetectorModel(eta), dim=dim).evaluate(thetas, phis)[(Z, O)][1]
        mins.append(float(np.nanmin(fid)))
    ok = all(b <= a for a, b in zip(mins, mins[1:]))
    return [Check("min F(zero,odd) over eta " + str(ETA_SEQUENCE), ok, mins, "non-increasing")]


# -- criterion 12 ----------------------------------------------------------


def _random_state(rng, dim, n_photons):
    amps = np.zeros(dim, dtype=complex)
    amps[:n_photons] = rng.normal(size=n_photons) + 1j * rng.normal(size=n_photons)
    return amps / np.linalg.norm(amps)


def _kinds(alpha):
    # squeezed resources are studied at alpha <= 1; at alpha = 2 their
    # cutoff exceeds 170 and a doubled three-mode state no longer fits
    return (EXACT, SQUEEZED) if alpha <= 1 else (EXACT,)


def criterion_12(dim=None) -> list[Check]:
    from .fock import FockVector

    rng = np.random.default_rng(7)
    checks = []

    # unitarity of beamsplitters, displacement and phase rotation
    d = dim or 30
    worst = 0.0
    for conv, theta in (("real-5050", math.pi / 4), ("symmetric", math.pi / 8), ("real-5050", 0.3)):
        spec = BeamsplitterSpec(theta, conv)
        a = FockVector(_random_state(rng, d, d // 3))
        b = FockVector(_random_state(rng, d, d // 3))
        out = apply_beamsplitter(tensor([a, b]), (0, 1), spec)
        worst = max(worst, abs(out.norm() - 1))
    for alpha in TELEPORT_ALPHAS:
        dd = dim or teleport_cutoff(alpha, EXACT)
        worst = max(worst, abs(apply_displacement(coherent_state(alpha, dd), 0, 0.5j).norm() - 1))
        worst = max(worst, abs(apply_phase_rotation(coherent_state(alpha, dd), 0, 1.0).norm() - 1))
    checks.append(Check("max norm defect", worst <= 1e-9, worst, "<= 1e-9"))

    # POVM completeness
    dd = dim or 40
    comp = max(
        float(np.max(np.abs(lossy_povm(DetectorModel(eta), dd).sum(axis=0) - 1)))
        for eta in (0.0, 0.3, 0.8, 0.9, 0.95, 1.0)
    )
    checks.append(Check("POVM completeness", comp <= 1e-10, comp, "<= 1e-10"))

    # probability normalization of the full outcome table and of teleport reports
    q = QubitSpec(1.0, 0.7, 2.0)
    dd = dim or teleport_cutoff(1.0, EXACT)
    state = apply_beamsplitter(
        tensor([qubit_state(q, dd), bell_resource(1.0, EXACT, dd)]), (0, 1), BS_5050
    )
    table_err = 0.0
    for eta in (1.0, 0.9):
        table = measure_modes(state, (0, 1), DetectorModel(eta))
        table_err = max(table_err, abs(sum(o.probability for o in table.values()) - 1))
    checks.append(Check("outcome table sum err", table_err <= 1e-9, table_err, "<= 1e-9"))
    rep_err = 0.0
    for alpha in TELEPORT_ALPHAS:
        for eta in (1.0, 0.9):
            for kind in _kinds(alpha):
                rep = teleport(QubitSpec(alpha, 0.7, 2.0), kind, DetectorModel(eta), dim=dim)
                rep_err = max(rep_err, abs(rep.total - 1))
    checks.append(Check("teleport report sum err", rep_err <= 1e-6, rep_err, "<= 1e-6"))

    # cutoff doubling at alpha <= 2
    drift = 0.0
    for alpha in TELEPORT_ALPHAS:
        q = QubitSpec(alpha, 0.7, 2.0)
        for kind in _kinds(alpha):
            d1 = dim or teleport_cutoff(alpha, kind)
            for eta in (1.0, 0.9):
                r1 = teleport(q, kind, DetectorModel(eta), dim=d1)
                r2 = teleport(q, kind, DetectorModel(eta), dim=2 * d1)
                for pat, o in r1.outcomes.items():
                    o2 = r2.outcomes[pat]
                    drift = max(drift, abs(o.probability - o2.probability))
                    if o.probability > 1e-6:
                        drift = max(drift, abs(o.fidelity - o2.fidelity))
        g1 = HadamardGrid(alpha, EXACT, dim=dim or teleport_cutoff(alpha, EXACT))
        g2 = HadamardGrid(alpha, EXACT, dim=2 * g1.dim)
        drift = max(drift, abs(g1.probability("gate", 0.7, 2.0) - g2.probability("gate", 0.7, 2.0)).max())
    checks.append(Check("cutoff-doubling drift", drift < 1e-8, drift, "< 1e-8"))

    # conditional states stay physical
    ev = measure_modes(state, (0, 1), DetectorModel(0.9), [(0, 1), (1, 0), (0, 2)])
    herm = 0.0
    for o in ev.values():
        if o.state is not None:
            m = o.state.matrix
            herm = max(herm, float(np.abs(m - m.conj().T).max()), -float(o.state.eigenvalues().min()))
    checks.append(Check("conditional state defect", herm <= 1e-9, herm, "<= 1e-9"))
    return checks


CRITERIA: dict[int, tuple[str, Callable]] = {
    1: ("worst-case teleport success", criterion_1),
    2: ("P_fail bound", criterion_2),
    3: ("P_odd universality", criterion_3),
    4: ("exact teleportation", criterion_4),
    5: ("squeezed-photon teleportation quality", criterion_5),
    6: ("cat-approximation fidelity", criterion_6),
    7: ("closed-form squeezing discrepancy", criterion_7),
    8: ("rotated Hadamard exactness", criterion_8),
    9: ("count-probability proportionality", criterion_9),
    10: ("fringe behavior", criterion_10),
    11: ("loss monotonicity", criterion_11),
    12: ("numerical hygiene", criterion_12),
}


def run_criterion(number: int, dim: int | None = None) -> CriterionResult:
    title, fn = CRITERIA[number]
    result = CriterionResult(number, title)
    try:
        result.checks = fn(dim)
    except CutoffError as exc:
        result.error = f"cutoff-too-small: {exc}"
    except DegenerateStateError as exc:
        result.error = f"degenerate state: {exc}"
    return result


def verify(dim: int | None = None, only=None, progress: Callable | None = None) -> VerifyReport:
    """Run the acceptance criteria (all, or the numbers in ``only``).

    Args:
        dim: force this cutoff on every Fock-space simulation that takes one.
        only: iterable of criterion numbers.
        progress: called with each finished :class:`CriterionResult`.
    """
    numbers = sorted(only) if only else sorted(CRITERIA)
    results = []
    for n in numbers:
        res = run_criterion(n, dim)
        results.append(res)
        if progress:
            progress(res)
    return VerifyReport(results, dim)
