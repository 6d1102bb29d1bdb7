"""Figure reproduction and custom parameter sweeps with file outputs.

Each run writes ``<out>/<experiment>.csv`` (17 significant digits), a
gnuplot script ``<out>/<experiment>.plot`` reading that table, and
``<out>/manifest.json`` with the configuration, cutoffs, timing and the
flagged discrepancies between closed forms and simulation.
"""

from __future__ import annotations

import csv
import dataclasses
import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .detection import DetectorModel
from .fock import cutoff_for
from .hadamard import HadamardGrid, count_prob_closed, fringe_sweep, visibility
from .states import (
    QubitSpec,
    ResourceKind,
    cat_fidelity_closed,
    optimal_r_numeric,
    optimal_r_closed_form,
    stationary_residual,
)
from .teleport import (
    PATTERNS,
    TeleportGrid,
    Z,
    O,
    min_p_succ,
    p_fail_closed,
    teleport,
    teleport_cutoff,
)

__all__ = [
    "ConfigError",
    "FIGURES",
    "RunConfig",
    "SweepRecord",
    "run",
    "run_custom",
    "run_figure",
    "write_csv",
]

FIGURES = ("fig1", "fig3", "fig4", "fig5", "fig6", "fig7", "fig9", "fig11", "fig12")
CUSTOM = ("teleport", "hadamard", "fringe", "cat_fidelity")
FLOAT_FMT = "%.16e"


class ConfigError(ValueError):
    """Invalid run configuration."""


# figure defaults: alpha list, eta list, resource
_DEFAULTS = {
    "fig1": dict(alpha=[round(0.05 * i, 2) for i in range(41)], eta=[1.0], resource="sqphoton"),
    "fig3": dict(alpha=[1.0], eta=[1.0], resource="cat"),
    "fig4": dict(alpha=[round(0.05 * i, 2) for i in range(1, 41)], eta=[1.0], resource="cat"),
    "fig5": dict(alpha=[1.0], eta=[1.0], resource="sqphoton"),
    "fig6": dict(alpha=[1.0], eta=[0.9], resource="sqphoton"),
    "fig7": dict(alpha=[1.0], eta=[round(1 - 0.05 * i, 2) for i in range(11)], resource="sqphoton"),
    "fig9": dict(alpha=[1.0], eta=[1.0], resource="sqphoton"),
    "fig11": dict(alpha=[1.0, 0.5, 0.3], eta=[1.0, 0.9, 0.8], resource="sqphoton"),
    "fig12": dict(alpha=[1.0, 0.5, 0.3], eta=[1.0, 0.9, 0.8], resource="sqphoton"),
}


@dataclass
class RunConfig:
    """Everything a run depends on; ``None`` fields take the experiment's defaults.

    ``seed`` is accepted for forward compatibility; every computation here is
    deterministic.
    """

    experiment: str
    alpha: list | None = None
    eta: list | None = None
    grid: int = 64
    resource: str | None = None
    r_policy: str = "numeric"
    dim: int | None = None
    out: str = "catsim_out"
    workers: int | None = None
    seed: int | None = None
    theta: list | None = None
    phi: list | None = None
    delta: list | None = None

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "experiment" not in data:
            raise ConfigError("config needs an 'experiment'")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def merged(self, **overrides) -> RunConfig:
        """Copy with every non-None override applied, validated."""
        data = dataclasses.asdict(self)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.from_dict(data)

    def validate(self) -> None:
        if self.experiment not in FIGURES + CUSTOM:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        for name in ("alpha", "eta", "theta", "phi", "delta"):
            val = getattr(self, name)
            if val is None:
                continue
            if isinstance(val, (int, float)):
                val = [val]
                setattr(self, name, val)
            if not isinstance(val, (list, tuple)) or not val:
                raise ConfigError(f"{name} must be a non-empty list")
            try:
                val = [float(v) for v in val]
            except (TypeError, ValueError):
                raise ConfigError(f"{name} must hold numbers") from None
            if not all(math.isfinite(v) for v in val):
                raise ConfigError(f"{name} values must be finite")
            setattr(self, name, val)
        if self.alpha is not None:
            if self.experiment in ("fig1", "cat_fidelity"):
                if min(self.alpha) < 0:
                    raise ConfigError("alpha values must be non-negative")
            elif min(self.alpha) <= 0:
                raise ConfigError("alpha values must be positive")
        if self.eta is not None and not all(0.0 <= e <= 1.0 for e in self.eta):
            raise ConfigError("eta values must lie in [0, 1]")
        if not isinstance(self.grid, int) or isinstance(self.grid, bool) or self.grid < 2:
            raise ConfigError("grid must be an integer >= 2")
        if self.resource not in (None, "cat", "sqphoton"):
            raise ConfigError("resource must be 'cat' or 'sqphoton'")
        if self.r_policy not in ("numeric", "closed_form"):
            raise ConfigError("r_policy must be 'numeric' or 'closed_form'")
        if self.dim is not None and (not isinstance(self.dim, int) or self.dim < 1):
            raise ConfigError("dim must be a positive integer")
        if self.workers is not None and (not isinstance(self.workers, int) or self.workers < 1):
            raise ConfigError("workers must be a positive integer")
        if not isinstance(self.out, str) or not self.out:
            raise ConfigError("out must be a directory path")

    def resolved(self) -> RunConfig:
        """Fill ``None`` fields from the experiment defaults."""
        base = _DEFAULTS.get(self.experiment, dict(alpha=[1.0], eta=[1.0], resource="cat"))
        return dataclasses.replace(
            self,
            alpha=self.alpha if self.alpha is not None else list(base["alpha"]),
            eta=self.eta if self.eta is not None else list(base["eta"]),
            resource=self.resource or base["resource"],
            workers=self.workers or os.cpu_count() or 1,
        )

    @property
    def kind(self) -> ResourceKind:
        if self.resource == "cat":
            return ResourceKind.exact_cat()
        return ResourceKind.squeezed(r_policy=self.r_policy)


@dataclass
class SweepRecord:
    """One output row: inputs, outputs, and the cutoff behind them."""

    experiment: str
    inputs: dict
    outputs: dict
    cutoff: int | None = None
    deficit: float = 0.0

    def row(self) -> dict:
        out = {**self.inputs, **self.outputs}
        out["cutoff"] = self.cutoff
        out["deficit"] = self.deficit
        return out


@dataclass
class _Run:
    cfg: RunConfig
    records: dict = field(default_factory=dict)
    plots: dict = field(default_factory=dict)
    cutoffs: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT % float(v)
    return str(v)


def write_csv(path: Path, records: list[SweepRecord]) -> None:
    rows = [r.row() for r in records]
    header = list(rows[0]) if rows else []
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in header])


def _pmap(fn, tasks, workers):
    """Ordered map; process pool when more than one worker is requested."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def _input_angles(grid: int):
    return np.arange(grid) * math.pi / grid, np.arange(grid) * 2 * math.pi / grid


# -- closed-form squeezing discrepancy (always in the manifest) --------------


def squeezing_report(alphas=(0.5, 1.0, math.sqrt(2), 2.0)) -> list[dict]:
    """Printed closed-form squeezing against the true optimum, per alpha."""
    out = []
    for a in alphas:
        opt = optimal_r_numeric(a)
        r_cf = optimal_r_closed_form(a)
        out.append(
            dict(
                alpha=a,
                r_numeric=opt.r,
                F_numeric=opt.fidelity,
                r_closed_form=r_cf,
                F_closed_form=cat_fidelity_closed(a, -r_cf),
                residual_numeric=stationary_residual(a, opt.r),
                residual_closed_form=stationary_residual(a, -r_cf),
            )
        )
    return out


# -- figure tasks (top-level so they can run in worker processes) -----------


def _fig1_task(alpha):
    if alpha == 0:
        return dict(alpha=0.0, r_numeric=0.0, F_numeric=1.0, r_closed_form=0.0, F_closed_form=1.0)
    opt = optimal_r_numeric(alpha)
    r_cf = optimal_r_closed_form(alpha)
    return dict(
        alpha=alpha,
        r_numeric=opt.r,
        F_numeric=opt.fidelity,
        r_closed_form=r_cf,
        F_closed_form=cat_fidelity_closed(alpha, -r_cf),
    )


def _fig4_task(args):
    alpha, grid = args
    value, theta, phi = min_p_succ(alpha, grid)
    return dict(alpha=alpha, min_p_succ=value, argmin_theta=theta, argmin_phi=phi)


def _teleport_grid_task(args):
    alpha, eta, kind, grid, dim = args
    thetas, phis = _input_angles(grid)
    tg = TeleportGrid(alpha, kind, DetectorModel(eta), dim)
    prob, fid = tg.evaluate(thetas, phis)[(Z, O)]
    return tg.dim, thetas, phis, prob, fid


def _fringe_task(args):
    alpha, eta, kind, deltas = args
    return fringe_sweep(alpha, kind, deltas, DetectorModel(eta))


def _figure(run: _Run) -> None:
    cfg = run.cfg
    fig = cfg.experiment
    kind = cfg.kind
    recs = []

    if fig == "fig1":
        for row in _pmap(_fig1_task, cfg.alpha, cfg.workers):
            recs.append(SweepRecord(fig, {"alpha": row.pop("alpha")}, row))
        run.plots[fig] = [("plot", "1:3", "F numeric"), ("replot", "1:5", "F closed-form r")]

    elif fig == "fig3":
        thetas, phis = _input_angles(cfg.grid)
        for a in cfg.alpha:
            for t in thetas:
                for p in phis:
                    q = QubitSpec(a, t, p)
                    recs.append(SweepRecord(fig, dict(alpha=a, theta=t, phi=p), dict(p_fail=p_fail_closed(q))))
        run.plots[fig] = [("splot", "2:3:4", "P_fail")]

    elif fig == "fig4":
        for row in _pmap(_fig4_task, [(a, cfg.grid) for a in cfg.alpha], cfg.workers):
            recs.append(SweepRecord(fig, {"alpha": row.pop("alpha")}, row))
        run.plots[fig] = [("plot", "1:2", "min P_succ")]

    elif fig in ("fig5", "fig6", "fig7"):
        tasks = [(a, e, kind, cfg.grid, cfg.dim) for a in cfg.alpha for e in cfg.eta]
        results = _pmap(_teleport_grid_task, tasks, cfg.workers)
        for (a, e, *_), (dim, thetas, phis, prob, fid) in zip(tasks, results):
            run.cutoffs[f"alpha={a}"] = dim
            if fig == "fig7":
                k = np.unravel_index(np.nanargmin(fid), fid.shape)
                recs.append(
                    SweepRecord(
                        fig,
                        dict(alpha=a, eta=e),
                        dict(min_fidelity=fid[k], argmin_theta=thetas[k[0]], argmin_phi=phis[k[1]]),
                        dim,
                    )
                )
                continue
            for i, t in enumerate(thetas):
                for j, p in enumerate(phis):
                    recs.append(
                        SweepRecord(
                            fig,
                            dict(alpha=a, eta=e, theta=t, phi=p),
                            dict(fidelity=fid[i, j], probability=prob[i, j]),
                            dim,
                        )
                    )
        run.plots[fig] = (
            [("plot", "2:3", "min fidelity")]
            if fig == "fig7"
            else [("splot", "3:4:5", "fidelity"), ("splot", "3:4:6", "probability")]
        )

    elif fig == "fig9":
        thetas, phis = _input_angles(cfg.grid)
        for a in cfg.alpha:
            for e in cfg.eta:
                hg = HadamardGrid(a, kind, detector=DetectorModel(e), dim=cfg.dim)
                run.cutoffs[f"alpha={a}"] = hg.dim
                fid = hg.fidelity(thetas, phis)
                prob = hg.probability("gate", thetas, phis)
                for i, t in enumerate(thetas):
                    for j, p in enumerate(phis):
                        closed = count_prob_closed(QubitSpec(a, t, p), 1, 1)
                        recs.append(
                            SweepRecord(
                                fig,
                                dict(alpha=a, eta=e, theta=t, phi=p),
                                dict(fidelity=fid[i, j], probability=prob[i, j], p11_closed=closed),
                                hg.dim,
                            )
                        )
                ratio = prob / np.array(
                    [[count_prob_closed(QubitSpec(a, t, p), 1, 1) for p in phis] for t in thetas]
                )
                run.flags.setdefault("count_probability_ratio", []).append(
                    dict(alpha=a, eta=e, min=float(ratio.min()), max=float(ratio.max()))
                )
        run.plots[fig] = [("splot", "3:4:5", "fidelity"), ("splot", "3:4:6", "probability")]

    elif fig in ("fig11", "fig12"):
        tasks = []
        for a in cfg.alpha:
            deltas = cfg.delta if cfg.delta is not None else np.linspace(-2 / a, 2 / a, 81)
            tasks += [(a, e, kind, deltas) for e in cfg.eta]
        vis = []
        for (a, e, *_), pts in zip(tasks, _pmap(_fringe_task, tasks, cfg.workers)):
            run.cutoffs[f"alpha={a}"] = teleport_cutoff(a, kind)
            for pt in pts:
                outs = dataclasses.asdict(pt)
                delta = outs.pop("delta")
                if fig == "fig12":
                    outs = dict(p_gate=outs["p_gate"])
                recs.append(SweepRecord(fig, dict(alpha=a, eta=e, delta=delta), outs))
            vis.append(dict(alpha=a, eta=e, visibility=visibility(p.p_plus for p in pts)))
        run.extra["visibility"] = vis
        run.flags["readout_failure"] = [
            dict(
                alpha=a,
                simulated=math.exp(-2 * a * a),
                printed=math.exp(-a * a),
                note="vacuum overlap of |sqrt(2) alpha> gives exp(-2 alpha^2)",
            )
            for a in cfg.alpha
        ]
        run.plots[fig] = [("plot", "3:4", "P_plus" if fig == "fig11" else "P_gate")]

    run.records[fig] = recs


def _custom(run: _Run) -> None:
    cfg = run.cfg
    exp = cfg.experiment
    kind = cfg.kind
    recs = []
    thetas = cfg.theta if cfg.theta is not None else [0.0]
    phis = cfg.phi if cfg.phi is not None else [0.0]

    if exp == "cat_fidelity":
        for a in cfg.alpha:
            row = _fig1_task(a)
            recs.append(SweepRecord(exp, {"alpha": row.pop("alpha")}, row))
        run.plots[exp] = [("plot", "1:3", "F numeric")]

    elif exp == "teleport":
        for a, e, t, p in itertools.product(cfg.alpha, cfg.eta, thetas, phis):
            dim = cfg.dim or teleport_cutoff(a, kind)
            run.cutoffs[f"alpha={a}"] = dim
            rep = teleport(QubitSpec(a, t, p), kind, DetectorModel(e), dim)
            for pat in PATTERNS:
                o = rep.outcomes[pat]
                recs.append(
                    SweepRecord(
                        exp,
                        dict(alpha=a, eta=e, theta=t, phi=p),
                        dict(
                            outcome=f"{pat[0].value}/{pat[1].value}",
                            correction=o.correction.value,
                            probability=o.probability,
                            fidelity=o.fidelity,
                        ),
                        dim,
                    )
                )
        run.plots[exp] = [("plot", "3:7", "probability")]

    elif exp == "hadamard":
        for a, e in itertools.product(cfg.alpha, cfg.eta):
            hg = HadamardGrid(a, kind, detector=DetectorModel(e), dim=cfg.dim)
            run.cutoffs[f"alpha={a}"] = hg.dim
            prob, fid = hg.probability("gate", thetas, phis), hg.fidelity(thetas, phis)
            for (i, t), (j, p) in itertools.product(enumerate(thetas), enumerate(phis)):
                recs.append(
                    SweepRecord(
                        exp,
                        dict(alpha=a, eta=e, theta=t, phi=p),
                        dict(
                            probability=float(prob[i, j]),
                            fidelity=float(fid[i, j]),
                            p11_closed=count_prob_closed(QubitSpec(a, t, p), 1, 1),
                        ),
                        hg.dim,
                    )
                )
        run.plots[exp] = [("plot", "3:6", "fidelity")]

    elif exp == "fringe":
        vis = []
        for a, e in itertools.product(cfg.alpha, cfg.eta):
            deltas = cfg.delta if cfg.delta is not None else np.linspace(-2 / a, 2 / a, 81)
            pts = fringe_sweep(a, kind, deltas, DetectorModel(e))
            for pt in pts:
                outs = dataclasses.asdict(pt)
                recs.append(SweepRecord(exp, dict(alpha=a, eta=e, delta=outs.pop("delta")), outs))
            vis.append(dict(alpha=a, eta=e, visibility=visibility(p.p_plus for p in pts)))
        run.extra["visibility"] = vis
        run.plots[exp] = [("plot", "3:4", "P_plus")]

    run.records[exp] = recs


def _plot_script(name: str, specs) -> str:
    lines = [
        f"# {name}: reads {name}.csv (first row is a header)",
        'set datafile separator ","',
        "set key autotitle columnhead",
    ]
    for i, (cmd, cols, title) in enumerate(specs):
        if cmd == "splot":
            if i:
                lines.append("pause -1")
            lines.append(f'splot "{name}.csv" every ::1 using {cols} with points title "{title}"')
        elif cmd == "replot":
            lines.append(f'replot "{name}.csv" every ::1 using {cols} with lines title "{title}"')
        else:
            lines.append(f'plot "{name}.csv" every ::1 using {cols} with lines title "{title}"')
    lines.append("pause -1")
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> dict:
    """Execute a figure or custom experiment and write its files.

    Returns the manifest (also written to ``manifest.json``).
    """
    cfg.validate()
    cfg = cfg.resolved()
    start = time.perf_counter()
    state = _Run(cfg)
    if cfg.experiment in FIGURES:
        _figure(state)
    else:
        _custom(state)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for name, recs in state.records.items():
        write_csv(out / f"{name}.csv", recs)
        (out / f"{name}.plot").write_text(_plot_script(name, state.plots.get(name, [])))
        files += [f"{name}.csv", f"{name}.plot"]
    if not state.cutoffs:
        state.cutoffs = {
            f"alpha={a}": teleport_cutoff(a, cfg.kind) if a > 0 else cutoff_for(0) for a in cfg.alpha
        }
    flags = {"squeezing_discrepancy": squeezing_report(), **state.flags}
    manifest = dict(
        experiment=cfg.experiment,
        config=dataclasses.asdict(cfg),
        version=__version__,
        numpy=np.__version__,
        cutoffs=state.cutoffs,
        wall_time_s=time.perf_counter() - start,
        files=files + ["manifest.json"],
        discrepancy_flags=flags,
        **state.extra,
    )
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=float) + "\n")
    return manifest


def run_figure(fig: str, cfg: RunConfig | None = None) -> dict:
    if fig not in FIGURES:
        raise ConfigError(f"unknown figure {fig!r}; choose from {', '.join(FIGURES)}")
    cfg = cfg or RunConfig(fig)
    return run(dataclasses.replace(cfg, experiment=fig))


def run_custom(cfg: RunConfig) -> dict:
    if cfg.experiment not in CUSTOM:
        raise ConfigError(f"custom experiment must be one of {', '.join(CUSTOM)}")
    return run(cfg)
