"""``catsim`` command line: figure reproduction, custom sweeps, acceptance checks.

Exit status: 0 success, 1 failed acceptance criteria, 2 configuration
error, 3 numerical precondition failure (cutoff too small and the like).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .fock import CutoffError
from .states import DegenerateStateError
from .sweep import CUSTOM, FIGURES, ConfigError, RunConfig, run_custom, run_figure

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=_floats, help="comma-separated qubit amplitudes")
    p.add_argument("--eta", type=_floats, help="comma-separated detector efficiencies")
    p.add_argument("--grid", type=int, help="points per input angle")
    p.add_argument("--resource", choices=("cat", "sqphoton"))
    p.add_argument("--r-policy", dest="r_policy", choices=("numeric", "closed_form"))
    p.add_argument("--dim", type=int, help="force this Fock cutoff")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int, help="worker processes (default: all cores)")
    p.add_argument("--config", type=Path, help="JSON file mirroring the run config")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catsim", description="Coherent-state qubit gates with squeezed-photon resources."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure", help="reproduce one figure's data")
    fig.add_argument("figure", choices=FIGURES)
    _common(fig)

    custom = sub.add_parser("custom", help="sweep the cross product of the given parameters")
    custom.add_argument("--experiment", choices=CUSTOM)
    custom.add_argument("--theta", type=_floats)
    custom.add_argument("--phi", type=_floats)
    custom.add_argument("--delta", type=_floats)
    _common(custom)

    ver = sub.add_parser("verify", help="run the acceptance criteria")
    ver.add_argument("--only", type=lambda s: [int(x) for x in s.split(",")],
                     help="comma-separated criterion numbers")
    ver.add_argument("--dim", type=int, help="force this Fock cutoff everywhere")
    ver.add_argument("--out", help="write verify_report.json here")
    return parser


def _load_config(args, experiment: str | None) -> RunConfig:
    data = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    if experiment is not None:
        data["experiment"] = experiment
    overrides = {
        k: getattr(args, k, None)
        for k in ("alpha", "eta", "grid", "resource", "r_policy", "dim", "out", "workers",
                  "theta", "phi", "delta")
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_dict(data)


def _verify(args) -> int:
    from .acceptance import verify

    report = verify(dim=args.dim, only=args.only, progress=lambda r: print(r.line(), flush=True))
    n = sum(r.passed for r in report.results)
    print(f"{n}/{len(report.results)} criteria passed")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "verify_report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    return EXIT_OK if report.passed else EXIT_VERIFY


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            if args.dim is not None and args.dim < 1:
                raise ConfigError("dim must be a positive integer")
            return _verify(args)
        if args.command == "figure":
            cfg = _load_config(args, args.figure)
            manifest = run_figure(args.figure, cfg)
        else:
            cfg = _load_config(args, args.experiment)
            manifest = run_custom(cfg)
    except ConfigError as exc:
        print(f"catsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CutoffError, DegenerateStateError) as exc:
        print(f"catsim: numerical precondition failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"wrote {', '.join(manifest['files'])} to {manifest['config']['out']}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
