"""Command-line entry point: ``witfam simulate | detect | tomography | waveplates``.

Exit codes: 0 success, 2 configuration error, 3 I/O error (unreadable,
unwritable or malformed input/output files).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .exceptions import ConfigError, WitfamError
from .harness import ExperimentConfig, load_config, run_experiment, write_report
from .measurement import read_dataset
from .qcore import as_density_matrix, concurrence, min_pt_eigenvalue, quantum_fidelity
from .schemes import analyze_dataset, tomography_fallback
from .waveplates import format_table

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _build_parser():
    p = _Parser(prog="witfam", description="Adaptive entanglement detection with witness families.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="Monte Carlo sweep over true states")
    sim.add_argument("--config", help="flat 'key = value' file; flags override it")
    sim.add_argument("--scheme", help="A, B, C, Bp or Cp")
    sim.add_argument("--class", dest="state_class", help="rank1, rank2, werner, ginibre-pure, ginibre-full")
    sim.add_argument("--param", help="theta, mu or lambda of the state class")
    sim.add_argument("--num-states", dest="num_states")
    sim.add_argument("--pairs", dest="pairs_per_family", help="pairs per family")
    sim.add_argument("--seed")
    sim.add_argument("--noise", help="weight kept by the ideal state under white noise")
    sim.add_argument("--delta", dest="delta_margin", help="log-likelihood margin of the ML-set check")
    sim.add_argument("--workers", help="worker processes")
    sim.add_argument("--out", dest="output", help="output file (default: stdout)")
    sim.add_argument("--format", choices=("csv", "json"))

    det = sub.add_parser("detect", help="run a dataset file through a scheme's tests")
    det.add_argument("dataset")
    det.add_argument("--scheme", default="C")
    det.add_argument("--delta", type=float, default=1.0)

    tomo = sub.add_parser("tomography", help="ML estimate and PPT verdict from IC data")
    tomo.add_argument("dataset")
    tomo.add_argument("--reference", help="4x4 complex matrix file of the true state")

    sub.add_parser("waveplates", help="print the wave-plate settings of the six families")
    return p


def _simulate(args):
    keys = (
        "scheme", "state_class", "param", "num_states", "pairs_per_family",
        "seed", "noise", "delta_margin", "workers", "output", "format",
    )
    flags = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
    cfg = load_config(args.config, flags) if args.config else ExperimentConfig.from_mapping(flags)
    report = run_experiment(cfg)
    text = write_report(report, cfg.format, cfg.output)
    if cfg.output is None:
        sys.stdout.write(text)


def _detect(args):
    d = read_dataset(args.dataset)
    try:
        rec = analyze_dataset(args.scheme, d, delta=args.delta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = rec.to_dict()
    out.pop("dataset")
    print(json.dumps(out, indent=2))


def _read_state(path):
    rho = np.loadtxt(path, dtype=complex, ndmin=2)
    return as_density_matrix(rho)


def _tomography(args):
    d = read_dataset(args.dataset)
    ref = _read_state(args.reference) if args.reference else None
    verdict, res = tomography_fallback(d)
    rho = res.estimate
    lines = [
        f"verdict={verdict.value}",
        res.diagnostics().rstrip("\n"),
        f"min_pt_eigenvalue={min_pt_eigenvalue(rho)!r}",
        f"concurrence={concurrence(rho)!r}",
    ]
    if ref is not None:
        lines.append(f"fidelity={quantum_fidelity(rho, ref)!r}")
    for i, row in enumerate(rho):
        lines.append(f"estimate_row{i}=" + " ".join(f"{z.real:.10f}{z.imag:+.10f}j" for z in row))
    print("\n".join(lines))


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        if args.command == "simulate":
            _simulate(args)
        elif args.command == "detect":
            _detect(args)
        elif args.command == "tomography":
            _tomography(args)
        else:
            sys.stdout.write(format_table())
    except ConfigError as exc:
        print(f"witfam: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, WitfamError) as exc:
        # unreadable or malformed files land here
        print(f"witfam: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
