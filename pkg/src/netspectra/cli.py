"""Command-line interface: ``netspectra <subcommand> [flags]``.

Exit codes: 0 success, 1 configuration error, 2 numeric or generation failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys

from . import __version__
from .errors import ConfigError, GenerationError, GraphError, NetSpectraError, NumericError
from .figures import FIGURE_COLUMNS, compute_figure, default_k_values, emit_figure_data
from .generators import generate_connected, make_rng
from .graph import read_edge_list, write_edge_list
from .harness import (
    DEFAULT_K_GRID, ExperimentConfig, format_value, parse_kv_text, run_sweep, sweep_to_json, write_meta, write_sweep_csv,
    write_trials_csv,
)
from .spectral import (
    bin_probabilities, eigenvalue_histogram, fit_semicircle, semicircle_relative_error, spectrum, write_histogram_csv,
)
from .walk import arrival_report, write_arrival_csv, write_summary_json

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

# flag dest -> config key
_FLAG_KEYS = {
    "model": "model", "n": "n", "k_ave": "k-ave", "q": "q", "weights": "weights", "w_mean": "w-mean",
    "n_h": "n-h", "trials": "trials", "seed": "seed", "r_mode": "r-mode", "max_attempts": "max-attempts",
    "out": "out", "format": "format",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _number(text):
    x = float(text)
    return int(x) if x.is_integer() else x


def _common(p):
    p.add_argument("--config", help="flat key = value file mirroring the flags")
    p.add_argument("--model", choices=["er", "ba"])
    p.add_argument("--n", type=int)
    p.add_argument("--k-ave", dest="k_ave", type=_number, action="append",
                   help="expected mean link count (repeatable)")
    p.add_argument("--q", type=float, help="link cut probability for BA")
    p.add_argument("--weights", choices=["constant", "uniform", "exponential"])
    p.add_argument("--w-mean", dest="w_mean", type=float)
    p.add_argument("--n-h", dest="n_h", type=int, help="histogram bins")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--r-mode", dest="r_mode", choices=["low", "high", "mean", "max"])
    p.add_argument("--max-attempts", dest="max_attempts", type=int)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--jobs", type=int, default=1, help="worker processes for trials")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netspectra", description="Normalized Laplacian spectra and random-walk hitting times.")
    parser.add_argument("--version", action="version", version=f"netspectra {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write one weighted network as an edge list")
    _common(p)

    for name, text in (("spectrum", "eigenvalues of the normalized Laplacian"),
                       ("hist", "eigenvalue histogram against the semicircle")):
        p = sub.add_parser(name, help=text)
        _common(p)
        p.add_argument("--graph", help="edge-list file (default: generate from flags)")

    p = sub.add_parser("walk", help="first-arrival times from one source node")
    _common(p)
    p.add_argument("--graph", help="edge-list file (default: generate from flags)")
    p.add_argument("--source", type=int, default=0)
    p.add_argument("--mc-runs", dest="mc_runs", type=int, default=0, help="Monte Carlo walks to attach")

    p = sub.add_parser("sweep", help="repeat trials over a k_ave grid")
    _common(p)
    p.add_argument("--per-trial", dest="per_trial", help="also write per-trial rows to this CSV")

    p = sub.add_parser("figure", help="plot-ready data for one figure")
    p.add_argument("figure", choices=sorted(FIGURE_COLUMNS))
    _common(p)
    return parser


def config_from_args(args, default_k=None) -> ExperimentConfig:
    mapping = {}
    if args.config:
        try:
            with open(args.config) as fh:
                mapping.update(parse_kv_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
    for dest, key in _FLAG_KEYS.items():
        val = getattr(args, dest, None)
        if val is not None:
            mapping[key] = val
    if "k-ave" not in mapping and default_k is not None:
        mapping["k-ave"] = default_k
    return ExperimentConfig.from_mapping(mapping)


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _graph(args, config):
    if getattr(args, "graph", None):
        try:
            return read_edge_list(args.graph), {"graph": args.graph}
        except OSError as exc:
            raise ConfigError(f"cannot read graph: {exc}") from exc
    gen = config.gen_config(config.k_ave[0], 0)
    g, rej = generate_connected(gen, config.distribution, make_rng(gen.seed), config.max_attempts)
    return g, {**config.header_meta(), "k-ave": format_value(config.k_ave[0]), "rejections": rej}


def _cmd_generate(args, config):
    g, meta = _graph(args, config)
    with _output(config.out) as fh:
        meta = {"tool": "netspectra", "version": __version__, **meta}
        write_edge_list(g, fh, meta={k: format_value(v) for k, v in meta.items()})


def _cmd_spectrum(args, config):
    g, meta = _graph(args, config)
    dec = spectrum(g)
    with _output(config.out) as fh:
        if config.format == "json":
            doc = {"meta": meta, "n": g.n, "lambdas": dec.lambdas.tolist(), "lambda2": dec.lambda2,
                   "lambdan": dec.lambdan, "trace": float(dec.lambdas.sum())}
            fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        else:
            write_meta(fh, meta)
            fh.write("index,lambda\n")
            for i, lam in enumerate(dec.lambdas):
                fh.write(f"{i + 1},{format_value(lam)}\n")


def _cmd_hist(args, config):
    g, meta = _graph(args, config)
    dec = spectrum(g)
    hist = eigenvalue_histogram(dec, config.n_h)
    fit = fit_semicircle(dec, config.r_mode)
    meta = {**meta, "seed": config.seed}
    with _output(config.out) as fh:
        if config.format == "json":
            doc = {"meta": meta, "n": g.n, "n_h": hist.n_h, "r": fit.r, "mode": fit.mode,
                   "theta": hist.theta.tolist(), "f_N": hist.f.tolist(),
                   "P": bin_probabilities(hist, fit).tolist(), "eps": semicircle_relative_error(hist, fit)}
            fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        else:
            write_histogram_csv(hist, fit, fh, meta)


def _cmd_walk(args, config):
    g, meta = _graph(args, config)
    rng = make_rng(config.seed) if args.mc_runs else None
    report = arrival_report(g, args.source, config.r_mode, mc_runs=args.mc_runs, rng=rng)
    meta = {**meta, "mc-runs": args.mc_runs}
    with _output(config.out) as fh:
        if config.format == "json":
            write_summary_json(report, fh, meta)
        else:
            write_arrival_csv(report, fh, meta)


def _cmd_sweep(args, config):
    rows = run_sweep(config, jobs=args.jobs)
    with _output(config.out) as fh:
        if config.format == "json":
            fh.write(sweep_to_json(rows, config))
        else:
            write_sweep_csv(rows, fh, config)
    if args.per_trial:
        with open(args.per_trial, "w", newline="") as fh:
            write_trials_csv(rows, fh, config)


def _cmd_figure(args, config):
    data = compute_figure(args.figure, config, jobs=args.jobs)
    with _output(config.out) as fh:
        emit_figure_data(args.figure, data, fh, config)


_COMMANDS = {
    "generate": _cmd_generate, "spectrum": _cmd_spectrum, "hist": _cmd_hist, "walk": _cmd_walk,
    "sweep": _cmd_sweep, "figure": _cmd_figure,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        default_k = default_k_values(args.figure) if args.command == "figure" else None
        if args.command == "sweep":
            default_k = DEFAULT_K_GRID
        config = config_from_args(args, default_k)
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        _COMMANDS[args.command](args, config)
    except (ConfigError, GraphError) as exc:
        print(f"netspectra: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, GenerationError, NetSpectraError) as exc:
        print(f"netspectra: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
