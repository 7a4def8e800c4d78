"""``migrasim`` command line.

Every failure prints one line ``migrasim: error: <CODE>: <message>`` on stderr
and exits nonzero (2 for usage errors, 1 otherwise).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import io as rio
from .config import (
    ConfigParseError,
    expand_sweep,
    load_config,
    to_dict,
    with_overrides,
)
from .dynamics import predict_consensus
from .engine import ConfigError, run
from .graph import EigenSolverError, dumps_edge_list, laplacian, loads_edge_list, random_graph, spectrum

LOGGER = logging.getLogger("migrasim")

E_USAGE = "E_USAGE"
E_CONFIG_PARSE = "E_CONFIG_PARSE"
E_CONFIG_INVALID = "E_CONFIG_INVALID"
E_IO = "E_IO"
E_NUMERIC = "E_NUMERIC"
E_SWEEP_PARTIAL = "E_SWEEP_PARTIAL"
E_INTERNAL = "E_INTERNAL"


class CliError(Exception):
    def __init__(self, code, message, status=1):
        super().__init__(message)
        self.code = code
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(E_USAGE, message, status=2)


def _u64(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="migrasim", description="Rural-urban migration multi-agent simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run one scenario and write its result files")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=_u64)
    p.add_argument("--format", choices=("csv", "json", "both"), default="both")

    p = sub.add_parser("sweep", help="run every cell of the config's sweep grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=_u64, help="override the base seed")
    p.add_argument("--format", choices=("csv", "json", "both"), default="both")

    p = sub.add_parser("analyze-graph", help="print the Laplacian spectrum and consensus verdict")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=_u64)
    p.add_argument("--graph", help="edge-list file to analyze instead of generating one")
    p.add_argument("--export", help="write the analyzed graph as an edge list")
    p.add_argument("--json", action="store_true", help="print a JSON object instead of text")

    p = sub.add_parser("validate-config", help="check a config file and exit")
    p.add_argument("--config", required=True)
    return parser


def _load(path, seed=None):
    try:
        cfg = load_config(path)
    except FileNotFoundError:
        raise CliError(E_IO, f"config file not found: {path}") from None
    except OSError as exc:
        raise CliError(E_IO, f"cannot read {path}: {exc.strerror}") from None
    except ConfigParseError as exc:
        raise CliError(E_CONFIG_PARSE, f"{path}: {exc}") from None
    except ConfigError as exc:
        raise CliError(E_CONFIG_INVALID, f"{path}: {exc}") from None
    if seed is not None:
        cfg = with_overrides(cfg, {"seed": seed})
    return cfg


def cmd_validate(args):
    _load(args.config)
    print(f"ok: {args.config}")
    return 0


def cmd_run(args):
    cfg = _load(args.config, args.seed)
    if cfg.sweep:
        LOGGER.info("ignoring sweep section; use 'migrasim sweep' to expand it")
    result = run(cfg)
    try:
        paths = rio.write_result(result, args.out, args.format)
    except OSError as exc:
        raise CliError(E_IO, f"cannot write results to {args.out}: {exc.strerror}") from None
    for path in paths:
        print(path)
    LOGGER.info("status=%s months=%d", result.status, len(result.series) - 1)
    return 0


def _run_cell(job):
    index, overrides, cfg, out_dir, fmt = job
    cell_dir = os.path.join(out_dir, f"cell_{index:04d}")
    try:
        result = run(cfg)
        rio.write_result(result, cell_dir, fmt)
        return {
            "index": index,
            "seed": cfg.seed,
            "overrides": overrides,
            "status": "ok",
            "sim_status": result.status,
            "dir": os.path.basename(cell_dir),
        }
    except Exception as exc:  # a failed cell must not sink the sweep
        return {
            "index": index,
            "seed": cfg.seed,
            "overrides": overrides,
            "status": "failed",
            "error": f"{type(exc).__name__}: {exc}",
            "dir": os.path.basename(cell_dir),
        }


def sweep_threads() -> int:
    raw = os.environ.get("MIGRASIM_THREADS")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise CliError(E_USAGE, f"MIGRASIM_THREADS must be a positive integer, got {raw!r}", 2)
        if value < 1:
            raise CliError(E_USAGE, f"MIGRASIM_THREADS must be a positive integer, got {raw!r}", 2)
        return value
    return os.cpu_count() or 1


def cmd_sweep(args):
    cfg = _load(args.config, args.seed)
    n_threads = sweep_threads()
    try:
        cells = expand_sweep(cfg)
    except ConfigError as exc:
        raise CliError(E_CONFIG_INVALID, f"{args.config}: {exc}") from None
    try:
        os.makedirs(args.out, exist_ok=True)
    except OSError as exc:
        raise CliError(E_IO, f"cannot create {args.out}: {exc.strerror}") from None

    jobs = [(i, ov, c, args.out, args.format) for i, (ov, c) in enumerate(cells)]
    threads = min(n_threads, len(jobs))
    LOGGER.info("sweep: %d cells on %d workers", len(jobs), threads)
    if threads <= 1:
        entries = [_run_cell(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            entries = list(pool.map(_run_cell, jobs))

    manifest = {
        "schema_version": 1,
        "base_config": to_dict(cfg),
        "cells": sorted(entries, key=lambda e: e["index"]),
    }
    path = os.path.join(args.out, "manifest.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(manifest, indent=2) + "\n")
    print(path)
    failed = [e["index"] for e in entries if e["status"] != "ok"]
    if failed:
        raise CliError(E_SWEEP_PARTIAL, f"{len(failed)} of {len(entries)} cells failed: {failed}")
    return 0


def cmd_analyze(args):
    cfg = _load(args.config, args.seed)
    if args.graph:
        try:
            with open(args.graph, encoding="utf-8") as fh:
                g = loads_edge_list(fh.read())
        except OSError as exc:
            raise CliError(E_IO, f"cannot read {args.graph}: {exc.strerror}") from None
        except ValueError as exc:
            raise CliError(E_CONFIG_PARSE, f"{args.graph}: {exc}") from None
    else:
        g = random_graph(cfg.n_workers, cfg.weight_upper, cfg.sparse_factor, seed=cfg.seed)

    try:
        spec = spectrum(laplacian(g), cfg.zero_tol)
        verdict = predict_consensus(g, cfg.dynamics, cfg.zero_tol)
    except EigenSolverError as exc:
        raise CliError(E_NUMERIC, str(exc)) from None

    if args.export:
        try:
            with open(args.export, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(dumps_edge_list(g))
        except OSError as exc:
            raise CliError(E_IO, f"cannot write {args.export}: {exc.strerror}") from None

    dyn = cfg.dynamics
    report = {
        "n": g.n,
        "arcs": g.arc_count(),
        "has_spanning_tree": verdict.has_spanning_tree,
        "zero_count": spec.zero_count,
        "lambda2_re": spec.lambda2_re,
        "a": dyn.a,
        "f": dyn.f,
        "f_times_lambda2_re": None if spec.lambda2_re is None else dyn.f * spec.lambda2_re,
        "consensus_predicted": verdict.consensus_predicted,
        "eigenvalues": sorted([float(z.real), float(z.imag)] for z in spec.eigenvalues),
    }
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        for key, value in report.items():
            if key == "eigenvalues":
                continue
            if isinstance(value, bool):
                value = str(value).lower()
            print(f"{key}: {value}")
        print("eigenvalues:")
        for re_, im in report["eigenvalues"]:
            print(f"  {re_!r} {im:+}j")
    return 0


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "analyze-graph": cmd_analyze,
    "validate-config": cmd_validate,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(name)s: %(message)s",
        )
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"migrasim: error: {exc.code}: {exc}", file=sys.stderr)
        return exc.status
    except Exception as exc:
        LOGGER.debug("unhandled error", exc_info=True)
        msg = " ".join(str(exc).split())
        print(f"migrasim: error: {E_INTERNAL}: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
