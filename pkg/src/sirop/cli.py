"""Command-line front end: ``sirop run`` and ``sirop validate``."""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, config
from .integrator import IntegrationError, integrate
from .spectral import SpectralConvergenceError, growth_spectrum

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_INTEGRATION = 4
EXIT_ANALYSIS = 5

EMIT_FILES = {
    "trajectory_csv": "trajectory.csv",
    "derived_csv": "derived.csv",
    "peaks_json": "peaks.json",
    "equilibrium_json": "equilibrium.json",
    "classification_json": "classification.json",
}
SIG_DIGITS = 12


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    document: config.ConfigDocument
    outputs: Path
    emit: frozenset
    overrides: config.Overrides = config.Overrides()

    def __post_init__(self):
        if not self.emit:
            raise CliError(EXIT_PARSE, "emit set is empty")
        unknown = set(self.emit) - set(EMIT_FILES)
        if unknown:
            raise CliError(EXIT_PARSE, f"unknown emit targets {sorted(unknown)}; choose from {sorted(EMIT_FILES)}")


def fmt(v) -> str:
    """Decimal, 12 significant digits, no exponent."""
    v = float(v)
    if not np.isfinite(v):
        return repr(v)
    if v == 0.0:
        return "0"
    return np.format_float_positional(v, precision=SIG_DIGITS, unique=False, fractional=False, trim="-")


def _jsonable(v):
    if isinstance(v, (np.ndarray, list, tuple)):
        return [_jsonable(e) for e in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        # placeholder string, unquoted into a decimal literal by _dump
        return _NUM + fmt(v) if np.isfinite(v) else None
    if hasattr(v, "value") and isinstance(v.value, str):
        return v.value
    if v is None or isinstance(v, str):
        return v
    if hasattr(v, "__dataclass_fields__"):
        return {k: _jsonable(getattr(v, k)) for k in v.__dataclass_fields__}
    raise TypeError(f"cannot serialize {type(v).__name__}")


_NUM = "\x00num:"
_NUM_RE = re.compile(r'"\\u0000num:([^"]*)"')


def _dump(obj) -> str:
    """JSON with numbers in the same decimal format as the CSV files."""
    return _NUM_RE.sub(r"\1", json.dumps(_jsonable(obj), indent=2)) + "\n"


def _csv(header, columns) -> str:
    lines = [",".join(header)]
    for row in np.column_stack(columns):
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def trajectory_csv(traj) -> str:
    n = traj.n
    header = ["t"] + [f"{c}_{i}" for c in "sxro" for i in range(1, n + 1)]
    return _csv(header, [traj.times, traj.s, traj.x, traj.r, traj.o])


def derived_csv(traj, derived, p_ref) -> str:
    header = ["t", "R_o", "R_min", "R_max", "sigma", "w_avg"]
    cols = [traj.times, derived.r_o, derived.r_min, derived.r_max, derived.sigma, traj.x @ p_ref]
    return _csv(header, cols)


def _build(cfg: RunConfig):
    try:
        return config.build_scenario(cfg.document, cfg.overrides)
    except config.ValidationError as e:
        raise CliError(EXIT_VALIDATION, f"validation failed: {e}") from None


def produce(cfg: RunConfig) -> dict:
    """Compute every requested artifact in memory; ``{filename: text}``."""
    sc = _build(cfg)
    emit = cfg.emit
    out = {}
    try:
        cls = analysis.classify_outbreak(sc)
    except SpectralConvergenceError as e:
        raise CliError(EXIT_ANALYSIS, f"analysis failed: {e}") from None
    try:
        traj = integrate(sc)
    except IntegrationError as e:
        raise CliError(EXIT_INTEGRATION, f"integration failed: {e}") from None
    window = cfg.document.analysis.peak_window
    try:
        if emit & {"derived_csv", "peaks_json"}:
            derived = analysis.derive(traj, sc)
            peaks = analysis.detect_peaks(traj, sc, window)
            if "peaks_json" in emit:
                out[EMIT_FILES["peaks_json"]] = _dump(peaks)
            if "derived_csv" in emit:
                p_ref = peaks.peaks[0].p_vector if peaks.peaks else growth_spectrum(traj.state(0), sc).left_vector
                out[EMIT_FILES["derived_csv"]] = derived_csv(traj, derived, p_ref)
        if "equilibrium_json" in emit:
            rep = analysis.equilibrium_report(traj, sc, cfg.document.analysis.consensus_tol)
            out[EMIT_FILES["equilibrium_json"]] = _dump(rep)
    except (analysis.AnalysisError, SpectralConvergenceError) as e:
        raise CliError(EXIT_ANALYSIS, f"analysis failed: {e}") from None
    if "classification_json" in emit:
        out[EMIT_FILES["classification_json"]] = _dump(cls)
    if "trajectory_csv" in emit:
        out[EMIT_FILES["trajectory_csv"]] = trajectory_csv(traj)
    return out


def run(cfg: RunConfig) -> int:
    files = produce(cfg)
    try:
        cfg.outputs.mkdir(parents=True, exist_ok=True)
        for name in sorted(files):
            (cfg.outputs / name).write_text(files[name])
    except OSError as e:
        raise CliError(EXIT_VALIDATION, f"cannot write outputs to {cfg.outputs}: {e}") from None
    return EXIT_OK


def validate(cfg: RunConfig, stream=None) -> int:
    """Report structural checks, the initial reproduction bounds and the classification."""
    stream = sys.stdout if stream is None else stream
    doc = cfg.document
    if doc.explicit is not None:
        checks = config.explicit_checks(doc.explicit)
        for name, err in checks:
            print(f"{name}: {'ok' if err is None else 'FAIL: ' + err}", file=stream)
        if any(err for _, err in checks):
            raise CliError(EXIT_VALIDATION, "validation failed")
    sc = _build(cfg)
    if doc.recipe is not None:
        for name in ("transmission network", "recovery rates", "opinion network", "initial state"):
            print(f"{name}: ok", file=stream)
    try:
        cls = analysis.classify_outbreak(sc)
    except SpectralConvergenceError as e:
        raise CliError(EXIT_ANALYSIS, f"analysis failed: {e}") from None
    print(f"n: {sc.n}", file=stream)
    print(f"R_min(0): {fmt(cls.r_min_0)}", file=stream)
    print(f"R_max(0): {fmt(cls.r_max_0)}", file=stream)
    print(f"classification: {cls.classification.value}", file=stream)
    return EXIT_OK


def _parser():
    p = argparse.ArgumentParser(prog="sirop", description="Networked SIR epidemics with opinion feedback.")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--preset", help="built-in scenario name")
    src.add_argument("--config", type=Path, help="YAML scenario document")
    src.add_argument("--batch", type=Path, help="run only: directory of YAML documents, one output subdirectory each")
    common.add_argument("--seed", type=int, help="override the recipe seed (unsigned 64-bit)")
    common.add_argument("--dt", type=float, help="override the step size")
    common.add_argument("--t-end", type=float, dest="t_end", help="override the horizon")

    r = sub.add_parser("run", parents=[common], help="simulate, analyse and write outputs")
    r.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")
    r.add_argument(
        "--emit",
        default=",".join(EMIT_FILES),
        help="comma-separated subset of " + ",".join(EMIT_FILES) + " (default: all)",
    )
    r.add_argument("--jobs", type=int, default=None, help="worker processes for --batch")

    sub.add_parser("validate", parents=[common], help="check a scenario without simulating")
    return p


def _document(args) -> config.ConfigDocument:
    try:
        if args.preset is not None:
            return config.preset_document(args.preset)
        if args.config is not None:
            return config.load_document(args.config)
    except config.ConfigError as e:
        raise CliError(EXIT_PARSE, f"config error: {e}") from None
    except config.ValidationError as e:
        raise CliError(EXIT_VALIDATION, f"validation failed: {e}") from None
    raise CliError(EXIT_PARSE, "one of --preset, --config or --batch is required")


def _overrides(args):
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise CliError(EXIT_VALIDATION, "--seed must be an unsigned 64-bit integer")
    return config.Overrides(dt=args.dt, t_end=args.t_end, seed=args.seed)


def _emit(text):
    return frozenset(e.strip() for e in text.split(",") if e.strip())


def _batch_one(job):
    path, out, emit, overrides = job
    try:
        doc = config.load_document(path)
        return path.name, run(RunConfig(doc, out, emit, overrides)), None
    except config.ConfigError as e:
        return path.name, EXIT_PARSE, f"config error: {e}"
    except config.ValidationError as e:
        return path.name, EXIT_VALIDATION, f"validation failed: {e}"
    except CliError as e:
        return path.name, e.code, str(e)


def _run_batch(args) -> int:
    if not args.batch.is_dir():
        raise CliError(EXIT_PARSE, f"--batch {args.batch} is not a directory")
    paths = sorted(p for p in args.batch.iterdir() if p.suffix in (".yaml", ".yml"))
    if not paths:
        raise CliError(EXIT_PARSE, f"no .yaml documents in {args.batch}")
    emit, overrides = _emit(args.emit), _overrides(args)
    RunConfig(config.ConfigDocument(), args.out, emit)  # checks the emit set once
    jobs = [(p, args.out / p.stem, emit, overrides) for p in paths]
    workers = args.jobs or min(len(jobs), os.cpu_count() or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_batch_one, jobs))
    else:
        results = [_batch_one(j) for j in jobs]
    worst = EXIT_OK
    for name, code, msg in results:
        if code != EXIT_OK:
            print(f"{name}: {msg}", file=sys.stderr)
        worst = max(worst, code)
    return worst


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_PARSE
    try:
        if args.command == "run" and args.batch is not None:
            return _run_batch(args)
        if args.command == "validate" and args.batch is not None:
            raise CliError(EXIT_PARSE, "--batch applies to run only")
        doc = _document(args)
        if args.command == "run":
            return run(RunConfig(doc, args.out, _emit(args.emit), _overrides(args)))
        return validate(RunConfig(doc, Path("."), frozenset(EMIT_FILES), _overrides(args)))
    except CliError as e:
        sys.stdout.flush()
        print(f"sirop: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
