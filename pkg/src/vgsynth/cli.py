"""Command-line entry point.

Subcommands: ``generate`` (build graphs and write synthetic sequences),
``evaluate`` (classification experiment, embedding export, report),
``selftest`` (embedded oracle suites), ``report`` (pretty-print a finished
run). Exit codes: 0 success, 1 failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .embedding import write_embedding_csv
from .evaluate import EvalReport, auc_bruteforce, roc_auc
from .generate import dtw_bruteforce, dtw_distance
from .graphs import build_hvg, build_nvg, hvg_bruteforce, nvg_bruteforce
from .ingest import Window, minmax_scale
from .pipeline import (ConfigError, RunConfig, embedding_path, read_sequences,
                       run_evaluation, run_generation, sequences_path,
                       write_config_snapshot, write_sequences)
from .runtime import read_runtime_log, summary_table, write_runtime_log


def _load_config(args) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {}
    if getattr(args, "input", None):
        overrides["input"] = args.input
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.window is not None:
        overrides["window_length"] = args.window
    if args.methods is not None:
        overrides["methods"] = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    if args.out is not None:
        overrides["out_dir"] = args.out
    for key, value in overrides.items():
        setattr(config, key, value)
    config.validate()
    if not config.input:
        raise ConfigError("no input file configured (use --input or the config file)")
    return config


def cmd_generate(args) -> int:
    config = _load_config(args)
    if not Path(config.input).exists():
        print(f"error: input file not found: {config.input}", file=sys.stderr)
        return 1
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    by_method, records = run_generation(config)
    for method, sequences in by_method.items():
        path = sequences_path(out_dir, method)
        write_sequences(sequences, path)
        print(f"{method}: wrote {len(sequences)} sequences to {path}")
    write_runtime_log(records, out_dir / "runtime.jsonl")
    write_config_snapshot(config, out_dir / "config_snapshot.json")
    print(summary_table(records))
    return 0


def cmd_evaluate(args) -> int:
    config = _load_config(args)
    out_dir = Path(config.out_dir)
    missing = [str(sequences_path(out_dir, m)) for m in config.methods
               if not sequences_path(out_dir, m).exists()]
    if missing:
        print(f"error: missing generated file(s): {missing}", file=sys.stderr)
        return 1

    from .pipeline import prepare_windows  # local import to keep startup light

    windows_by_ticker = prepare_windows(config)
    windows_by_key = {(w.ticker, w.start_index): w
                      for ws in windows_by_ticker.values() for w in ws}
    sequences_by_method = {
        m: read_sequences(sequences_path(out_dir, m), windows_by_key)
        for m in config.methods
    }
    runtime_file = out_dir / "runtime.jsonl"
    records = read_runtime_log(runtime_file) if runtime_file.exists() else []

    report, overlaps = run_evaluation(config, sequences_by_method,
                                      runtime_records=records)
    report.write(out_dir / "report.json")
    for method, overlap in overlaps.items():
        write_embedding_csv(overlap.coords, overlap.origins,
                            embedding_path(out_dir, method))
    write_config_snapshot(config, out_dir / "config_snapshot.json")
    print(f"wrote {out_dir / 'report.json'}")
    _print_report(report)
    return 0


def cmd_report(args) -> int:
    out_dir = Path(args.out or "out")
    report_file = out_dir / "report.json"
    runtime_file = out_dir / "runtime.jsonl"
    if not report_file.exists() and not runtime_file.exists():
        print(f"error: nothing to report in {out_dir}", file=sys.stderr)
        return 1
    if report_file.exists():
        import json

        with report_file.open() as fh:
            _print_report(EvalReport.from_dict(json.load(fh)))
    if runtime_file.exists():
        print(summary_table(read_runtime_log(runtime_file)))
    return 0


def _print_report(report: EvalReport) -> None:
    header = f"{'method':<8} {'auc_real':>9} {'auc_synth':>10} {'auc_mixed':>10} {'mixing':>8}"
    print(header)
    for method, ev in sorted(report.methods.items()):
        fmt = lambda v: f"{v:.4f}" if v is not None else "-"
        line = (f"{method:<8} {fmt(ev.auc_real):>9} {fmt(ev.auc_synthetic):>10} "
                f"{fmt(ev.auc_mixed):>10} {fmt(ev.mixing_score):>8}")
        if ev.annotation:
            line += f"  [{ev.annotation}]"
        print(line)


def _random_window(rng: np.random.Generator, length: int) -> Window:
    raw = rng.random(length) * 50.0 + 50.0
    return minmax_scale(Window(ticker="selftest", start_index=0, raw_values=raw))


def selftest_visibility(n_windows: int = 60, lengths: tuple[int, ...] = (20, 60),
                        seed: int = 1234, nvg_builder=build_nvg,
                        hvg_builder=build_hvg) -> tuple[bool, str]:
    """Compare the fast builders against the literal per-pair criterion."""
    rng = np.random.default_rng(seed)
    for length in lengths:
        for _ in range(n_windows):
            window = _random_window(rng, length)
            for builder, oracle, name in ((nvg_builder, nvg_bruteforce, "nvg"),
                                          (hvg_builder, hvg_bruteforce, "hvg")):
                fast = set(builder(window).edges)
                slow = set(oracle(window).edges)
                if fast != slow:
                    offending = sorted(fast ^ slow)[0]
                    return False, (f"{name}: edge mismatch on pair {offending} "
                                   f"(length {length})")
    return True, f"{n_windows} windows per length {lengths}, exact match"


def selftest_dtw(n_pairs: int = 150, max_len: int = 7, seed: int = 99,
                 dtw=dtw_distance) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    for _ in range(n_pairs):
        a = rng.random(int(rng.integers(1, max_len + 1)))
        b = rng.random(int(rng.integers(1, max_len + 1)))
        fast, slow = dtw(a, b), dtw_bruteforce(a, b)
        if abs(fast - slow) > 1e-9:
            return False, f"dtw mismatch: {fast} vs {slow} on lengths {a.size},{b.size}"
    return True, f"{n_pairs} pairs up to length {max_len}, tolerance 1e-9"


def selftest_auc(n_cases: int = 200, max_points: int = 40, seed: int = 7,
                 auc=roc_auc) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    for _ in range(n_cases):
        n = int(rng.integers(4, max_points + 1))
        labels = rng.integers(0, 2, size=n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        scores = np.round(rng.random(n), 2)  # rounding forces ties
        fast, slow = auc(scores, labels), auc_bruteforce(scores, labels)
        if abs(fast - slow) > 1e-12:
            return False, f"auc mismatch: {fast} vs {slow} on {n} points"
    return True, f"{n_cases} score sets up to {max_points} points, exact"


def cmd_selftest(args=None, nvg_builder=build_nvg, hvg_builder=build_hvg) -> int:
    suites = [
        ("visibility vs brute force", lambda: selftest_visibility(
            nvg_builder=nvg_builder, hvg_builder=hvg_builder)),
        ("dtw vs brute force", selftest_dtw),
        ("auc vs pairwise count", selftest_auc),
    ]
    failed = False
    for name, suite in suites:
        ok, detail = suite()
        status = "PASS" if ok else "FAIL"
        failed = failed or not ok
        print(f"{status}  {name:<28} {detail}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vgsynth",
        description="Visibility-graph based synthetic time series generation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler in (("generate", cmd_generate), ("evaluate", cmd_evaluate)):
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--input", type=str, default=None, help="date,ticker,close file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--window", type=int, default=None, choices=(20, 60))
        p.add_argument("--methods", type=str, default=None,
                       help="comma-separated subset of nvg,hvg,nvmg,vrp")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.set_defaults(handler=handler)
    p = sub.add_parser("selftest")
    p.set_defaults(handler=cmd_selftest)
    p = sub.add_parser("report")
    p.add_argument("--out", type=str, default="out")
    p.set_defaults(handler=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
