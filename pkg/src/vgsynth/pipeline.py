"""End-to-end orchestration: ingest, graph construction, generation,
downsampling, evaluation, and report assembly.

All stochastic steps derive their seeds from the master seed and the unit
identity (ticker, window start, method), never from scheduling order, so a
run is reproducible for any worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embedding import OverlapResult, embedding_overlap
from .evaluate import EvalReport, run_experiment
from .generate import (SyntheticSequence, WalkConfig, derive_seed, downsample,
                       generate_sequence, vrp_generate)
from .graphs import build_hvg, build_multigraph, build_nvg
from .ingest import TimeSeries, Window, load_series, minmax_scale, slice_windows
from .runtime import RuntimeRecord, time_unit

METHODS = ("nvg", "hvg", "nvmg", "vrp")
DOWNSAMPLE_MODES = ("ds", "simds")


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    """Run manifest; see README for the config file schema."""

    input: str = ""
    out_dir: str = "out"
    seed: int = 0
    workers: int = 1
    window_length: int = 20
    stride: int | None = None
    methods: tuple[str, ...] = ("nvg", "hvg", "nvmg", "vrp")
    similar_value_epsilon: float = 0.01
    sequences_per_window: int = 10
    downsample_mode: str = "simds"
    downsample_k: int = 1
    node_strategy: str = "restart_random"
    value_policy: str = "round_robin"
    restart_prob: float = 0.15
    switch_prob: float = 0.5
    restart_jump: str = "neighbor"
    split: tuple[float, float, float] = (0.7, 0.15, 0.15)
    l2: float = 1e-3
    max_iter: int = 10000
    tol: float = 1e-6
    perplexity: float = 30.0
    embed_iterations: int = 500
    mixing_k: int = 10
    embed_max_points: int = 2000

    def validate(self) -> None:
        if self.window_length < 3:
            raise ConfigError(f"window length must be >= 3, got {self.window_length}")
        if not self.methods:
            raise ConfigError("at least one method is required")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown method(s) {unknown}; valid methods: {list(METHODS)}")
        if self.downsample_mode not in DOWNSAMPLE_MODES:
            raise ConfigError(f"unknown downsample mode {self.downsample_mode!r}; "
                              f"valid modes: {list(DOWNSAMPLE_MODES)}")
        for name in ("restart_prob", "switch_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {p}")
        if self.sequences_per_window < 1 or self.downsample_k < 1:
            raise ConfigError("sequences_per_window and downsample k must be >= 1")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        try:
            self.walk_config(target_length=self.window_length).validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def walk_config(self, target_length: int, seed: int = 0) -> WalkConfig:
        return WalkConfig(
            node_strategy=self.node_strategy,
            value_policy=self.value_policy,
            target_length=target_length,
            seed=seed,
            restart_prob=self.restart_prob,
            switch_prob=self.switch_prob,
            restart_jump=self.restart_jump,
        )

    def to_dict(self) -> dict:
        return {
            "input": self.input,
            "out_dir": self.out_dir,
            "seed": self.seed,
            "workers": self.workers,
            "window_length": self.window_length,
            "stride": self.stride,
            "methods": list(self.methods),
            "similar_value_epsilon": self.similar_value_epsilon,
            "sequences_per_window": self.sequences_per_window,
            "downsample": {"mode": self.downsample_mode, "k": self.downsample_k},
            "walk": {
                "node_strategy": self.node_strategy,
                "value_policy": self.value_policy,
                "restart_prob": self.restart_prob,
                "switch_prob": self.switch_prob,
                "restart_jump": self.restart_jump,
            },
            "evaluation": {
                "split": list(self.split),
                "l2": self.l2,
                "max_iter": self.max_iter,
                "tol": self.tol,
                "perplexity": self.perplexity,
                "embed_iterations": self.embed_iterations,
                "mixing_k": self.mixing_k,
                "embed_max_points": self.embed_max_points,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        flat = {}
        for key, value in data.items():
            if key == "downsample":
                flat["downsample_mode"] = value.get("mode", cls.downsample_mode)
                flat["downsample_k"] = value.get("k", cls.downsample_k)
            elif key == "walk":
                for wk, wv in value.items():
                    if wk not in known:
                        raise ConfigError(f"unknown walk option {wk!r}")
                    flat[wk] = wv
            elif key == "evaluation":
                for ek, ev in value.items():
                    if ek == "split":
                        flat["split"] = tuple(ev)
                    elif ek not in known:
                        raise ConfigError(f"unknown evaluation option {ek!r}")
                    else:
                        flat[ek] = ev
            elif key in known:
                flat[key] = value
            else:
                raise ConfigError(f"unknown config option {key!r}")
        if "methods" in flat:
            flat["methods"] = tuple(flat["methods"])
        return cls(**flat)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        try:
            with Path(path).open() as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def prepare_windows(config: RunConfig,
                    series_list: list[TimeSeries] | None = None) -> dict[str, list[Window]]:
    """Slice and scale all windows, keyed by ticker (sorted)."""
    if series_list is None:
        series_list = load_series(config.input)
    out: dict[str, list[Window]] = {}
    for series in sorted(series_list, key=lambda s: s.ticker):
        windows = slice_windows(series, config.window_length, config.stride)
        out[series.ticker] = [minmax_scale(w) for w in windows]
    return out


_BUILDERS = {"nvg": build_nvg, "hvg": build_hvg}


def _generate_for_window(method: str, window: Window, config: RunConfig) -> list[SyntheticSequence]:
    """All kept sequences for one (method, window) pair."""
    candidates = []
    for i in range(config.sequences_per_window):
        seq_seed = derive_seed(config.seed, window.ticker, window.start_index, method, i)
        if method == "vrp":
            candidates.append(vrp_generate(window, seed=seq_seed))
        else:
            graph = _BUILDERS[method](window)
            walk = config.walk_config(target_length=window.length, seed=seq_seed)
            candidates.append(generate_sequence(graph, walk))
    ds_seed = derive_seed(config.seed, window.ticker, window.start_index, method, "downsample")
    return downsample(candidates, window, k=min(config.downsample_k, len(candidates)),
                      mode=config.downsample_mode, seed=ds_seed)


def _generate_for_segment(start: int, windows: list[Window],
                          config: RunConfig) -> list[SyntheticSequence]:
    """Multigraph generation: one shared graph, walks anchored per ticker."""
    graph = build_multigraph(windows, similar_value_epsilon=config.similar_value_epsilon)
    kept: list[SyntheticSequence] = []
    for window in windows:
        candidates = []
        for i in range(config.sequences_per_window):
            seq_seed = derive_seed(config.seed, window.ticker, start, "nvmg", i)
            walk = config.walk_config(target_length=window.length, seed=seq_seed)
            candidates.append(generate_sequence(graph, walk, ticker=window.ticker))
        ds_seed = derive_seed(config.seed, window.ticker, start, "nvmg", "downsample")
        kept.extend(downsample(candidates, window,
                               k=min(config.downsample_k, len(candidates)),
                               mode=config.downsample_mode, seed=ds_seed))
    return kept


def run_generation(
    config: RunConfig, series_list: list[TimeSeries] | None = None
) -> tuple[dict[str, list[SyntheticSequence]], list[RuntimeRecord]]:
    """Generate sequences for every configured method.

    Per-ticker units are timed for nvg/hvg/vrp; nvmg is timed per segment.
    Output order is deterministic: sorted by (ticker, window start, seed).
    """
    config.validate()
    windows_by_ticker = prepare_windows(config, series_list)
    records: list[RuntimeRecord] = []
    by_method: dict[str, list[SyntheticSequence]] = {}

    def _run_tasks(tasks):
        # tasks: list of (sort_key, callable) -> results in sort_key order
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                futures = [(key, pool.submit(fn)) for key, fn in tasks]
                return [(key, fut.result()) for key, fut in futures]
        return [(key, fn()) for key, fn in tasks]

    for method in config.methods:
        if method == "nvmg":
            segments: dict[int, list[Window]] = {}
            for ticker in sorted(windows_by_ticker):
                for w in windows_by_ticker[ticker]:
                    segments.setdefault(w.start_index, []).append(w)
            tasks = [
                (start, (lambda s=start, ws=ws: time_unit(
                    lambda: _generate_for_segment(s, ws, config),
                    unit_id=f"segment_{s}", method="nvmg", unit_kind="segment")))
                for start, ws in sorted(segments.items())
            ]
        else:
            tasks = [
                (ticker, (lambda t=ticker, ws=ws: time_unit(
                    lambda: [seq for w in ws for seq in _generate_for_window(method, w, config)],
                    unit_id=t, method=method, unit_kind="ticker")))
                for ticker, ws in sorted(windows_by_ticker.items())
            ]
        sequences: list[SyntheticSequence] = []
        for _, (result, record) in sorted(_run_tasks(tasks), key=lambda kv: kv[0]):
            sequences.extend(result)
            records.append(record)
        # stable sort keeps generation order within a window
        sequences.sort(key=lambda s: (s.ticker, s.window_start))
        by_method[method] = sequences
    return by_method, records


def write_sequences(sequences: list[SyntheticSequence], path: str | Path) -> None:
    """Line-delimited records: ticker, window_start, method, seed, values."""
    with Path(path).open("w") as fh:
        for seq in sequences:
            fh.write(json.dumps({
                "ticker": seq.ticker,
                "window_start": seq.window_start,
                "method": seq.method,
                "seed": seq.seed,
                "values": [float(v) for v in seq.values],
            }) + "\n")


def read_sequences(path: str | Path,
                   windows_by_key: dict[tuple[str, int], Window] | None = None
                   ) -> list[SyntheticSequence]:
    """Read generated sequences; re-attach source-window scales when given."""
    out = []
    with Path(path).open() as fh:
        for line in fh:
            rec = json.loads(line)
            key = (rec["ticker"], rec["window_start"])
            window = windows_by_key.get(key) if windows_by_key else None
            lo = window.scale_min if window is not None else 0.0
            hi = window.scale_max if window is not None else 1.0
            values = np.array(rec["values"], dtype=float)
            scaled = None
            if window is not None:
                scaled = (values - lo) / (hi - lo) if hi > lo else np.full_like(values, 0.5)
            out.append(SyntheticSequence(
                values=values, scaled_values=scaled, method=rec["method"],
                ticker=rec["ticker"], window_start=rec["window_start"],
                seed=rec["seed"], scale_min=lo, scale_max=hi,
            ))
    return out


def scaled_vectors(sequences: list[SyntheticSequence]) -> np.ndarray:
    """Stack sequences as scaled feature vectors for the embedding."""
    rows = []
    for seq in sequences:
        if seq.scaled_values is not None:
            rows.append(seq.scaled_values)
        elif seq.scale_max > seq.scale_min:
            rows.append((seq.values - seq.scale_min) / (seq.scale_max - seq.scale_min))
        else:
            rows.append(np.full_like(seq.values, 0.5))
    return np.array(rows)


def run_evaluation(
    config: RunConfig,
    sequences_by_method: dict[str, list[SyntheticSequence]],
    series_list: list[TimeSeries] | None = None,
    runtime_records: list[RuntimeRecord] | None = None,
    with_embedding: bool = True,
) -> tuple[EvalReport, dict[str, OverlapResult]]:
    """Run the classification experiment and the embedding diagnostic."""
    config.validate()
    windows_by_ticker = prepare_windows(config, series_list)
    all_windows = [w for ws in windows_by_ticker.values() for w in ws]
    report = run_experiment(
        all_windows,
        sequences_by_method,
        split=config.split,
        seed=config.seed,
        l2=config.l2,
        max_iter=config.max_iter,
        tol=config.tol,
    )
    report.config = config.to_dict()
    if runtime_records:
        for method, total in _totals_by_method(runtime_records).items():
            report.runtime_totals[method] = total

    overlaps: dict[str, OverlapResult] = {}
    if with_embedding:
        real_vectors = np.array([w.scaled_values for w in all_windows])
        for method, sequences in sequences_by_method.items():
            if not sequences:
                continue
            overlap = embedding_overlap(
                real_vectors, scaled_vectors(sequences),
                perplexity=config.perplexity, iterations=config.embed_iterations,
                seed=config.seed, k=config.mixing_k,
                max_points=config.embed_max_points,
            )
            overlaps[method] = overlap
            if method in report.methods:
                report.methods[method].mixing_score = overlap.mixing
    return report, overlaps


def _totals_by_method(records: list[RuntimeRecord]) -> dict[str, int]:
    totals: dict[str, int] = {}
    for rec in records:
        totals[rec.method] = totals.get(rec.method, 0) + rec.elapsed_ms
    return totals


def write_config_snapshot(config: RunConfig, path: str | Path) -> None:
    with Path(path).open("w") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def sequences_path(out_dir: str | Path, method: str) -> Path:
    return Path(out_dir) / f"sequences_{method}.jsonl"


def embedding_path(out_dir: str | Path, method: str) -> Path:
    return Path(out_dir) / f"embedding_{method}.csv"
