"""Synthetic sequence generation by graph walks, the shuffle baseline, and
the DS/SimDS downsampling procedures.

A walk starts at the node holding the first time index, appends one value per
step, and picks the next node according to the configured strategy. Values of
multi-value nodes are drawn either uniformly at random or round-robin in
stored order. Output sequences are inverse-transformed to the source window's
price scale; the scaled walk output is kept alongside for diagnostics.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import GraphIntegrityError
from .graphs import GraphNode, MultiGraph, VisibilityGraph
from .ingest import Window, inverse_transform

NODE_STRATEGIES = (
    "uniform_random",
    "random_neighbor",
    "random_neighbor_graph_switching",
    "restart_random",
    "degree_weighted",
)
VALUE_POLICIES = ("random", "round_robin")
RESTART_JUMPS = ("neighbor", "uniform")

DEFAULT_RESTART_PROB = 0.15
DEFAULT_SWITCH_PROB = 0.5


class DownsampleWarning(UserWarning):
    """Fewer candidate sequences than requested; all were returned."""


@dataclass
class WalkConfig:
    """Parameters of one generation walk.

    ``restart_jump`` selects what a non-restart step of the restart strategy
    does: move to a uniform random neighbor ("neighbor", the classic walk
    with restart) or to a uniform random node ("uniform").
    """

    node_strategy: str = "restart_random"
    value_policy: str = "round_robin"
    target_length: int = 20
    seed: int = 0
    restart_prob: float = DEFAULT_RESTART_PROB
    switch_prob: float = DEFAULT_SWITCH_PROB
    restart_jump: str = "neighbor"
    start_node: int | None = None

    def validate(self) -> None:
        if self.node_strategy not in NODE_STRATEGIES:
            raise ValueError(f"unknown node strategy {self.node_strategy!r}")
        if self.value_policy not in VALUE_POLICIES:
            raise ValueError(f"unknown value policy {self.value_policy!r}")
        if self.restart_jump not in RESTART_JUMPS:
            raise ValueError(f"unknown restart jump {self.restart_jump!r}")
        if not 0.0 <= self.restart_prob <= 1.0:
            raise ValueError(f"restart_prob must be in [0, 1], got {self.restart_prob}")
        if not 0.0 <= self.switch_prob <= 1.0:
            raise ValueError(f"switch_prob must be in [0, 1], got {self.switch_prob}")
        if self.target_length < 1:
            raise ValueError(f"target_length must be >= 1, got {self.target_length}")


@dataclass(eq=False)
class SyntheticSequence:
    """Generated sequence plus provenance.

    ``values`` are in price space; ``scaled_values`` is the walk output in
    [0, 1] (None only if the source window was never scaled).
    """

    values: np.ndarray
    scaled_values: np.ndarray | None
    method: str
    ticker: str
    window_start: int
    seed: int
    scale_min: float
    scale_max: float
    config: WalkConfig | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.scaled_values is not None:
            self.scaled_values = np.asarray(self.scaled_values, dtype=float)


@dataclass
class _WalkState:
    rng: np.random.Generator
    cursors: dict[int, int] = field(default_factory=dict)


def _pick(rng: np.random.Generator, ids: np.ndarray) -> int:
    return int(ids[rng.integers(0, ids.size)])


def next_node(graph, current: int, config: WalkConfig, rng: np.random.Generator) -> int:
    """Select the node following ``current`` under the configured strategy."""
    strategy = config.node_strategy
    if strategy == "uniform_random":
        return int(rng.integers(0, graph.num_nodes))

    if strategy == "restart_random":
        if rng.random() < config.restart_prob:
            return config.start_node if config.start_node is not None else graph.first_node()
        if config.restart_jump == "uniform":
            return int(rng.integers(0, graph.num_nodes))
        return _pick(rng, _neighbors_or_raise(graph, current))

    neighbors = _neighbors_or_raise(graph, current)
    if strategy == "random_neighbor":
        return _pick(rng, neighbors)
    if strategy == "random_neighbor_graph_switching":
        cross = graph.cross_ticker_neighbor_ids(current)
        if cross.size and rng.random() < config.switch_prob:
            return _pick(rng, cross)
        return _pick(rng, neighbors)
    if strategy == "degree_weighted":
        ids, mults = graph.weighted_neighbors(current)
        if ids.size == 0:
            raise GraphIntegrityError(f"node {current} is isolated")
        probs = mults / mults.sum()
        return int(rng.choice(ids, p=probs))
    raise ValueError(f"unknown node strategy {strategy!r}")


def _neighbors_or_raise(graph, current: int) -> np.ndarray:
    neighbors = graph.neighbor_ids(current)
    if neighbors.size == 0:
        raise GraphIntegrityError(
            f"node {current} is isolated; consecutive-edge property violated"
        )
    return neighbors


def next_value(node: GraphNode, policy: str, state: _WalkState) -> float:
    """Draw one value from a node under the given policy."""
    values = node.values
    if len(values) == 1:
        return values[0]
    if policy == "random":
        return values[int(state.rng.integers(0, len(values)))]
    if policy == "round_robin":
        cursor = state.cursors.get(node.node_id, 0)
        state.cursors[node.node_id] = (cursor + 1) % len(values)
        return values[cursor]
    raise ValueError(f"unknown value policy {policy!r}")


def generate_sequence(
    graph: VisibilityGraph | MultiGraph,
    config: WalkConfig,
    ticker: str | None = None,
) -> SyntheticSequence:
    """Walk ``graph`` and emit a sequence of ``config.target_length`` values.

    For a multigraph, ``ticker`` anchors the walk start at that ticker's
    first node and selects the scale used for the inverse transform.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    start = config.start_node
    if start is None:
        start = graph.first_node(ticker)
        config = replace(config, start_node=start)
    state = _WalkState(rng=rng)

    current = start
    scaled = [next_value(graph.nodes[current], config.value_policy, state)]
    while len(scaled) < config.target_length:
        current = next_node(graph, current, config, rng)
        scaled.append(next_value(graph.nodes[current], config.value_policy, state))

    scaled_arr = np.array(scaled, dtype=float)
    scale_min, scale_max, is_constant = graph.scale_for(ticker)
    values = inverse_transform(scaled_arr, scale_min, scale_max, is_constant)
    source_ticker, window_start, _ = _graph_source(graph, ticker)
    return SyntheticSequence(
        values=values,
        scaled_values=scaled_arr,
        method=graph.kind,
        ticker=source_ticker,
        window_start=window_start,
        seed=config.seed,
        scale_min=scale_min,
        scale_max=scale_max,
        config=config,
    )


def _graph_source(graph, ticker: str | None) -> tuple[str, int, int]:
    if isinstance(graph, MultiGraph):
        start, length = graph.segment
        return (ticker if ticker is not None else graph.tickers[0], start, length)
    return graph.source


def vrp_generate(window: Window, seed: int = 0) -> SyntheticSequence:
    """Shuffle-baseline: a uniformly random permutation of the window values."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(window.length)
    values = window.raw_values[perm]
    scaled = window.scaled_values[perm] if window.scaled_values is not None else None
    lo = window.scale_min if window.scale_min is not None else float(window.raw_values.min())
    hi = window.scale_max if window.scale_max is not None else float(window.raw_values.max())
    return SyntheticSequence(
        values=values,
        scaled_values=scaled,
        method="vrp",
        ticker=window.ticker,
        window_start=window.start_index,
        seed=seed,
        scale_min=lo,
        scale_max=hi,
    )


def dtw_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Dynamic time warping distance with absolute-difference local cost.

    Full alignment, no window constraint; symmetric in its arguments.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("dtw_distance requires non-empty sequences")
    n, m = a.size, b.size
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        cost = np.abs(a[i - 1] - b)
        for j in range(1, m + 1):
            acc[i, j] = cost[j - 1] + min(acc[i - 1, j], acc[i, j - 1], acc[i - 1, j - 1])
    return float(acc[n, m])


def dtw_bruteforce(a: np.ndarray, b: np.ndarray) -> float:
    """Plain recursion over all warping paths; exponential, test oracle only."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("dtw_bruteforce requires non-empty sequences")

    def rec(i: int, j: int) -> float:
        cost = abs(a[i] - b[j])
        if i == 0 and j == 0:
            return cost
        best = np.inf
        if i > 0:
            best = min(best, rec(i - 1, j))
        if j > 0:
            best = min(best, rec(i, j - 1))
        if i > 0 and j > 0:
            best = min(best, rec(i - 1, j - 1))
        return cost + best

    return float(rec(a.size - 1, b.size - 1))


def downsample(
    sequences: list[SyntheticSequence],
    reference: Window,
    k: int,
    mode: str = "ds",
    seed: int = 0,
) -> list[SyntheticSequence]:
    """Keep ``k`` of the candidate sequences.

    "ds" draws uniformly without replacement; "simds" keeps the k sequences
    with the smallest DTW distance to the reference window's raw values, ties
    broken by generation order. Selected sequences are returned in generation
    order. Asking for more sequences than exist returns them all and emits a
    DownsampleWarning.
    """
    if mode not in ("ds", "simds"):
        raise ValueError(f"unknown downsample mode {mode!r}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > len(sequences):
        warnings.warn(
            f"requested {k} sequences but only {len(sequences)} candidates",
            DownsampleWarning,
            stacklevel=2,
        )
        return list(sequences)
    if k == len(sequences):
        return list(sequences)

    if mode == "ds":
        rng = np.random.default_rng(seed)
        chosen = sorted(rng.choice(len(sequences), size=k, replace=False))
    else:
        dists = np.array([dtw_distance(s.values, reference.raw_values) for s in sequences])
        chosen = sorted(np.argsort(dists, kind="stable")[:k])
    return [sequences[int(i)] for i in chosen]


def derive_seed(master_seed: int, *parts) -> int:
    """Stable per-unit seed from the master seed and unit identity.

    Independent of worker scheduling: the same (master seed, parts) always
    yields the same value.
    """
    key = ":".join([str(master_seed)] + [str(p) for p in parts])
    digest = hashlib.sha256(key.encode()).digest()
    return int.from_bytes(digest[:8], "big")
