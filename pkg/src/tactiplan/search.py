"""Budget-constrained search over configuration space.

The predictor is affine in the bits, so under uniform costs the best
k-sensor configuration is simply the k largest coefficients. Exhaustive
enumeration (2^N, capped at N=25) validates that closed form, handles
non-uniform costs, and produces the full performance/cost frontier.

Enumeration is chunked by bit-prefix; chunk results merge under a total
order (max predicted, then min cost, then lexicographically smallest
bits), so output is identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import SensorConfiguration
from .errors import InvariantError, KOutOfRange, LayoutTooLarge
from .layout import SensorLayout, total_cost
from .predictor import TunedPredictor, predict

MAX_EXHAUSTIVE_SITES = 25
_CHUNK_BITS = 16


@dataclass(frozen=True)
class SearchResult:
    """One evaluated configuration with model-predicted success and cost."""

    config: SensorConfiguration
    predicted: float
    cost: float

    def __post_init__(self):
        object.__setattr__(self, "predicted", float(self.predicted))
        object.__setattr__(self, "cost", float(self.cost))
        if not (0.0 <= self.predicted <= 1.0):
            raise InvariantError(f"predicted must be in [0, 1], got {self.predicted}")
        if self.cost < 0:
            raise InvariantError(f"cost must be >= 0, got {self.cost}")


@dataclass(frozen=True)
class ParetoFrontier:
    """Non-dominated (cost, predicted) points, ascending in both."""

    points: tuple[SearchResult, ...]

    def __post_init__(self):
        points = tuple(self.points)
        object.__setattr__(self, "points", points)
        for prev, cur in zip(points, points[1:]):
            if not (cur.cost > prev.cost and cur.predicted > prev.predicted):
                raise InvariantError(
                    f"frontier must strictly increase in cost and predicted: "
                    f"({prev.cost}, {prev.predicted}) -> ({cur.cost}, {cur.predicted})"
                )

    def __len__(self) -> int:
        return len(self.points)

    def csv_rows(self) -> list[list]:
        """Rows for the frontier CSV: cost,predicted,bits."""
        return [[p.cost, p.predicted, p.config.bitstring()] for p in self.points]


def _check_dims(predictor: TunedPredictor, layout: SensorLayout) -> None:
    if predictor.n_sites != layout.n_sites:
        raise InvariantError(
            f"predictor has {predictor.n_sites} weights, layout {layout.name!r} has {layout.n_sites} sites"
        )


def _result_for_bits(predictor: TunedPredictor, layout: SensorLayout, bits) -> SearchResult:
    config = SensorConfiguration(tuple(int(b) for b in bits))
    return SearchResult(
        config=config,
        predicted=predict(predictor, config),
        cost=total_cost(layout, config),
    )


def best_k_subset(predictor: TunedPredictor, layout: SensorLayout, k: int) -> SearchResult:
    """Configuration of the k largest-coefficient sites (ties: lowest id).

    Provably optimal for exactly-k selection when the predictor is affine
    and site costs are uniform.
    """
    _check_dims(predictor, layout)
    n = layout.n_sites
    if not (0 <= k <= n):
        raise KOutOfRange(f"k must be in [0, {n}], got {k}")
    order = sorted(range(n), key=lambda i: (-predictor.weights[i], i))
    chosen = set(order[:k])
    bits = [1 if i in chosen else 0 for i in range(n)]
    return _result_for_bits(predictor, layout, bits)


def _bits_of_index(index: int, n: int) -> list[int]:
    return [(index >> j) & 1 for j in range(n)]


def _scan_chunk(start: int, stop: int, n: int, weights: np.ndarray, costs: np.ndarray,
                p0: float, p_full: float, budget: float):
    """Best (pred desc, cost asc, lex-smallest bits) config in [start, stop)."""
    idx = np.arange(start, stop, dtype=np.int64)
    sums = np.zeros(idx.shape[0])
    cost = np.zeros(idx.shape[0])
    revbits = np.zeros(idx.shape[0], dtype=np.int64)
    for j in range(n):
        bit = (idx >> j) & 1
        sums += weights[j] * bit
        cost += costs[j] * bit
        revbits |= bit << (n - 1 - j)
    pred = np.clip(p0 * (1.0 - sums) + p_full * sums, 0.0, 1.0)
    feasible = cost <= budget
    if not feasible.any():
        return None
    pred_f, cost_f, rev_f, idx_f = pred[feasible], cost[feasible], revbits[feasible], idx[feasible]
    best_pred = pred_f.max()
    tie = pred_f == best_pred
    best_cost = cost_f[tie].min()
    tie &= cost_f == best_cost
    pick = np.argmin(rev_f[tie])
    return best_pred, best_cost, int(rev_f[tie][pick]), int(idx_f[tie][pick])


def _chunk_ranges(n: int):
    total = 1 << n
    size = 1 << min(n, _CHUNK_BITS)
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def exhaustive_search(
    predictor: TunedPredictor,
    layout: SensorLayout,
    budget: float,
    workers: int = 1,
) -> SearchResult:
    """Max-predicted configuration with cost <= budget, by full enumeration.

    Ties break toward lower cost, then lexicographically smallest bits.
    The empty configuration is always feasible for budget >= 0.
    """
    _check_dims(predictor, layout)
    n = layout.n_sites
    if n > MAX_EXHAUSTIVE_SITES:
        raise LayoutTooLarge(f"exhaustive search is capped at {MAX_EXHAUSTIVE_SITES} sites, layout has {n}")
    if budget < 0:
        raise InvariantError(f"budget must be >= 0, got {budget}")
    weights = predictor.weights
    costs = np.asarray(layout.costs())
    anchors = predictor.anchors

    def scan(rng):
        return _scan_chunk(rng[0], rng[1], n, weights, costs, anchors.p0, anchors.p_full, budget)

    ranges = _chunk_ranges(n)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunk_bests = list(pool.map(scan, ranges))
    else:
        chunk_bests = [scan(r) for r in ranges]

    best = None
    for cand in chunk_bests:  # chunk order is fixed, merge is associative
        if cand is None:
            continue
        if best is None or (-cand[0], cand[1], cand[2]) < (-best[0], best[1], best[2]):
            best = cand
    return _result_for_bits(predictor, layout, _bits_of_index(best[3], n))


def _uniform_cost(layout: SensorLayout) -> float | None:
    costs = layout.costs()
    return costs[0] if len(set(costs)) == 1 else None


def _prune_to_frontier(candidates: list[tuple[float, float, list[int]]]) -> list[tuple[float, float, list[int]]]:
    """Keep strictly increasing (cost, predicted) prefix-maxima."""
    frontier = []
    for cost, pred, bits in sorted(candidates, key=lambda t: t[0]):
        if not frontier or pred > frontier[-1][1]:
            frontier.append((cost, pred, bits))
    return frontier


def pareto_frontier(predictor: TunedPredictor, layout: SensorLayout, workers: int = 1) -> ParetoFrontier:
    """All non-dominated (cost, predicted) configurations.

    Exhaustive for N <= 25. Beyond that the top-k chain is exact under
    uniform costs (affine predictor); non-uniform larger layouts raise.
    """
    _check_dims(predictor, layout)
    n = layout.n_sites
    if n <= MAX_EXHAUSTIVE_SITES:
        candidates = _exhaustive_cost_bests(predictor, layout, workers)
    elif _uniform_cost(layout) is not None:
        candidates = []
        for k in range(n + 1):
            res = best_k_subset(predictor, layout, k)
            candidates.append((res.cost, res.predicted, list(res.config.bits)))
    else:
        raise LayoutTooLarge(
            f"frontier needs exhaustive enumeration for non-uniform costs; layout has {n} > {MAX_EXHAUSTIVE_SITES} sites"
        )
    frontier = _prune_to_frontier(candidates)
    return ParetoFrontier(
        points=tuple(_result_for_bits(predictor, layout, bits) for _, _, bits in frontier)
    )


def _exhaustive_cost_bests(predictor: TunedPredictor, layout: SensorLayout, workers: int):
    """Per-distinct-cost best (pred, then lex bits) over all 2^N configs."""
    n = layout.n_sites
    weights = predictor.weights
    costs = np.asarray(layout.costs())
    anchors = predictor.anchors

    def scan(rng):
        start, stop = rng
        idx = np.arange(start, stop, dtype=np.int64)
        sums = np.zeros(idx.shape[0])
        cost = np.zeros(idx.shape[0])
        revbits = np.zeros(idx.shape[0], dtype=np.int64)
        for j in range(n):
            bit = (idx >> j) & 1
            sums += weights[j] * bit
            cost += costs[j] * bit
            revbits |= bit << (n - 1 - j)
        pred = np.clip(anchors.p0 * (1.0 - sums) + anchors.p_full * sums, 0.0, 1.0)
        order = np.lexsort((revbits, -pred))  # best pred first, then smallest bits
        cost_o, pred_o, rev_o, idx_o = cost[order], pred[order], revbits[order], idx[order]
        _, first = np.unique(cost_o, return_index=True)  # first hit per cost is its best
        return {
            float(cost_o[i]): (float(pred_o[i]), int(rev_o[i]), int(idx_o[i]))
            for i in first
        }

    ranges = _chunk_ranges(n)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(scan, ranges))
    else:
        partials = [scan(r) for r in ranges]

    merged: dict[float, tuple[float, int, int]] = {}
    for part in partials:  # fixed chunk order; per-key merge is associative
        for c, cand in part.items():
            cur = merged.get(c)
            if cur is None or (-cand[0], cand[1]) < (-cur[0], cur[1]):
                merged[c] = cand
    return [(c, pred, _bits_of_index(index, n)) for c, (pred, _, index) in merged.items()]
