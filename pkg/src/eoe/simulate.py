"""Event-driven Monte Carlo of the coupled walk + SIS process.

Replications simulate the exact law of (T, total jumps, reinfections) on the
walker-pair configuration chain: recovery clocks race the two jump clocks,
infection is applied instantly on co-location, and jumps that do not change
the configuration class are counted through one Poisson draw per replication
(their count over each sojourn is conditionally Poisson; see _kernel_py).

Replication r's randomness is a pure function of (seed, r), so results are
independent of worker count and shard layout.
"""

from __future__ import annotations

import multiprocessing as mp
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import RunawaySimulationError
from .graphs import BIPARTITE, COMPLETE, GENERIC, RING, Graph, pair_class
from .kernels import get_impl
from .rng import replication_stream, tail_stream
from .summary import SampleSummary

MAX_EVENTS = 10**9


@dataclass(frozen=True)
class EpidemicSample:
    """One end-of-epidemic realization."""

    t: float
    n_jumps: int
    n_reinfections: int


@dataclass(frozen=True)
class MeetingSample:
    """One meeting-time realization: elapsed time and jump count."""

    m: float
    n_jumps: int


@dataclass(frozen=True)
class SimChain:
    """Walker-pair configuration chain in CSR form for the kernels.

    Rows hold the conditional distribution of class-changing jumps only;
    ``p_self`` is the per-class probability that a jump preserves the class.
    ``diag_of[v]`` is the co-located state at vertex v (families collapse all
    of them into one met state by symmetry).
    """

    row_ptr: np.ndarray
    cols: np.ndarray
    cum: np.ndarray
    p_self: np.ndarray
    is_met: np.ndarray
    diag_of: tuple[int, ...]
    start_d1: int
    pair_index: dict | None = None

    def pair_state(self, g: Graph, i: int, j: int) -> int:
        if i == j:
            return self.diag_of[i]
        if self.pair_index is not None:
            return self.pair_index[(min(i, j), max(i, j))]
        return pair_class(g, i, j)


def _assemble(rows: list[list[tuple[int, float]]], p_self: list[float],
              is_met: list[bool], diag_of: list[int], start_d1: int,
              pair_index: dict | None = None) -> SimChain:
    row_ptr = [0]
    cols: list[int] = []
    cum: list[float] = []
    for row in rows:
        total = sum(p for _, p in row)
        running = 0.0
        for idx, (col, p) in enumerate(row):
            running += p / total
            cols.append(col)
            cum.append(1.0 if idx == len(row) - 1 else running)
        row_ptr.append(len(cols))
    chain = SimChain(
        row_ptr=np.asarray(row_ptr, dtype=np.int64),
        cols=np.asarray(cols, dtype=np.int64),
        cum=np.asarray(cum, dtype=np.float64),
        p_self=np.asarray(p_self, dtype=np.float64),
        is_met=np.asarray(is_met, dtype=np.uint8),
        diag_of=tuple(diag_of),
        start_d1=start_d1,
        pair_index=pair_index,
    )
    for arr in (chain.row_ptr, chain.cols, chain.cum, chain.p_self, chain.is_met):
        arr.setflags(write=False)
    return chain


@lru_cache(maxsize=128)
def sim_chain(g: Graph) -> SimChain:
    """Build the simulation chain for a graph (cached; immutable)."""
    if g.family == COMPLETE:
        n = g.n
        rows = [[(1, 1.0)], [(0, 1.0)]]
        return _assemble(rows, [0.0, (n - 2) / (n - 1)], [True, False], [0] * n, 1)
    if g.family == BIPARTITE:
        m, n = g.m, g.n
        p = 0.5 * (1.0 / m + 1.0 / (n - m))
        rows = [[(1, 1.0)], [(0, p), (2, 1.0 - p)], [(1, 1.0)]]
        return _assemble(rows, [0.0] * 3, [True, False, False], [0] * n, 1)
    if g.family == RING:
        n = g.n
        top = n // 2
        rows = [[(1, 1.0)]]
        p_self = [0.0]
        for d in range(1, top):
            rows.append([(d - 1, 0.5), (d + 1, 0.5)])
            p_self.append(0.0)
        rows.append([(top - 1, 1.0)])
        p_self.append(0.0 if n % 2 == 0 else 0.5)
        met = [True] + [False] * top
        return _assemble(rows, p_self, met, [0] * n, 1)

    # generic: all unordered pairs including the co-located diagonal
    pairs = [(u, v) for u in range(g.n) for v in range(u, g.n)]
    index = {p: i for i, p in enumerate(pairs)}
    rows = [[] for _ in pairs]
    for (u, v), row in index.items():
        dist: dict[int, float] = {}
        movers = ((u, v), (v, u)) if u != v else ((u, v),)
        for mover, other in movers:
            w = 0.5 / g.degree(mover) if u != v else 1.0 / g.degree(mover)
            for tgt in g.neighbors[mover]:
                col = index[(min(tgt, other), max(tgt, other))]
                dist[col] = dist.get(col, 0.0) + w
        rows[row] = sorted(dist.items())
    is_met = [u == v for u, v in pairs]
    diag_of = [index[(v, v)] for v in range(g.n)]
    first_edge = g.edges()[0]
    pair_only = {p: i for p, i in index.items() if p[0] != p[1]}
    return _assemble(rows, [0.0] * len(pairs), is_met, diag_of,
                     index[first_edge], pair_only)


def _eoe_rep(impl, chain: SimChain, lam: float, gamma: float, seed: int, rep: int,
             start: int, max_events: int) -> tuple[float, int, int, int]:
    bg = replication_stream(seed, rep)
    t, jumps, reinf, acc, ev, capped = impl.run_eoe(
        bg, chain.row_ptr, chain.cols, chain.cum, chain.p_self, chain.is_met,
        chain.diag_of[start], 2.0 * lam, gamma, max_events)
    if capped:
        raise RunawaySimulationError(f"replication {rep} exceeded {max_events} events")
    if acc > 0.0:
        jumps += int(np.random.Generator(tail_stream(seed, rep)).poisson(acc))
    return t, jumps, reinf, ev


def _meeting_rep(impl, chain: SimChain, g: Graph, lam: float, seed: int, rep: int,
                 i: int, j: int, max_events: int) -> tuple[float, int, int]:
    bg = replication_stream(seed, rep)
    t, jumps, acc, ev, capped = impl.run_meeting(
        bg, chain.row_ptr, chain.cols, chain.cum, chain.p_self, chain.is_met,
        chain.pair_state(g, i, j), 2.0 * lam, max_events)
    if capped:
        raise RunawaySimulationError(f"replication {rep} exceeded {max_events} events")
    if acc > 0.0:
        jumps += int(np.random.Generator(tail_stream(seed, rep)).poisson(acc))
    return t, jumps, ev


def simulate_eoe(g: Graph, lam: float, gamma: float, seed: int, rep: int = 0,
                 start: int = 0, max_events: int = MAX_EVENTS,
                 kernel: str | None = None) -> EpidemicSample:
    """One seeded replication from the co-located both-infected start."""
    _check_rates(lam, gamma)
    t, jumps, reinf, _ = _eoe_rep(get_impl(kernel), sim_chain(g), lam, gamma,
                                  seed, rep, start, max_events)
    return EpidemicSample(t=t, n_jumps=jumps, n_reinfections=reinf)


def simulate_meeting(g: Graph, lam: float, seed: int, i: int, j: int, rep: int = 0,
                     max_events: int = MAX_EVENTS,
                     kernel: str | None = None) -> MeetingSample:
    """One seeded sample of (M, N) for walkers started at vertices i != j."""
    _check_rates(lam, 1.0)
    if i == j:
        raise ValueError("walkers must start at distinct vertices")
    m, jumps, _ = _meeting_rep(get_impl(kernel), sim_chain(g), g, lam, seed, rep,
                               i, j, max_events)
    return MeetingSample(m=m, n_jumps=jumps)


@dataclass(frozen=True)
class BatchResult:
    """Per-replication arrays plus the mergeable summary."""

    t: np.ndarray
    n_jumps: np.ndarray
    n_reinfections: np.ndarray
    events: int
    summary: SampleSummary


def _check_rates(lam: float, gamma: float) -> None:
    if lam <= 0 or gamma <= 0:
        raise ValueError("rates must be positive")


def _eoe_chunk(args):
    (g, lam, gamma, seed, lo, hi, start, max_events, kernel) = args
    impl = get_impl(kernel)
    chain = sim_chain(g)
    t = np.empty(hi - lo)
    jumps = np.empty(hi - lo, dtype=np.int64)
    reinf = np.empty(hi - lo, dtype=np.int64)
    events = 0
    for rep in range(lo, hi):
        t[rep - lo], jumps[rep - lo], reinf[rep - lo], ev = _eoe_rep(
            impl, chain, lam, gamma, seed, rep, start, max_events)
        events += ev
    return lo, t, jumps, reinf, events


def _meeting_chunk(args):
    (g, lam, seed, lo, hi, i, j, max_events, kernel) = args
    impl = get_impl(kernel)
    chain = sim_chain(g)
    m = np.empty(hi - lo)
    jumps = np.empty(hi - lo, dtype=np.int64)
    events = 0
    for rep in range(lo, hi):
        m[rep - lo], jumps[rep - lo], ev = _meeting_rep(
            impl, chain, g, lam, seed, rep, i, j, max_events)
        events += ev
    return lo, m, jumps, events


def _chunks(reps: int, workers: int) -> list[tuple[int, int]]:
    per = max(1, -(-reps // (workers * 4)))
    return [(lo, min(lo + per, reps)) for lo in range(0, reps, per)]


def _run_chunks(fn, args_of_chunk, reps: int, workers: int):
    pieces = _chunks(reps, workers)
    if workers <= 1 or len(pieces) == 1:
        return [fn(args_of_chunk(lo, hi)) for lo, hi in pieces]
    ctx = mp.get_context("fork")
    with ctx.Pool(processes=workers) as pool:
        return pool.map(fn, [args_of_chunk(lo, hi) for lo, hi in pieces])


def run_batch(g: Graph, lam: float, gamma: float, reps: int, seed: int,
              s_grid: tuple[float, ...] = (), workers: int = 1, start: int = 0,
              max_events: int = MAX_EVENTS, kernel: str | None = None) -> BatchResult:
    """R independent replications with per-index streams; any worker count
    yields identical arrays and summary."""
    _check_rates(lam, gamma)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    t = np.empty(reps)
    jumps = np.empty(reps, dtype=np.int64)
    reinf = np.empty(reps, dtype=np.int64)
    events = 0
    results = _run_chunks(
        _eoe_chunk,
        lambda lo, hi: (g, lam, gamma, seed, lo, hi, start, max_events, kernel),
        reps, workers)
    for lo, tc, jc, rc, ev in results:
        t[lo:lo + len(tc)] = tc
        jumps[lo:lo + len(jc)] = jc
        reinf[lo:lo + len(rc)] = rc
        events += ev
    summary = SampleSummary.from_samples(t, tuple(s_grid))
    return BatchResult(t=t, n_jumps=jumps, n_reinfections=reinf, events=events,
                       summary=summary)


def run_meeting_batch(g: Graph, lam: float, reps: int, seed: int, i: int, j: int,
                      workers: int = 1, max_events: int = MAX_EVENTS,
                      kernel: str | None = None) -> tuple[np.ndarray, np.ndarray, int]:
    """Batched (M, N) samples; returns (m array, jump counts, total events)."""
    _check_rates(lam, 1.0)
    if i == j:
        raise ValueError("walkers must start at distinct vertices")
    m = np.empty(reps)
    jumps = np.empty(reps, dtype=np.int64)
    events = 0
    results = _run_chunks(
        _meeting_chunk,
        lambda lo, hi: (g, lam, seed, lo, hi, i, j, max_events, kernel),
        reps, workers)
    for lo, mc, jc, ev in results:
        m[lo:lo + len(mc)] = mc
        jumps[lo:lo + len(jc)] = jc
        events += ev
    return m, jumps, events
