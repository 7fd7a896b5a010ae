"""Order-independent batch statistics.

Sums are held as Shewchuk partials (exact nonoverlapping float expansions), so
merging shard summaries is associative and commutative and reproduces the
single-shot summary bit for bit.  The quantile sketch is a fixed geometric
histogram (64 buckets per octave), also exactly mergeable.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

_SUBDIV = 64  # sketch buckets per factor of 2; relative error <= 2**(1/128)-1


def _acc_add(partials: list[float], x: float) -> None:
    """Add x to an exact float expansion (Shewchuk/msum step)."""
    i = 0
    for y in partials:
        if abs(x) < abs(y):
            x, y = y, x
        hi = x + y
        lo = y - (hi - x)
        if lo:
            partials[i] = lo
            i += 1
        x = hi
    del partials[i:]
    partials.append(x)


def _acc_merge(into: list[float], other: list[float]) -> None:
    for x in other:
        _acc_add(into, x)


def _acc_total(partials: list[float]) -> float:
    return math.fsum(partials)


def _bucket(t: float) -> int:
    return math.floor(_SUBDIV * math.log2(t))


@dataclass
class SampleSummary:
    """Aggregated statistics of end-of-epidemic samples.

    Carries count, exact moment sums, a quantile sketch, and the empirical
    transform (1/R) * sum exp(-s * T) with a standard error per grid point.
    """

    count: int = 0
    s_grid: tuple[float, ...] = ()
    _sum_t: list[float] = field(default_factory=list)
    _sum_t2: list[float] = field(default_factory=list)
    _sum_e: list[list[float]] = field(default_factory=list)
    _sum_e2: list[list[float]] = field(default_factory=list)
    _sketch: Counter = field(default_factory=Counter)

    def __post_init__(self):
        if not self._sum_e:
            self._sum_e = [[] for _ in self.s_grid]
            self._sum_e2 = [[] for _ in self.s_grid]

    @classmethod
    def from_samples(cls, ts: np.ndarray, s_grid: tuple[float, ...] = ()) -> "SampleSummary":
        out = cls(count=len(ts), s_grid=tuple(s_grid))
        exps = [np.exp(-s * ts) for s in out.s_grid]
        for i, t in enumerate(ts):
            t = float(t)
            _acc_add(out._sum_t, t)
            _acc_add(out._sum_t2, t * t)
            out._sketch[_bucket(t)] += 1
            for j in range(len(out.s_grid)):
                e = float(exps[j][i])
                _acc_add(out._sum_e[j], e)
                _acc_add(out._sum_e2[j], e * e)
        return out

    @property
    def mean(self) -> float:
        return _acc_total(self._sum_t) / self.count

    @property
    def variance(self) -> float:
        if self.count < 2:
            return 0.0
        s1 = _acc_total(self._sum_t)
        s2 = _acc_total(self._sum_t2)
        return max(0.0, (s2 - s1 * s1 / self.count) / (self.count - 1))

    def transform(self, s: float) -> tuple[float, float]:
        """Empirical transform value and its standard error at a grid point."""
        j = self.s_grid.index(s)
        n = self.count
        s1 = _acc_total(self._sum_e[j])
        s2 = _acc_total(self._sum_e2[j])
        val = s1 / n
        var = max(0.0, (s2 - s1 * s1 / n) / (n - 1)) if n > 1 else 0.0
        return val, math.sqrt(var / n)

    def quantile(self, q: float) -> float:
        """Sketch quantile (geometric-bucket midpoint; <= ~0.6% relative error)."""
        if not 0 < q <= 1:
            raise ValueError("q must be in (0, 1]")
        rank = max(1, math.ceil(q * self.count))
        seen = 0
        for k in sorted(self._sketch):
            seen += self._sketch[k]
            if seen >= rank:
                return 2.0 ** ((k + 0.5) / _SUBDIV)
        raise RuntimeError("sketch is empty")

    def merge(self, other: "SampleSummary") -> "SampleSummary":
        if self.s_grid != other.s_grid:
            raise ValueError("cannot merge summaries with different s-grids")
        out = SampleSummary(count=self.count + other.count, s_grid=self.s_grid)
        out._sum_t = list(self._sum_t)
        _acc_merge(out._sum_t, other._sum_t)
        out._sum_t2 = list(self._sum_t2)
        _acc_merge(out._sum_t2, other._sum_t2)
        out._sum_e = [list(a) for a in self._sum_e]
        out._sum_e2 = [list(a) for a in self._sum_e2]
        for j in range(len(self.s_grid)):
            _acc_merge(out._sum_e[j], other._sum_e[j])
            _acc_merge(out._sum_e2[j], other._sum_e2[j])
        out._sketch = self._sketch + other._sketch
        return out

    def to_dict(self) -> dict:
        d = {
            "count": self.count,
            "mean": self.mean,
            "variance": self.variance,
            "quantiles": {str(q): self.quantile(q) for q in (0.1, 0.25, 0.5, 0.75, 0.9)},
            "transform": [
                {"s": s, "value": self.transform(s)[0], "se": self.transform(s)[1]}
                for s in self.s_grid
            ],
        }
        return d
