"""Scaling schedules and limit-law convergence experiments.

A schedule packages, for a graph family: rate sequences lambda_n / gamma_n,
the jump-count normalizer a_n with the limit moments (c1, c2), the time scale
b_n applied to the end-of-epidemic samples, and the target limit law.  The
convergence check simulates at each n, rescales, and measures either a KS
distance (closed-form target CDF) or a sup transform distance (ring target,
where only the transform is available).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy import stats

from .errors import ScheduleRegimeError
from .graphs import Graph, build_bipartite, build_complete, build_ring
from .simulate import run_batch


@dataclass(frozen=True)
class RateSpec:
    """Named rate sequence: const c, power c*n^e, or logpower c*ln(n)^e."""

    kind: str
    coef: float
    exponent: float = 0.0

    def value(self, n: int) -> float:
        if self.kind == "const":
            return self.coef
        if self.kind == "power":
            return self.coef * n ** self.exponent
        if self.kind == "logpower":
            return self.coef * math.log(n) ** self.exponent
        raise ValueError(f"unknown rate kind {self.kind!r}")

    def describe(self) -> str:
        return f"{self.kind}:{self.coef:g}:{self.exponent:g}"

    @classmethod
    def parse(cls, text: str) -> "RateSpec":
        parts = text.split(":")
        if len(parts) == 2:
            parts.append("0")
        if len(parts) != 3:
            raise ValueError(f"rate spec {text!r}; expected kind:coef[:exponent]")
        return cls(kind=parts[0], coef=float(parts[1]), exponent=float(parts[2]))


@dataclass(frozen=True)
class LimitLaw:
    """Target law of the rescaled end-of-epidemic time."""

    name: str
    transform: Callable[[float], float]
    cdf: Callable[[float], float] | None
    mean: float | None
    second_moment: float | None


def _exp1_transform(s: float) -> float:
    return 1.0 / (1.0 + s)


def _hypoexp_transform(s: float) -> float:
    return 2.0 / ((1.0 + s) * (2.0 + s))


def _ring_transform(s: float) -> float:
    a = math.sqrt(1.0 + s)
    b = math.sqrt(2.0 + s)
    return 2.0 * (b - a) / (a * b * (2.0 * a - b))


EXP1 = LimitLaw("exp1", _exp1_transform, lambda t: -math.expm1(-t), 1.0, 2.0)
# X + Y with independent X ~ Exp(1), Y ~ Exp(2)
HYPOEXP_1_2 = LimitLaw(
    "exp1-plus-exp2",
    _hypoexp_transform,
    lambda t: 1.0 - 2.0 * math.exp(-t) + math.exp(-2.0 * t),
    1.5,
    3.5,
)
# slow-meeting (ring) target; no closed-form CDF, comparisons stay in
# transform space
RING_EOE = LimitLaw("ring-eoe", _ring_transform, None, None, None)

_LAWS = {law.name: law for law in (EXP1, HYPOEXP_1_2, RING_EOE)}


def limit_law_transform(law: str | LimitLaw, s: float) -> float:
    if isinstance(law, str):
        if law not in _LAWS:
            raise ValueError(f"unknown limit law {law!r}")
        law = _LAWS[law]
    return law.transform(s)


@dataclass(frozen=True)
class ScalingSchedule:
    """Rates, normalizers and target law for one family/regime."""

    name: str
    family: str  # complete | bipartite | ring
    regime: str  # thm2 | thm3 | complete-ii | complete-iii | ring
    lam: RateSpec
    gamma: RateSpec
    law: LimitLaw
    c1: float | None = None
    c2: float | None = None
    a_kind: str | None = None  # "inv-n" | "inv-m" (thm2 only)
    m_spec: RateSpec | None = None  # bipartite side size m(n)

    def m_of(self, n: int) -> int:
        m = max(1, round(self.m_spec.value(n)))
        if m >= n:
            raise ValueError(f"side size m={m} must stay below n={n}")
        return m

    def graph(self, n: int) -> Graph:
        if self.family == "complete":
            return build_complete(n)
        if self.family == "bipartite":
            return build_bipartite(self.m_of(n), n)
        if self.family == "ring":
            if n % 2 != 0:
                raise ValueError("ring schedules use even n")
            return build_ring(n)
        raise ValueError(f"unknown family {self.family!r}")

    def a_n(self, n: int) -> float:
        if self.a_kind == "inv-n":
            return 1.0 / n
        if self.a_kind == "inv-m":
            return 1.0 / self.m_of(n)
        raise ValueError(f"schedule {self.name} has no jump-count normalizer")

    def b_n(self, n: int) -> float:
        lam = self.lam.value(n)
        gam = self.gamma.value(n)
        if self.regime == "thm2":
            return (self.c2 / (2.0 * self.c1)) * gam * gam / (lam * self.a_n(n))
        if self.regime == "thm3":
            return ((self.c1 + self.c2) / (2.0 * (1.0 + self.c1))) * gam * gam / lam
        if self.regime == "complete-ii":
            return 2.0 * lam
        if self.regime in ("complete-iii", "ring"):
            return gam
        raise ValueError(f"unknown regime {self.regime!r}")

    def _ratios(self) -> list[tuple[str, Callable[[int], float]]]:
        lam, gam = self.lam.value, self.gamma.value
        if self.regime == "thm2":
            return [
                ("1/a_n", lambda n: 1.0 / self.a_n(n)),
                ("lam_n*a_n/gamma_n", lambda n: lam(n) * self.a_n(n) / gam(n)),
            ]
        if self.regime == "thm3":
            return [("lam_n/gamma_n", lambda n: lam(n) / gam(n))]
        if self.regime == "complete-ii":
            return [("gamma_n/lam_n", lambda n: gam(n) / lam(n))]
        if self.regime == "complete-iii":
            return [
                ("lam_n/gamma_n", lambda n: lam(n) / gam(n)),
                ("n*gamma_n/lam_n", lambda n: n * gam(n) / lam(n)),
            ]
        if self.regime == "ring":
            return [("lam_n/gamma_n", lambda n: lam(n) / gam(n))]
        raise ValueError(f"unknown regime {self.regime!r}")

    def check_regime(self, n_grid: tuple[int, ...]) -> None:
        """Numeric regime validation: each divergent ratio must reach a
        factor-10 margin at the largest n and grow along the grid."""
        if not n_grid:
            raise ScheduleRegimeError("empty n-grid")
        lo, hi = min(n_grid), max(n_grid)
        for label, fn in self._ratios():
            if fn(hi) < 10.0:
                raise ScheduleRegimeError(
                    f"schedule {self.name}: ratio {label} is {fn(hi):.3g} at n={hi}; "
                    "needs >= 10"
                )
            if len(set(n_grid)) > 1 and fn(hi) < fn(lo) * (1.0 - 1e-9):
                raise ScheduleRegimeError(
                    f"schedule {self.name}: ratio {label} shrinks along the grid"
                )


def _bip_moments(m_spec: RateSpec) -> tuple[float, float, str, str]:
    """(c1, c2, regime, a_kind) for a bipartite side-size sequence."""
    if m_spec.kind == "const":
        m = int(m_spec.coef)
        return 4 * m - 1, 16 * m * (2 * m - 1) + 1, "thm3", None
    if m_spec.kind == "power" and m_spec.exponent == 1.0:
        alpha = m_spec.coef
        return 4 * alpha * (1 - alpha), 32 * alpha ** 2 * (1 - alpha) ** 2, "thm2", "inv-n"
    # growing sublinear side: m -> inf, m = o(n)
    return 4.0, 32.0, "thm2", "inv-m"


def make_schedule(name: str, lam: RateSpec | None = None, gamma: RateSpec | None = None,
                  param: float | None = None) -> ScalingSchedule:
    """Build a catalog schedule, optionally overriding rates or the family
    parameter (alpha for linear bipartite sides, beta for power/log growth,
    m for fixed sides)."""
    if name == "complete-regime-i":
        return ScalingSchedule(
            name=name, family="complete", regime="thm2",
            lam=lam or RateSpec("power", 1, 1.5), gamma=gamma or RateSpec("const", 1),
            law=EXP1, c1=1.0, c2=2.0, a_kind="inv-n")
    if name == "complete-regime-ii":
        return ScalingSchedule(
            name=name, family="complete", regime="complete-ii",
            lam=lam or RateSpec("power", 1, 0.25), gamma=gamma or RateSpec("power", 1, 1.0),
            law=EXP1)
    if name == "complete-regime-iii":
        return ScalingSchedule(
            name=name, family="complete", regime="complete-iii",
            lam=lam or RateSpec("power", 1, 0.5), gamma=gamma or RateSpec("const", 1),
            law=HYPOEXP_1_2)
    if name == "bipartite-linear":
        m_spec = RateSpec("power", param if param is not None else 0.3, 1.0)
        c1, c2, regime, a_kind = _bip_moments(m_spec)
        return ScalingSchedule(
            name=name, family="bipartite", regime=regime,
            lam=lam or RateSpec("power", 1, 1.5), gamma=gamma or RateSpec("const", 1),
            law=EXP1, c1=c1, c2=c2, a_kind=a_kind, m_spec=m_spec)
    if name == "bipartite-power":
        m_spec = RateSpec("power", 1, param if param is not None else 0.5)
        c1, c2, regime, a_kind = _bip_moments(m_spec)
        return ScalingSchedule(
            name=name, family="bipartite", regime=regime,
            lam=lam or RateSpec("power", 1, 1.0), gamma=gamma or RateSpec("const", 1),
            law=EXP1, c1=c1, c2=c2, a_kind=a_kind, m_spec=m_spec)
    if name == "bipartite-log":
        m_spec = RateSpec("logpower", 1, param if param is not None else 2.0)
        c1, c2, regime, a_kind = _bip_moments(m_spec)
        return ScalingSchedule(
            name=name, family="bipartite", regime=regime,
            lam=lam or RateSpec("power", 1, 1.0), gamma=gamma or RateSpec("const", 1),
            law=EXP1, c1=c1, c2=c2, a_kind=a_kind, m_spec=m_spec)
    if name in ("bipartite-fixed", "star"):
        m = int(param) if param is not None else (1 if name == "star" else 2)
        m_spec = RateSpec("const", m)
        c1, c2, regime, a_kind = _bip_moments(m_spec)
        return ScalingSchedule(
            name=name, family="bipartite", regime=regime,
            lam=lam or RateSpec("power", 1, 1.0), gamma=gamma or RateSpec("const", 1),
            law=EXP1, c1=c1, c2=c2, a_kind=a_kind, m_spec=m_spec)
    if name == "ring":
        return ScalingSchedule(
            name=name, family="ring", regime="ring",
            lam=lam or RateSpec("const", 1e4), gamma=gamma or RateSpec("const", 1),
            law=RING_EOE)
    raise ValueError(f"unknown schedule {name!r}")


SCHEDULE_NAMES = (
    "complete-regime-i", "complete-regime-ii", "complete-regime-iii",
    "bipartite-linear", "bipartite-power", "bipartite-log", "bipartite-fixed",
    "star", "ring",
)


def builtin_schedules() -> dict[str, ScalingSchedule]:
    """Catalog of the per-family regimes with their stated scales and laws."""
    return {name: make_schedule(name) for name in SCHEDULE_NAMES}


def theorem3_coefficient(m: int) -> float:
    """(c1 + c2) / (2 (1 + c1)) for a fixed side of size m; equals (8m - 3)/2."""
    c1 = 4 * m - 1
    c2 = 16 * m * (2 * m - 1) + 1
    return (c1 + c2) / (2 * (1 + c1))


def _batch_seed(seed: int, n: int) -> int:
    # distinct stream families per grid point
    return seed * 1_000_003 + n


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    b_n: float
    distance: float
    metric: str  # "ks" | "transform-sup"
    mean: float
    median: float
    se_mean: float

    def to_dict(self) -> dict:
        return self.__dict__ | {}


@dataclass(frozen=True)
class ConvergenceReport:
    schedule: str
    law: str
    reps: int
    rows: tuple[ConvergenceRow, ...]
    nonincreasing: bool

    def to_dict(self) -> dict:
        return {
            "schedule": self.schedule,
            "law": self.law,
            "reps": self.reps,
            "rows": [r.to_dict() for r in self.rows],
            "nonincreasing": self.nonincreasing,
        }


def convergence_check(schedule: ScalingSchedule, n_grid: tuple[int, ...], reps: int,
                      seed: int, workers: int = 1,
                      s_grid: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0),
                      ) -> ConvergenceReport:
    """Simulate along the n-grid, rescale by b_n, and measure distance to the
    schedule's limit law (KS where the CDF is closed-form, sup transform
    distance otherwise)."""
    schedule.check_regime(tuple(n_grid))
    rows = []
    for n in n_grid:
        g = schedule.graph(n)
        lam, gam = schedule.lam.value(n), schedule.gamma.value(n)
        batch = run_batch(g, lam, gam, reps, _batch_seed(seed, n), workers=workers)
        scaled = schedule.b_n(n) * batch.t
        if schedule.law.cdf is not None:
            dist = float(stats.kstest(scaled, np.vectorize(schedule.law.cdf)).statistic)
            metric = "ks"
        else:
            dist = max(
                abs(float(np.mean(np.exp(-s * scaled))) - schedule.law.transform(s))
                for s in s_grid
            )
            metric = "transform-sup"
        rows.append(ConvergenceRow(
            n=n, b_n=schedule.b_n(n), distance=dist, metric=metric,
            mean=float(np.mean(scaled)), median=float(np.median(scaled)),
            se_mean=float(np.std(scaled, ddof=1) / math.sqrt(reps))))
    slack = 1.36 / math.sqrt(reps)
    nonincreasing = all(
        rows[i + 1].distance <= rows[i].distance + slack for i in range(len(rows) - 1)
    )
    return ConvergenceReport(
        schedule=schedule.name, law=schedule.law.name, reps=reps,
        rows=tuple(rows), nonincreasing=nonincreasing)


@dataclass(frozen=True)
class ProbeRow:
    n: int
    b_n: float
    mean: float
    median: float
    se_mean: float

    def to_dict(self) -> dict:
        return self.__dict__ | {}


@dataclass(frozen=True)
class ProbeReport:
    schedule: str
    reps: int
    rows: tuple[ProbeRow, ...]
    median_trend: str  # increasing | decreasing | mixed

    def to_dict(self) -> dict:
        return {
            "schedule": self.schedule,
            "reps": self.reps,
            "rows": [r.to_dict() for r in self.rows],
            "median_trend": self.median_trend,
        }


def divergence_probe(schedule: ScalingSchedule, n_grid: tuple[int, ...], reps: int,
                     seed: int, workers: int = 1) -> ProbeReport:
    """Track raw (unscaled) means/medians of T_n along the grid to exhibit
    divergence (b_n -> 0 schedules) or collapse (b_n -> inf and the fast
    regimes)."""
    rows = []
    for n in n_grid:
        g = schedule.graph(n)
        lam, gam = schedule.lam.value(n), schedule.gamma.value(n)
        batch = run_batch(g, lam, gam, reps, _batch_seed(seed, n), workers=workers)
        rows.append(ProbeRow(
            n=n, b_n=schedule.b_n(n), mean=float(np.mean(batch.t)),
            median=float(np.median(batch.t)),
            se_mean=float(np.std(batch.t, ddof=1) / math.sqrt(reps))))
    meds = [r.median for r in rows]
    if all(b > a for a, b in zip(meds, meds[1:])):
        trend = "increasing"
    elif all(b < a for a, b in zip(meds, meds[1:])):
        trend = "decreasing"
    else:
        trend = "mixed"
    return ProbeReport(schedule=schedule.name, reps=reps, rows=tuple(rows),
                       median_trend=trend)
