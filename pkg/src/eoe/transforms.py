"""Laplace transforms of the meeting jump count N, the meeting time M and the
end-of-epidemic time T, plus numerical moment extraction.

All transforms are real functions of s >= 0 with values in (0, 1]; most also
extend to a small interval of negative s, which the moment routines exploit.
Rates are in events per unit time: lam is the per-walker jump rate, gamma the
per-agent recovery rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    MomentDivergenceError,
    NoAbsorptionError,
    NumericDegeneracyError,
    UnsupportedClosedFormError,
)
from .graphs import BIPARTITE, COMPLETE, GENERIC, RING, Graph, MeetingChain, meeting_chain

CLOSED_FORM = "closed-form"
LINEAR_SOLVE = "linear-solve"
EMPIRICAL = "empirical"


@dataclass(frozen=True)
class TransformEvaluator:
    """A Laplace transform as a first-class value with provenance metadata."""

    subject: str  # "N" | "M" | "T"
    fn: Callable[[float], float]
    graph: str
    provenance: str
    lam: float | None = None
    gamma: float | None = None

    def __call__(self, s: float) -> float:
        return self.fn(s)


@dataclass(frozen=True)
class RingAux:
    """Characteristic-root bookkeeping for the ring recursion.

    alpha = exp(-s)/2; x1, x2 are the roots of x^2 - x + alpha^2 = 0.
    Built cancellation-safely: 1 - 4*alpha^2 = -expm1(-2s).
    """

    alpha: float
    x1: float
    x2: float
    log_ratio: float  # log(x2/x1), -inf-safe for s > 0

    @classmethod
    def from_s(cls, s: float) -> "RingAux":
        if s < 0:
            raise ValueError("ring auxiliary roots need s >= 0")
        delta = math.sqrt(-math.expm1(-2.0 * s))
        log_ratio = math.log1p(-delta) - math.log1p(delta) if delta < 1.0 else -math.inf
        return cls(
            alpha=0.5 * math.exp(-s),
            x1=0.5 * (1.0 + delta),
            x2=0.5 * (1.0 - delta),
            log_ratio=log_ratio,
        )

    def ratio_pow(self, k: int) -> float:
        # (x2/x1)**k in log space; underflow rounds to 0 (the n -> inf limit)
        if self.log_ratio == -math.inf:
            return 0.0 if k > 0 else 1.0
        return math.exp(k * self.log_ratio)


def laplace_N_complete(n: int, s: float) -> float:
    """Complete-graph transform of N in its Geom(1/n) printed form."""
    if n < 2:
        raise ValueError("complete graph needs n >= 2")
    e = math.exp(-s)
    return e / (n - (n - 1) * e)


def laplace_N_complete_exact(n: int, s: float) -> float:
    """Complete-graph transform of N from the embedded pair chain, Geom(1/(n-1)).

    The printed Geom(1/n) form and this one differ at finite n (the jumping
    walker picks among n-1 vertices); they coincide asymptotically.  This is
    the default everywhere a transform feeds further computation.
    """
    if n < 2:
        raise ValueError("complete graph needs n >= 2")
    e = math.exp(-s)
    return e / ((n - 1) - (n - 2) * e)


def laplace_N_bipartite(m: int, n: int, s: float) -> float:
    """Complete-bipartite transform of N (closed form of the two-class recursion)."""
    if not 1 <= m < n:
        raise ValueError("bipartite needs 1 <= m < n")
    c = 0.5 * n / (m * (n - m))
    e = math.exp(-s)
    e2 = e * e
    return c * e / (1.0 - e2 + c * e2)


def laplace_N_ring(n: int, s: float) -> float:
    """Even-ring transform of N via the characteristic roots (cancellation-safe)."""
    if n < 4 or n % 2 != 0:
        raise UnsupportedClosedFormError(f"ring closed form needs even n >= 4, got {n}")
    aux = RingAux.from_s(s)
    half = n // 2
    num = 1.0 + aux.ratio_pow(half - 1)
    den = 1.0 + aux.ratio_pow(half)
    return (aux.alpha / aux.x1) * num / den


def laplace_N_ring_limit(s: float) -> float:
    """n -> inf limit of the ring transform of N; its mean is infinite."""
    e = math.exp(-s)
    return e / (1.0 + math.sqrt(-math.expm1(-2.0 * s)))


def laplace_N_generic(chain: MeetingChain, s: float) -> float:
    """Exact transform of N for any absorbing meeting chain via a linear solve.

    Solves phi(met) = 1, phi(x) = exp(-s) * sum_y P(x, y) phi(y) and returns
    phi at the chain's start state.
    """
    k = chain.kernel
    size = chain.n_states
    transient = [i for i in range(size) if i != chain.met]
    e = math.exp(-s)
    sub = k[np.ix_(transient, transient)]
    a = np.eye(len(transient)) - e * sub
    b = e * k[transient, chain.met]
    try:
        phi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise NoAbsorptionError("transform system is singular; absorption not a.s.") from exc
    return float(phi[transient.index(chain.start)])


def laplace_M_from_N(LN: Callable[[float], float], lam: float, s: float) -> float:
    """M = sum of N independent Exp(2*lam) step times: change of variables on L_N."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    return LN(math.log1p(s / (2.0 * lam)))


def laplace_T(LM: Callable[[float], float], lam: float, gamma: float, s: float) -> float:
    """End-of-epidemic transform from the meeting-time transform.

    The numerator/denominator are each accumulated with fsum: both shrink to
    O((gamma/lam)^2) in fast-walk regimes, so plain left-to-right summation
    loses digits exactly where the scaling experiments operate.  At s = 0 both
    sides of the ratio coincide and the value is 1 by continuity.
    """
    if lam <= 0 or gamma <= 0:
        raise ValueError("lam and gamma must be positive")
    if s == 0:
        return 1.0
    u = LM(s + gamma)
    v = LM(s + 2.0 * gamma)
    num = 2.0 * gamma * math.fsum([(1.0 - u) / (s + gamma), -(1.0 - v) / (s + 2.0 * gamma)])
    den = math.fsum([1.0, s / (2.0 * lam), -2.0 * u, v])
    if den <= 0.0:
        raise NumericDegeneracyError(f"non-positive denominator {den} at s={s}")
    return num / den


def laplace_T_from_N(
    LN: Callable[[float], float], lam: float, gamma: float, s: float
) -> float:
    """End-of-epidemic transform straight from L_N (single change of variables)."""
    if lam <= 0 or gamma <= 0:
        raise ValueError("lam and gamma must be positive")
    if s == 0:
        return 1.0
    u = LN(math.log1p((s + gamma) / (2.0 * lam)))
    v = LN(math.log1p((s + 2.0 * gamma) / (2.0 * lam)))
    num = 2.0 * gamma * math.fsum([(1.0 - u) / (s + gamma), -(1.0 - v) / (s + 2.0 * gamma)])
    den = math.fsum([1.0, s / (2.0 * lam), -2.0 * u, v])
    if den <= 0.0:
        raise NumericDegeneracyError(f"non-positive denominator {den} at s={s}")
    return num / den


def moments_from_transform(ev: Callable[[float], float], k: int, h: float | None = None) -> float:
    """First or second moment via Richardson-extrapolated central differences.

    Step sizes h, h/2, h/4 around 0 with h = 1e-4 * scale, where scale is set
    from a crude mean probe so that h * E(X) stays small.  Raises
    MomentDivergenceError when successive extrapolations disagree or the
    transform is not evaluable left of zero (infinite-moment suspects).
    """
    if k not in (1, 2):
        raise ValueError("only moments k in {1, 2} are supported")
    if h is None:
        probe = 1e-3
        rough = max(1.0, (1.0 - ev(probe)) / probe)
        h = 1e-4 / rough

    def first(step: float) -> float:
        return (ev(step) - ev(-step)) / (2.0 * step)

    def second(step: float) -> float:
        return (ev(step) - 2.0 * f0 + ev(-step)) / (step * step)

    try:
        if k == 1:
            d1, d2, d4 = first(h), first(h / 2), first(h / 4)
        else:
            f0 = ev(0.0)
            d1, d2, d4 = second(h), second(h / 2), second(h / 4)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise MomentDivergenceError(
            "transform not evaluable around 0; moment may be infinite"
        ) from exc
    r1 = (4.0 * d2 - d1) / 3.0
    r2 = (4.0 * d4 - d2) / 3.0
    if not abs(r2 - r1) <= 1e-4 * max(abs(r2), 1.0):
        raise MomentDivergenceError(
            f"extrapolations disagree ({r1} vs {r2}); moment divergence suspected"
        )
    return -r2 if k == 1 else r2


# evaluator factories ------------------------------------------------------

def n_evaluator(g: Graph, variant: str = "exact") -> TransformEvaluator:
    """Transform evaluator for N on a graph.

    variant "exact" uses the embedded-chain law (default); "paper" selects the
    printed Geom(1/n) complete-graph form (the variants differ only there).
    """
    if variant not in ("exact", "paper"):
        raise ValueError(f"unknown variant {variant!r}")
    desc = g.spec_string()
    if g.family == COMPLETE:
        fn = laplace_N_complete if variant == "paper" else laplace_N_complete_exact
        return TransformEvaluator("N", lambda s, n=g.n, f=fn: f(n, s), desc, CLOSED_FORM)
    if g.family == BIPARTITE:
        return TransformEvaluator(
            "N", lambda s, m=g.m, n=g.n: laplace_N_bipartite(m, n, s), desc, CLOSED_FORM
        )
    if g.family == RING and g.n % 2 == 0:
        return TransformEvaluator("N", lambda s, n=g.n: laplace_N_ring(n, s), desc, CLOSED_FORM)
    chain = meeting_chain(g)
    return TransformEvaluator(
        "N", lambda s, c=chain: laplace_N_generic(c, s), desc, LINEAR_SOLVE
    )


def n_evaluator_from_chain(chain: MeetingChain, descriptor: str = "chain") -> TransformEvaluator:
    return TransformEvaluator(
        "N", lambda s, c=chain: laplace_N_generic(c, s), descriptor, LINEAR_SOLVE
    )


def m_evaluator(LN: TransformEvaluator, lam: float) -> TransformEvaluator:
    return TransformEvaluator(
        "M", lambda s, f=LN.fn, l=lam: laplace_M_from_N(f, l, s), LN.graph, LN.provenance, lam=lam
    )


def t_evaluator(LN: TransformEvaluator, lam: float, gamma: float) -> TransformEvaluator:
    return TransformEvaluator(
        "T",
        lambda s, f=LN.fn, l=lam, gm=gamma: laplace_T_from_N(f, l, gm, s),
        LN.graph,
        LN.provenance,
        lam=lam,
        gamma=gamma,
    )


def evaluator_for(
    g: Graph, subject: str, lam: float | None = None, gamma: float | None = None,
    variant: str = "exact",
) -> TransformEvaluator:
    """One-stop factory used by the CLI: subject in {"N", "M", "T"}."""
    ln = n_evaluator(g, variant=variant)
    if subject == "N":
        return ln
    if subject == "M":
        if lam is None:
            raise ValueError("M transform needs lam")
        return m_evaluator(ln, lam)
    if subject == "T":
        if lam is None or gamma is None:
            raise ValueError("T transform needs lam and gamma")
        return t_evaluator(ln, lam, gamma)
    raise ValueError(f"unknown subject {subject!r}")


def empirical_evaluator(
    samples: np.ndarray, subject: str, descriptor: str,
    lam: float | None = None, gamma: float | None = None,
) -> TransformEvaluator:
    arr = np.asarray(samples, dtype=float)
    return TransformEvaluator(
        subject,
        lambda s: float(np.mean(np.exp(-s * arr))),
        descriptor,
        EMPIRICAL,
        lam=lam,
        gamma=gamma,
    )
