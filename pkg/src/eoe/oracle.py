"""Independent ground truth on small graphs by dense linear algebra.

Everything here works on explicit state spaces (joint walker positions and
health states), deliberately sharing no code with the reduced-chain transform
and simulation paths it validates.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import StateSpaceTooLargeError
from .graphs import Graph, MeetingChain
from .transforms import RingAux

MAX_STATES = 4000

_I = 1
_S = 0


class JointEoeSystem:
    """Full CTMC on (positions, healths) with instant infection redirected.

    Transitions that land on a co-located mixed-health state are redirected to
    the co-located (I, I) state at generator-build time (possibly onto the
    source state itself), so every row's total exit rate is
    2*lam + gamma * (#infected).  Absorbing set: both susceptible, any
    positions.
    """

    def __init__(self, g: Graph, lam: float, gamma: float):
        if lam <= 0 or gamma <= 0:
            raise ValueError("lam and gamma must be positive")
        states = []
        for w1 in range(g.n):
            for w2 in range(g.n):
                for h1, h2 in ((_I, _I), (_I, _S), (_S, _I)):
                    if w1 == w2 and h1 != h2:
                        continue
                    states.append((w1, w2, h1, h2))
        if len(states) > MAX_STATES:
            raise StateSpaceTooLargeError(
                f"{len(states)} joint states exceed the cap of {MAX_STATES}"
            )
        index = {st: i for i, st in enumerate(states)}
        size = len(states)
        a = np.zeros((size, size))
        b = np.zeros(size)

        def redirect(w1, w2, h1, h2):
            if w1 == w2 and h1 != h2:
                return (w1, w2, _I, _I)
            return (w1, w2, h1, h2)

        for st, row in index.items():
            w1, w2, h1, h2 = st
            exit_rate = 0.0

            def put(target, rate):
                nonlocal exit_rate
                exit_rate += rate
                t1, t2, g1, g2 = target
                if g1 == _S and g2 == _S:
                    b[row] += rate
                else:
                    a[row, index[target]] -= rate

            for u in g.neighbors[w1]:
                put(redirect(u, w2, h1, h2), lam / g.degree(w1))
            for u in g.neighbors[w2]:
                put(redirect(w1, u, h1, h2), lam / g.degree(w2))
            if h1 == _I:
                put(redirect(w1, w2, _S, h2), gamma)
            if h2 == _I:
                put(redirect(w1, w2, h1, _S), gamma)
            a[row, row] += exit_rate
            expected = 2.0 * lam + gamma * (h1 + h2)
            assert abs(exit_rate - expected) < 1e-9 * expected
        self.graph = g
        self._a = a
        self._b = b
        self._index = index

    def transform(self, s: float, start: int = 0) -> float:
        """First-passage transform E(exp(-s T)) from co-located (I, I) at ``start``."""
        size = self._a.shape[0]
        phi = np.linalg.solve(self._a + s * np.eye(size), self._b)
        return float(phi[self._index[(start, start, _I, _I)]])


@lru_cache(maxsize=64)
def _joint_system(g: Graph, lam: float, gamma: float) -> JointEoeSystem:
    return JointEoeSystem(g, lam, gamma)


def exact_laplace_T_joint(g: Graph, lam: float, gamma: float, s: float, start: int = 0) -> float:
    """Exact L_T by dense solve on the joint chain (small graphs only)."""
    return _joint_system(g, lam, gamma).transform(s, start)


class PairMeetingSystem:
    """CTMC of ordered walker pairs, diagonal absorbing (meeting-time transforms)."""

    def __init__(self, g: Graph, lam: float):
        if lam <= 0:
            raise ValueError("lam must be positive")
        states = [(i, j) for i in range(g.n) for j in range(g.n) if i != j]
        if len(states) > MAX_STATES:
            raise StateSpaceTooLargeError(
                f"{len(states)} pair states exceed the cap of {MAX_STATES}"
            )
        index = {st: i for i, st in enumerate(states)}
        size = len(states)
        a = np.zeros((size, size))
        b = np.zeros(size)
        for (i, j), row in index.items():
            for u in g.neighbors[i]:
                rate = lam / g.degree(i)
                if u == j:
                    b[row] += rate
                else:
                    a[row, index[(u, j)]] -= rate
            for u in g.neighbors[j]:
                rate = lam / g.degree(j)
                if u == i:
                    b[row] += rate
                else:
                    a[row, index[(i, u)]] -= rate
            a[row, row] = 2.0 * lam
        self._a = a
        self._b = b
        self._index = index

    def transform(self, s: float, i: int, j: int) -> float:
        size = self._a.shape[0]
        phi = np.linalg.solve(self._a + s * np.eye(size), self._b)
        return float(phi[self._index[(i, j)]])


@lru_cache(maxsize=64)
def _pair_system(g: Graph, lam: float) -> PairMeetingSystem:
    return PairMeetingSystem(g, lam)


def exact_laplace_M_pair(g: Graph, lam: float, s: float, i: int, j: int) -> float:
    """Exact transform of the meeting time from positions (i, j), i != j."""
    if i == j:
        raise ValueError("walkers already met")
    return _pair_system(g, lam).transform(s, i, j)


def exact_pmf_N(chain: MeetingChain, k_max: int) -> tuple[np.ndarray, float]:
    """P(N = k) for k = 0..k_max by kernel powering, plus remaining tail mass."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    dist = np.zeros(chain.n_states)
    dist[chain.start] = 1.0
    pmf = np.zeros(k_max + 1)
    absorbed = dist[chain.met]
    for k in range(1, k_max + 1):
        dist = dist @ chain.kernel
        pmf[k] = dist[chain.met] - absorbed
        absorbed = dist[chain.met]
    return pmf, float(1.0 - absorbed)


def mean_N(chain: MeetingChain, tol: float = 1e-12, k_cap: int = 10_000_000) -> float:
    """Mean of N by powering exact_pmf_N blocks until the tail is negligible."""
    dist = np.zeros(chain.n_states)
    dist[chain.start] = 1.0
    total = 0.0
    absorbed = dist[chain.met]
    k = 0
    while 1.0 - absorbed > tol and k < k_cap:
        k += 1
        dist = dist @ chain.kernel
        new = dist[chain.met]
        total += k * (new - absorbed)
        absorbed = new
    return total + k * (1.0 - absorbed)


def ring_recursion_solve(n: int, s: float) -> float:
    """Ring transform of N by the backward continued-fraction recursion.

    Starts from the antipodal coefficient 2*alpha and folds down to the
    distance-one coefficient, which equals the transform.  Even n >= 4.
    """
    if n < 4 or n % 2 != 0:
        raise ValueError("recursion path needs even n >= 4")
    alpha = 0.5 * math.exp(-s)
    c = 2.0 * alpha
    for _ in range(n // 2 - 1):
        c = alpha / (1.0 - alpha * c)
    return c


def ring_q_poly(j: int, s: float) -> float:
    """Q_j by its second-order recurrence (Q_j = Q_{j-1} - alpha^2 Q_{j-2})."""
    if j < 0:
        raise ValueError("j must be >= 0")
    alpha = 0.5 * math.exp(-s)
    a2 = alpha * alpha
    q_prev, q = 1.0, 1.0 - 2.0 * a2
    if j == 0:
        return q_prev
    for _ in range(j - 1):
        q_prev, q = q, q - a2 * q_prev
    return q


def ring_q_root_form(j: int, s: float) -> float:
    """Q_j from the characteristic roots: x1^(j+1) + x2^(j+1)."""
    aux = RingAux.from_s(s)
    return aux.x1 ** (j + 1) + aux.x2 ** (j + 1)


def ring_recursion_solve_q(n: int, s: float) -> float:
    """Alternate ring path: alpha * Q_{n/2-2} / Q_{n/2-1}."""
    if n < 4 or n % 2 != 0:
        raise ValueError("recursion path needs even n >= 4")
    alpha = 0.5 * math.exp(-s)
    return alpha * ring_q_poly(n // 2 - 2, s) / ring_q_poly(n // 2 - 1, s)
