"""Oracle verification suite behind the CLI `verify` subcommand.

Each check returns (name, passed, detail); the suite is pure computation
(no simulation) and runs in seconds even in full mode.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from . import oracle, transforms
from .graphs import (
    Graph,
    build_bipartite,
    build_complete,
    build_generic,
    build_ring,
    meeting_chain,
)


def _family_instances(n_max: int) -> list[Graph]:
    graphs: list[Graph] = []
    graphs += [build_complete(n) for n in range(2, n_max + 1)]
    graphs += [build_bipartite(1, n) for n in range(2, n_max + 1)]
    graphs += [build_bipartite(2, n) for n in range(3, n_max + 1)]
    graphs += [build_ring(n) for n in range(4, n_max + 1, 2)]
    return graphs


def _as_generic(g: Graph) -> Graph:
    return build_generic(g.n, g.edges(), edge_transitive=True)


def check_theorem1(quick: bool) -> tuple[bool, str]:
    """End-of-epidemic transform from the meeting chain vs the joint oracle."""
    n_max = 6 if quick else 10
    rates = [(1.0, 1.0), (0.5, 2.0)] if quick else list(product((0.5, 1.0, 2.0), repeat=2))
    s_grid = (0.1, 1.0, 5.0) if quick else (0.1, 0.5, 1.0, 2.0, 5.0)
    worst = 0.0
    for g in _family_instances(n_max):
        ln = transforms.laplace_N_generic
        chain = meeting_chain(g)
        for lam, gam in rates:
            lm = lambda s, c=chain, l=lam: transforms.laplace_M_from_N(
                lambda u, cc=c: ln(cc, u), l, s)
            for s in s_grid:
                via_theorem = transforms.laplace_T(lm, lam, gam, s)
                via_joint = oracle.exact_laplace_T_joint(g, lam, gam, s)
                worst = max(worst, abs(via_theorem - via_joint))
    return worst <= 1e-9, f"max |theorem - joint oracle| = {worst:.3e} (tol 1e-9)"


def check_composition(quick: bool) -> tuple[bool, str]:
    """Single change-of-variables path vs the two-step meeting-time path."""
    n_max = 6 if quick else 10
    rates = [(1.0, 1.0), (2.0, 0.5)] if quick else list(product((0.5, 1.0, 2.0), repeat=2))
    s_grid = (0.1, 1.0, 5.0) if quick else (0.1, 0.5, 1.0, 2.0, 5.0)
    worst = 0.0
    for g in _family_instances(n_max):
        chain = meeting_chain(g)
        ln = lambda u, c=chain: transforms.laplace_N_generic(c, u)
        for lam, gam in rates:
            lm = lambda s, l=lam: transforms.laplace_M_from_N(ln, l, s)
            for s in s_grid:
                a = transforms.laplace_T_from_N(ln, lam, gam, s)
                b = transforms.laplace_T(lm, lam, gam, s)
                worst = max(worst, abs(a - b))
    return worst <= 1e-12, f"max path difference = {worst:.3e} (tol 1e-12)"


def check_ring_paths(quick: bool) -> tuple[bool, str]:
    """Closed form vs backward recursion vs generic linear solve on rings."""
    sizes = range(4, 13, 2) if quick else list(range(4, 202, 2))
    s_grid = (0.05, 0.3, 1.0, 3.0)
    worst = 0.0
    for n in sizes:
        chain = meeting_chain(build_ring(n))
        for s in s_grid:
            closed = transforms.laplace_N_ring(n, s)
            rec = oracle.ring_recursion_solve(n, s)
            gen = transforms.laplace_N_generic(chain, s)
            worst = max(worst, abs(closed - rec), abs(closed - gen), abs(rec - gen))
    return worst <= 1e-10, f"max pairwise ring-path difference = {worst:.3e} (tol 1e-10)"


def check_bipartite_closed(_quick: bool) -> tuple[bool, str]:
    worst = 0.0
    for m, n in ((1, 5), (2, 6), (3, 9)):
        chain = meeting_chain(build_bipartite(m, n))
        for s in (0.05, 0.3, 1.0, 3.0):
            closed = transforms.laplace_N_bipartite(m, n, s)
            gen = transforms.laplace_N_generic(chain, s)
            worst = max(worst, abs(closed - gen))
    return worst <= 1e-10, f"max closed-vs-solve difference = {worst:.3e} (tol 1e-10)"


def check_ring_hand_value(_quick: bool) -> tuple[bool, str]:
    s = -math.log(0.8)  # alpha = 0.4
    err = abs(transforms.laplace_N_ring(4, s) - 10.0 / 17.0)
    return err <= 1e-12, f"|L_N(ring 4, alpha=0.4) - 10/17| = {err:.3e} (tol 1e-12)"


def check_root_identities(_quick: bool) -> tuple[bool, str]:
    worst = 0.0
    for s in np.logspace(-8, 1.5, 50):
        aux = transforms.RingAux.from_s(float(s))
        worst = max(worst, abs(aux.x1 + aux.x2 - 1.0),
                    abs(aux.x1 * aux.x2 - aux.alpha ** 2))
    return worst <= 1e-14, f"max root-identity defect = {worst:.3e} (tol 1e-14)"


def check_family_vs_generic(quick: bool) -> tuple[bool, str]:
    """Total-variation agreement of the jump-count law between the reduced
    family chain and the full unordered-pair chain."""
    n_max = 8 if quick else 12
    graphs = [build_complete(min(n_max, 7)), build_bipartite(2, 6),
              build_ring(6), build_bipartite(1, 5)]
    if not quick:
        graphs += [build_complete(12), build_bipartite(3, 9), build_ring(12),
                   build_ring(7)]
    worst = 0.0
    for g in graphs:
        fam, _ = oracle.exact_pmf_N(meeting_chain(g), 200)
        gen, _ = oracle.exact_pmf_N(meeting_chain(_as_generic(g)), 200)
        worst = max(worst, 0.5 * float(np.abs(fam - gen).sum()))
    return worst <= 1e-12, f"max TV distance over 200 steps = {worst:.3e} (tol 1e-12)"


def check_edge_start_independence(_quick: bool) -> tuple[bool, str]:
    """On generic copies of family graphs, N's law must not depend on the
    starting edge."""
    worst = 0.0
    for g in (build_complete(5), build_ring(7), build_bipartite(2, 5),
              build_bipartite(1, 6)):
        gg = _as_generic(g)
        ref = None
        for edge in gg.edges():
            pmf, _ = oracle.exact_pmf_N(meeting_chain(gg, start_pair=edge), 120)
            if ref is None:
                ref = pmf
            else:
                worst = max(worst, float(np.abs(pmf - ref).max()))
    return worst <= 1e-12, f"max start-edge pmf deviation = {worst:.3e} (tol 1e-12)"


def check_monotonicity(_quick: bool) -> tuple[bool, str]:
    """Evaluators are nonincreasing with values in (0, 1] and limit 1 at 0+."""
    grid = np.logspace(-3, 1.7, 50)
    evs = []
    for g in (build_complete(6), build_bipartite(2, 7), build_ring(8), build_ring(7)):
        ln = transforms.n_evaluator(g)
        evs += [ln, transforms.m_evaluator(ln, 1.5), transforms.t_evaluator(ln, 1.5, 0.7)]
    ok = True
    detail = "all evaluators monotone in (0,1] with limit 1"
    for ev in evs:
        vals = [ev(float(s)) for s in grid]
        if any(b > a + 1e-12 for a, b in zip(vals, vals[1:])):
            ok, detail = False, f"non-monotone evaluator on {ev.graph} ({ev.subject})"
            break
        if any(not 0.0 < v <= 1.0 + 1e-12 for v in vals):
            ok, detail = False, f"out-of-range value on {ev.graph} ({ev.subject})"
            break
        if abs(ev(1e-8) - 1.0) > 1e-4:
            ok, detail = False, f"limit at 0 violated on {ev.graph} ({ev.subject})"
            break
    return ok, detail


def check_m_decomposition(quick: bool) -> tuple[bool, str]:
    """Meeting time equals a jump-count mixture of Exp(2*lam) steps."""
    n_max = 6 if quick else 8
    worst = 0.0
    for g in _family_instances(n_max):
        chain = meeting_chain(g)
        i, j = g.edges()[0]
        for lam in (0.5, 2.0):
            for s in (0.1, 1.0, 4.0):
                direct = oracle.exact_laplace_M_pair(g, lam, s, i, j)
                via_n = transforms.laplace_M_from_N(
                    lambda u, c=chain: transforms.laplace_N_generic(c, u), lam, s)
                worst = max(worst, abs(direct - via_n))
    return worst <= 1e-10, f"max |pair oracle - jump mixture| = {worst:.3e} (tol 1e-10)"


CHECKS = (
    ("theorem1-oracle-equality", check_theorem1),
    ("transform-path-equivalence", check_composition),
    ("ring-three-paths", check_ring_paths),
    ("bipartite-closed-vs-solve", check_bipartite_closed),
    ("ring-hand-value-10-17", check_ring_hand_value),
    ("ring-root-identities", check_root_identities),
    ("family-vs-generic-chain", check_family_vs_generic),
    ("edge-start-independence", check_edge_start_independence),
    ("transform-monotonicity", check_monotonicity),
    ("meeting-time-decomposition", check_m_decomposition),
)


def run_checks(quick: bool = True) -> list[dict]:
    out = []
    for name, fn in CHECKS:
        passed, detail = fn(quick)
        out.append({"name": name, "passed": bool(passed), "detail": detail})
    return out
