"""Pure-Python event-loop kernels.

This module and eoe._simkernel implement the same algorithm draw-for-draw:
they must consume identical uniform sequences from the bit generator and
produce bit-identical results.  Any change here must be mirrored there.

State per replication: a chain state index (walker-pair configuration class)
and the number of infected agents.  Jump events that do not change the
configuration class are not simulated one by one; their count over each
sojourn is Poisson given the sojourn time, so the caller adds a single
Poisson draw with mean ``acc`` at the end (thinning identity, exact in law).
Recovery clocks stay active while the walkers are co-located; such events are
nulls (the instant reinfection undoes them) and change nothing.
"""

from __future__ import annotations

from math import log1p

import numpy as np

_BUF = 256


def run_eoe(bit_generator, row_ptr, cols, cum, p_self, is_met, start, two_lam, gamma,
            max_events, trace=None):
    """One end-of-epidemic replication.

    Returns (t, real_jumps, reinfections, acc, events, capped).  ``acc`` is
    the accumulated intensity of class-preserving jumps (Poisson mean for the
    uncounted jumps); ``capped`` flags hitting max_events.

    ``trace``, if a list, receives (kind, dt, state, n_inf_before) tuples;
    kind is "jump", "recovery" or "null-recovery".  Python kernel only.
    """
    gen = np.random.Generator(bit_generator)
    buf = gen.random(_BUF).tolist()
    bi = 0
    row_ptr = row_ptr.tolist()
    cols = cols.tolist()
    cum = cum.tolist()
    p_self = p_self.tolist()
    is_met = is_met.tolist()

    t = 0.0
    acc = 0.0
    jumps = 0
    reinf = 0
    ninf = 2
    x = start
    ev = 0
    while ev < max_events:
        ps = p_self[x]
        jr = two_lam * (1.0 - ps)
        total = jr + gamma * ninf
        if bi == _BUF:
            buf = gen.random(_BUF).tolist()
            bi = 0
        u = buf[bi]
        bi += 1
        dt = -log1p(-u) / total
        t += dt
        if ps > 0.0:
            acc += (two_lam * ps) * dt
        ev += 1
        if bi == _BUF:
            buf = gen.random(_BUF).tolist()
            bi = 0
        v = buf[bi] * total
        bi += 1
        if v < jr:
            jumps += 1
            if bi == _BUF:
                buf = gen.random(_BUF).tolist()
                bi = 0
            w = buf[bi]
            bi += 1
            k = row_ptr[x]
            while w >= cum[k]:
                k += 1
            if trace is not None:
                trace.append(("jump", dt, x, ninf))
            x = cols[k]
            if ninf == 1 and is_met[x]:
                ninf = 2
                reinf += 1
        else:
            if is_met[x]:
                if trace is not None:
                    trace.append(("null-recovery", dt, x, ninf))
            else:
                if trace is not None:
                    trace.append(("recovery", dt, x, ninf))
                ninf -= 1
                if ninf == 0:
                    return t, jumps, reinf, acc, ev, False
    return t, jumps, reinf, acc, ev, True


def run_meeting(bit_generator, row_ptr, cols, cum, p_self, is_met, start, two_lam,
                max_events):
    """One meeting-time replication: jumps only, stops on entering a met state.

    Returns (t, real_jumps, acc, events, capped); total jump count is
    real_jumps plus a Poisson(acc) draw added by the caller.
    """
    gen = np.random.Generator(bit_generator)
    buf = gen.random(_BUF).tolist()
    bi = 0
    row_ptr = row_ptr.tolist()
    cols = cols.tolist()
    cum = cum.tolist()
    p_self = p_self.tolist()
    is_met = is_met.tolist()

    t = 0.0
    acc = 0.0
    jumps = 0
    x = start
    ev = 0
    while ev < max_events:
        ps = p_self[x]
        jr = two_lam * (1.0 - ps)
        if bi == _BUF:
            buf = gen.random(_BUF).tolist()
            bi = 0
        u = buf[bi]
        bi += 1
        dt = -log1p(-u) / jr
        t += dt
        if ps > 0.0:
            acc += (two_lam * ps) * dt
        ev += 1
        if bi == _BUF:
            buf = gen.random(_BUF).tolist()
            bi = 0
        w = buf[bi]
        bi += 1
        k = row_ptr[x]
        while w >= cum[k]:
            k += 1
        jumps += 1
        x = cols[k]
        if is_met[x]:
            return t, jumps, acc, ev, False
    return t, jumps, acc, ev, True
