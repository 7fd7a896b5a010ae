# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# cython: initializedcheck=False, nonecheck=False
"""Compiled twin of eoe._kernel_py.

Consumes the same uniform draws in the same order and performs the same
double-precision arithmetic (the extension is compiled with FMA contraction
disabled), so results are bit-identical to the pure-Python kernel.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t
from libc.math cimport log1p
from libc.stdint cimport int64_t, uint8_t


def run_eoe(object bit_generator,
            const int64_t[::1] row_ptr, const int64_t[::1] cols,
            const double[::1] cum, const double[::1] p_self,
            const uint8_t[::1] is_met, Py_ssize_t start,
            double two_lam, double gamma, long long max_events):
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(
        bit_generator.capsule, "BitGenerator")
    cdef double t = 0.0, acc = 0.0
    cdef double ps, jr, total, dt, u, v, w
    cdef long long jumps = 0, ev = 0, reinf = 0
    cdef int ninf = 2
    cdef Py_ssize_t x = start, k
    cdef bint capped = True
    with nogil:
        while ev < max_events:
            ps = p_self[x]
            jr = two_lam * (1.0 - ps)
            total = jr + gamma * ninf
            u = rng.next_double(rng.state)
            dt = -log1p(-u) / total
            t += dt
            if ps > 0.0:
                acc += (two_lam * ps) * dt
            ev += 1
            v = rng.next_double(rng.state) * total
            if v < jr:
                jumps += 1
                w = rng.next_double(rng.state)
                k = row_ptr[x]
                while w >= cum[k]:
                    k += 1
                x = cols[k]
                if ninf == 1 and is_met[x]:
                    ninf = 2
                    reinf += 1
            else:
                if is_met[x] == 0:
                    ninf -= 1
                    if ninf == 0:
                        capped = False
                        break
    return t, jumps, reinf, acc, ev, capped


def run_meeting(object bit_generator,
                const int64_t[::1] row_ptr, const int64_t[::1] cols,
                const double[::1] cum, const double[::1] p_self,
                const uint8_t[::1] is_met, Py_ssize_t start,
                double two_lam, long long max_events):
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(
        bit_generator.capsule, "BitGenerator")
    cdef double t = 0.0, acc = 0.0
    cdef double ps, jr, dt, u, w
    cdef long long jumps = 0, ev = 0
    cdef Py_ssize_t x = start, k
    cdef bint capped = True
    with nogil:
        while ev < max_events:
            ps = p_self[x]
            jr = two_lam * (1.0 - ps)
            u = rng.next_double(rng.state)
            dt = -log1p(-u) / jr
            t += dt
            if ps > 0.0:
                acc += (two_lam * ps) * dt
            ev += 1
            w = rng.next_double(rng.state)
            k = row_ptr[x]
            while w >= cum[k]:
                k += 1
            jumps += 1
            x = cols[k]
            if is_met[x]:
                capped = False
                break
    return t, jumps, acc, ev, capped
