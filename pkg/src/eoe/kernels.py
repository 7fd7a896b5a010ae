"""Kernel selection: the compiled event loop when built, else the pure-Python
twin.  Both expose run_eoe / run_meeting with identical semantics and output.
"""

from __future__ import annotations

import time

from . import _kernel_py

try:
    from . import _simkernel

    _DEFAULT = "cython"
except ImportError:  # extension not built; fall back
    _simkernel = None
    _DEFAULT = "python"


def active_kernel() -> str:
    return _DEFAULT


def get_impl(name: str | None = None):
    """Kernel module by name ("cython" | "python"); default is the active one."""
    if name is None:
        name = _DEFAULT
    if name == "python":
        return _kernel_py
    if name == "cython":
        if _simkernel is None:
            raise RuntimeError("compiled kernel not available; reinstall with Cython")
        return _simkernel
    raise ValueError(f"unknown kernel {name!r}")


def available_kernels() -> tuple[str, ...]:
    return ("python",) if _simkernel is None else ("cython", "python")


def benchmark(graph_spec: str = "ring:64", lam: float = 200.0, gamma: float = 1.0,
              reps: int = 500, seed: int = 0) -> dict:
    """Time both kernels on the same workload; returns events/s per kernel."""
    from .simulate import run_batch
    from .graphs import parse_graph_spec

    g = parse_graph_spec(graph_spec)
    out: dict = {"graph": graph_spec, "lam": lam, "gamma": gamma, "reps": reps}
    for name in available_kernels():
        t0 = time.perf_counter()
        res = run_batch(g, lam, gamma, reps, seed, kernel=name)
        elapsed = time.perf_counter() - t0
        out[name] = {
            "seconds": elapsed,
            "events": int(res.events),
            "events_per_sec": res.events / elapsed if elapsed > 0 else float("inf"),
        }
    if "cython" in out and "python" in out:
        out["speedup"] = out["python"]["seconds"] / out["cython"]["seconds"]
    return out
