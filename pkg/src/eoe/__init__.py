"""End-of-epidemic times of a two-agent SIS epidemic driven by independent
continuous-time random walks on finite edge-transitive graphs.

Core surfaces:
  graphs      -- graph families and the walker meeting chain
  transforms  -- Laplace transforms of N (jumps to meet), M (meeting time)
                 and T (end-of-epidemic time), with moment extraction
  oracle      -- exact ground truth on small graphs by dense linear algebra
  simulate    -- seeded event-driven Monte Carlo (compiled kernel + fallback)
  asymptotics -- scaling schedules, limit laws, convergence experiments
  cli         -- `eoe` command-line entry point
"""

__version__ = "0.1.0"

from .graphs import (
    Graph,
    MeetingChain,
    build_bipartite,
    build_complete,
    build_generic,
    build_ring,
    meeting_chain,
    parse_graph_spec,
)
from .kernels import active_kernel
from .simulate import (
    BatchResult,
    EpidemicSample,
    MeetingSample,
    run_batch,
    run_meeting_batch,
    simulate_eoe,
    simulate_meeting,
)
from .summary import SampleSummary
from .transforms import (
    TransformEvaluator,
    evaluator_for,
    laplace_M_from_N,
    laplace_N_bipartite,
    laplace_N_complete,
    laplace_N_complete_exact,
    laplace_N_generic,
    laplace_N_ring,
    laplace_T,
    laplace_T_from_N,
    moments_from_transform,
    n_evaluator,
)

__all__ = [
    "__version__",
    "Graph",
    "MeetingChain",
    "build_bipartite",
    "build_complete",
    "build_generic",
    "build_ring",
    "meeting_chain",
    "parse_graph_spec",
    "active_kernel",
    "BatchResult",
    "EpidemicSample",
    "MeetingSample",
    "run_batch",
    "run_meeting_batch",
    "simulate_eoe",
    "simulate_meeting",
    "SampleSummary",
    "TransformEvaluator",
    "evaluator_for",
    "laplace_M_from_N",
    "laplace_N_bipartite",
    "laplace_N_complete",
    "laplace_N_complete_exact",
    "laplace_N_generic",
    "laplace_N_ring",
    "laplace_T",
    "laplace_T_from_N",
    "moments_from_transform",
    "n_evaluator",
]
