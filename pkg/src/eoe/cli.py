"""Command-line entry point: transform / simulate / sweep / verify / bench.

Every output artifact starts with a header block carrying the version, the
effective seed, and a canonical echo of the experiment configuration that
re-parses to an equal configuration.  Worker count (--threads) is an
execution detail, never part of the configuration, so outputs are
byte-identical across worker counts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .asymptotics import RateSpec, SCHEDULE_NAMES, convergence_check, divergence_probe, make_schedule
from .checks import run_checks
from .errors import ConfigError
from .graphs import parse_graph_spec
from .kernels import active_kernel, benchmark
from .simulate import run_batch, run_meeting_batch
from .summary import SampleSummary
from .transforms import evaluator_for


def _fmt(x: float) -> str:
    return f"{x:.17g}"


# --- configuration ---------------------------------------------------------

def _parse_bool(text: str, key: str) -> bool:
    if text in ("true", "false"):
        return text == "true"
    raise ConfigError(f"invalid value for {key!r}: expected true/false, got {text!r}")


def _parse_floats(text: str, key: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(p) for p in text.split(",") if p != "")
    except ValueError as exc:
        raise ConfigError(f"invalid value for {key!r}: {text!r}") from exc
    if not vals:
        raise ConfigError(f"empty list for {key!r}")
    return vals


def _parse_ints(text: str, key: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p != "")
    except ValueError as exc:
        raise ConfigError(f"invalid value for {key!r}: {text!r}") from exc


def _positive(x, key):
    if x <= 0:
        raise ConfigError(f"value for {key!r} must be positive, got {x}")
    return x


_CHOICES = {
    "format": ("csv", "json"),
    "subject": ("N", "M", "T"),
    "variant": ("exact", "paper"),
    "schedule.name": SCHEDULE_NAMES,
    "schedule.lambda.kind": ("const", "power", "logpower"),
    "schedule.gamma.kind": ("const", "power", "logpower"),
}

# key -> (parse(text) -> typed, render(typed) -> text)
_KEY_CODECS = {
    "graph": (lambda t, k: t, str),
    "lambda": (lambda t, k: _positive(float(t), k), lambda v: repr(float(v))),
    "gamma": (lambda t, k: _positive(float(t), k), lambda v: repr(float(v))),
    "reps": (lambda t, k: _positive(int(t), k), str),
    "seed": (lambda t, k: int(t), str),
    "s_grid": (_parse_floats, lambda v: ",".join(repr(float(x)) for x in v)),
    "n_grid": (_parse_ints, lambda v: ",".join(str(x) for x in v)),
    "format": (lambda t, k: t, str),
    "subject": (lambda t, k: t, str),
    "variant": (lambda t, k: t, str),
    "meeting": (_parse_bool, lambda v: "true" if v else "false"),
    "probe": (_parse_bool, lambda v: "true" if v else "false"),
    "start": (_parse_ints, lambda v: ",".join(str(x) for x in v)),
    "schedule.name": (lambda t, k: t, str),
    "schedule.param": (lambda t, k: _positive(float(t), k), lambda v: repr(float(v))),
    "schedule.lambda.kind": (lambda t, k: t, str),
    "schedule.lambda.coef": (lambda t, k: _positive(float(t), k), lambda v: repr(float(v))),
    "schedule.lambda.exponent": (lambda t, k: float(t), lambda v: repr(float(v))),
    "schedule.gamma.kind": (lambda t, k: t, str),
    "schedule.gamma.coef": (lambda t, k: _positive(float(t), k), lambda v: repr(float(v))),
    "schedule.gamma.exponent": (lambda t, k: float(t), lambda v: repr(float(v))),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated flat key-value configuration with canonical rendering."""

    items: tuple[tuple[str, object], ...]

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        checked = {}
        for key, value in mapping.items():
            if key not in _KEY_CODECS:
                raise ConfigError(f"unknown config key {key!r}")
            if value is None:
                continue
            if key in _CHOICES and value not in _CHOICES[key]:
                raise ConfigError(
                    f"invalid value for {key!r}: {value!r} (choices: {_CHOICES[key]})")
            if key in ("lambda", "gamma", "schedule.param", "schedule.lambda.coef",
                       "schedule.gamma.coef", "reps"):
                _positive(value, key)
            if key == "seed" and value < 0:
                raise ConfigError("value for 'seed' must be non-negative")
            if key == "s_grid" and any(s < 0 for s in value):
                raise ConfigError("values in 's_grid' must be non-negative")
            if key == "n_grid" and any(n < 2 for n in value):
                raise ConfigError("values in 'n_grid' must be >= 2")
            if key == "start" and (len(value) != 2 or any(v < 0 for v in value)):
                raise ConfigError("value for 'start' must be two vertices i,j")
            checked[key] = value
        return cls(items=tuple(sorted(checked.items())))

    @classmethod
    def parse_lines(cls, lines) -> "ExperimentConfig":
        mapping = {}
        for raw in lines:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, text = line.partition("=")
            if not sep:
                raise ConfigError(f"malformed config line {line!r}")
            key = key.strip()
            text = text.strip()
            if key not in _KEY_CODECS:
                raise ConfigError(f"unknown config key {key!r}")
            parse, _ = _KEY_CODECS[key]
            mapping[key] = parse(text, key)
        return cls.from_mapping(mapping)

    def get(self, key: str, default=None):
        for k, v in self.items:
            if k == key:
                return v
        return default

    def require(self, key: str):
        value = self.get(key)
        if value is None:
            raise ConfigError(f"missing required config key {key!r}")
        return value

    def with_updates(self, mapping: dict) -> "ExperimentConfig":
        merged = dict(self.items)
        for key, value in mapping.items():
            if value is not None:
                merged[key] = value
        return ExperimentConfig.from_mapping(merged)

    def render_lines(self) -> list[str]:
        out = []
        for key, value in self.items:
            _, render = _KEY_CODECS[key]
            out.append(f"{key} = {render(value)}")
        return out


def header_lines(cfg: ExperimentConfig) -> list[str]:
    lines = [f"# eoe {__version__}", f"# seed = {cfg.get('seed', 0)}", "# config-begin"]
    lines += [f"# {line}" for line in cfg.render_lines()]
    lines.append("# config-end")
    return lines


def parse_header(text: str) -> ExperimentConfig:
    """Recover the configuration from an output header (round-trip contract)."""
    lines = []
    inside = False
    for line in text.splitlines():
        if line.strip() == "# config-begin":
            inside = True
        elif line.strip() == "# config-end":
            break
        elif inside:
            lines.append(line.lstrip("# "))
    return ExperimentConfig.parse_lines(lines)


def _resolve_seed(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.get("seed") is None:
        env = os.environ.get("EOE_SEED")
        return cfg.with_updates({"seed": int(env) if env else 0})
    return cfg


def _load_config(path: str | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig(items=())
    with open(path) as fh:
        return ExperimentConfig.parse_lines(fh)


def _write(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


# --- subcommands -----------------------------------------------------------

def _cmd_transform(cfg: ExperimentConfig, out: str | None) -> int:
    g = parse_graph_spec(cfg.require("graph"))
    subject = cfg.get("subject", "T")
    variant = cfg.get("variant", "exact")
    lam = cfg.get("lambda")
    gamma = cfg.get("gamma")
    ev = evaluator_for(g, subject, lam=lam, gamma=gamma, variant=variant)
    rows = ["subject,family,n,m,lambda,gamma,s,value,provenance"]
    for s in cfg.require("s_grid"):
        rows.append(",".join([
            subject, g.family, str(g.n), "" if g.m is None else str(g.m),
            "" if subject == "N" or lam is None else _fmt(lam),
            "" if subject != "T" or gamma is None else _fmt(gamma),
            _fmt(s), _fmt(ev(s)), ev.provenance,
        ]))
    _write(out, "\n".join(header_lines(cfg) + rows) + "\n")
    return 0


def _cmd_simulate(cfg: ExperimentConfig, out: str | None, threads: int) -> int:
    g = parse_graph_spec(cfg.require("graph"))
    lam = cfg.require("lambda")
    seed = cfg.get("seed", 0)
    reps = cfg.require("reps")
    fmt = cfg.get("format", "csv")
    if cfg.get("meeting", False):
        start = cfg.get("start")
        if start is None:
            start = g.edges()[0]
        if len(start) != 2:
            raise ConfigError("value for 'start' must be two vertices i,j")
        m, n_jumps, _ = run_meeting_batch(g, lam, reps, seed, start[0], start[1],
                                          workers=threads)
        if fmt == "json":
            summary = SampleSummary.from_samples(m, cfg.get("s_grid", ()))
            payload = {"meta": _meta(cfg), "summary": summary.to_dict()}
            _write(out, json.dumps(payload, sort_keys=True, indent=2) + "\n")
            return 0
        rows = ["rep,M,N"]
        rows += [f"{r},{_fmt(m[r])},{n_jumps[r]}" for r in range(reps)]
        _write(out, "\n".join(header_lines(cfg) + rows) + "\n")
        return 0
    gamma = cfg.require("gamma")
    if cfg.get("start") is not None:
        raise ConfigError(
            "'start' applies to meeting-time runs only; end-of-epidemic runs "
            "use the co-located both-infected start")
    batch = run_batch(g, lam, gamma, reps, seed, s_grid=cfg.get("s_grid", ()),
                      workers=threads)
    if fmt == "json":
        payload = {"meta": _meta(cfg), "summary": batch.summary.to_dict()}
        _write(out, json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return 0
    rows = ["rep,T,n_jumps,n_reinfections"]
    rows += [
        f"{r},{_fmt(batch.t[r])},{batch.n_jumps[r]},{batch.n_reinfections[r]}"
        for r in range(reps)
    ]
    _write(out, "\n".join(header_lines(cfg) + rows) + "\n")
    return 0


def _meta(cfg: ExperimentConfig) -> dict:
    return {
        "version": __version__,
        "seed": cfg.get("seed", 0),
        "config": cfg.render_lines(),
        "kernel": active_kernel(),
    }


def _schedule_from_config(cfg: ExperimentConfig):
    name = cfg.require("schedule.name")
    lam = gamma = None
    if cfg.get("schedule.lambda.kind") is not None:
        lam = RateSpec(cfg.get("schedule.lambda.kind"),
                       cfg.require("schedule.lambda.coef"),
                       cfg.get("schedule.lambda.exponent", 0.0))
    if cfg.get("schedule.gamma.kind") is not None:
        gamma = RateSpec(cfg.get("schedule.gamma.kind"),
                         cfg.require("schedule.gamma.coef"),
                         cfg.get("schedule.gamma.exponent", 0.0))
    return make_schedule(name, lam=lam, gamma=gamma, param=cfg.get("schedule.param"))


def _cmd_sweep(cfg: ExperimentConfig, out: str | None, threads: int) -> int:
    schedule = _schedule_from_config(cfg)
    n_grid = tuple(cfg.require("n_grid"))
    reps = cfg.require("reps")
    seed = cfg.get("seed", 0)
    if cfg.get("probe", False):
        report = divergence_probe(schedule, n_grid, reps, seed, workers=threads)
    else:
        kwargs = {}
        if cfg.get("s_grid") is not None:
            kwargs["s_grid"] = cfg.get("s_grid")
        report = convergence_check(schedule, n_grid, reps, seed, workers=threads,
                                   **kwargs)
    payload = {"meta": _meta(cfg), "report": report.to_dict()}
    _write(out, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def _cmd_verify(quick: bool, out: str | None) -> int:
    results = run_checks(quick=quick)
    for res in results:
        status = "PASS" if res["passed"] else "FAIL"
        print(f"{status} {res['name']}: {res['detail']}")
    if out is not None:
        payload = {
            "version": __version__,
            "mode": "quick" if quick else "full",
            "checks": results,
            "passed": all(r["passed"] for r in results),
        }
        _write(out, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0 if all(r["passed"] for r in results) else 1


def _cmd_bench(graph: str, lam: float, gamma: float, reps: int, out: str | None) -> int:
    report = benchmark(graph_spec=graph, lam=lam, gamma=gamma, reps=reps)
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    _write(out, text)
    return 0


# --- argument parsing ------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eoe",
        description="End-of-epidemic times of two-walker SIS dynamics: exact "
                    "transforms, event-driven simulation, scaling sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap; never affects results")

    p = sub.add_parser("transform", help="evaluate Laplace transforms on an s-grid")
    common(p)
    p.add_argument("--graph")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--s-grid", dest="s_grid")
    p.add_argument("--subject", choices=("N", "M", "T"))
    p.add_argument("--variant", choices=("exact", "paper"))

    p = sub.add_parser("simulate", help="Monte Carlo of the epidemic (or meeting) process")
    common(p)
    p.add_argument("--graph")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--reps", type=int)
    p.add_argument("--s-grid", dest="s_grid")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--meeting", action="store_true", default=None,
                   help="sample meeting times (M, N) instead of epidemic end times")
    p.add_argument("--start", help="i,j walker start for meeting runs")

    p = sub.add_parser("sweep", help="limit-law convergence / divergence experiments")
    common(p)
    p.add_argument("--schedule", choices=SCHEDULE_NAMES)
    p.add_argument("--n-grid", dest="n_grid")
    p.add_argument("--reps", type=int)
    p.add_argument("--s-grid", dest="s_grid")
    p.add_argument("--param", type=float, help="family parameter (alpha/beta/m)")
    p.add_argument("--schedule-lambda", help="rate spec kind:coef[:exponent]")
    p.add_argument("--schedule-gamma", help="rate spec kind:coef[:exponent]")
    p.add_argument("--probe", action="store_true", default=None,
                   help="report raw median trend instead of limit-law distance")

    p = sub.add_parser("verify", help="run the oracle cross-check suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("bench", help="compare compiled and pure-Python kernels")
    p.add_argument("--graph", default="ring:64")
    p.add_argument("--lambda", dest="lam", type=float, default=200.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--reps", type=int, default=300)
    p.add_argument("--out")
    return parser


def _flag_updates(args: argparse.Namespace) -> dict:
    updates: dict = {}
    simple = {
        "graph": "graph", "lam": "lambda", "gamma": "gamma", "reps": "reps",
        "seed": "seed", "format": "format", "subject": "subject",
        "variant": "variant", "meeting": "meeting", "probe": "probe",
    }
    for attr, key in simple.items():
        if getattr(args, attr, None) is not None:
            updates[key] = getattr(args, attr)
    if getattr(args, "s_grid", None) is not None:
        updates["s_grid"] = _parse_floats(args.s_grid, "s_grid")
    if getattr(args, "n_grid", None) is not None:
        updates["n_grid"] = _parse_ints(args.n_grid, "n_grid")
    if getattr(args, "start", None) is not None:
        updates["start"] = _parse_ints(args.start, "start")
    if getattr(args, "schedule", None) is not None:
        updates["schedule.name"] = args.schedule
    if getattr(args, "param", None) is not None:
        updates["schedule.param"] = args.param
    for attr, prefix in (("schedule_lambda", "schedule.lambda"),
                         ("schedule_gamma", "schedule.gamma")):
        if getattr(args, attr, None) is not None:
            spec = RateSpec.parse(getattr(args, attr))
            updates[f"{prefix}.kind"] = spec.kind
            updates[f"{prefix}.coef"] = spec.coef
            updates[f"{prefix}.exponent"] = spec.exponent
    return updates


def run_cli(argv: list[str]) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args.quick, args.out)
        if args.command == "bench":
            return _cmd_bench(args.graph, args.lam, args.gamma, args.reps, args.out)
        cfg = _load_config(args.config).with_updates(_flag_updates(args))
        cfg = _resolve_seed(cfg)
        if args.command == "transform":
            return _cmd_transform(cfg, args.out)
        if args.command == "simulate":
            return _cmd_simulate(cfg, args.out, args.threads)
        if args.command == "sweep":
            return _cmd_sweep(cfg, args.out, args.threads)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
