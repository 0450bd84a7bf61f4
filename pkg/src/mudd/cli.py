"""Command-line surface: paths, constraints, check, explore, synth.

Exit codes: 0 all feasible / success, 1 some observation infeasible,
2 any error (parse diagnostics, bad input files, broken references).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import dsl, exploration, feasibility, stats, synth
from .errors import MuddError
from .geometry import deduce_constraints
from .model import DEFAULT_PATH_CAP, CounterNamespace, enumerate_mupaths, signature_of


@dataclass
class RunConfig:
    """Resolved run settings: flags beat the config file, which beats
    environment and built-in defaults."""

    alpha: float = 0.01
    cap: int = DEFAULT_PATH_CAP
    output_format: str = "text"
    jobs: int = 1
    project: bool = False
    independent: bool = False
    compress_flows: bool = False
    namespace: Optional[CounterNamespace] = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise MuddError("alpha must lie in (0, 1)")
        if self.cap < 1:
            raise MuddError("cap must be at least 1")
        if self.output_format not in ("text", "json"):
            raise MuddError(f"unknown output format {self.output_format!r}")
        if self.jobs < 1:
            raise MuddError("jobs must be at least 1")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        overrides = _read_config_file(getattr(args, "config", None))

        def pick(flag, key, cast, fallback):
            value = getattr(args, flag, None)
            if value is not None:
                return value
            if key in overrides:
                return cast(overrides[key])
            return fallback

        return cls(
            alpha=pick("alpha", "alpha", float, 0.01),
            cap=pick("cap", "cap", int, DEFAULT_PATH_CAP),
            output_format=pick("format", "format", str, "text"),
            jobs=pick("jobs", "jobs", int, _default_jobs()),
            project=bool(getattr(args, "project", False)),
            independent=bool(getattr(args, "independent", False)),
            compress_flows=bool(getattr(args, "compress_flows", False)),
            namespace=_load_namespace(getattr(args, "namespace", None)),
        )


def _load_namespace(path):
    if path is None:
        return None
    names = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            names.append(line)
    return CounterNamespace(names)


def _read_config_file(path) -> dict:
    """key=value lines supply defaults for flags the user did not pass."""
    if not path:
        return {}
    overrides = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise MuddError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def _default_jobs() -> int:
    env = os.environ.get("MUDD_JOBS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def cmd_paths(args, cfg: RunConfig) -> int:
    model = dsl.parse_file(args.model, cfg.namespace)
    paths = enumerate_mupaths(model, cfg.cap)
    if cfg.output_format == "json":
        rows = []
        for p in paths:
            sig = signature_of(p, model.namespace)
            rows.append(
                {
                    "properties": dict(p.property_assignment),
                    "signature": {
                        n: c for n, c in zip(model.namespace.names, sig.counts) if c
                    },
                }
            )
        print(json.dumps(rows, indent=2))
        return 0
    for i, p in enumerate(paths, 1):
        sig = signature_of(p, model.namespace)
        counts = " ".join(
            f"{n}={c}" for n, c in zip(model.namespace.names, sig.counts) if c
        )
        print(f"{i}. {p.describe()} | {counts or '(all zero)'}")
    return 0


def cmd_constraints(args, cfg: RunConfig) -> int:
    model = dsl.parse_file(args.model, cfg.namespace)
    constraints = deduce_constraints(model, cfg.cap)
    if cfg.output_format == "json":
        print(json.dumps(constraints.to_json(), indent=2))
        return 0
    print(f"Equalities ({len(constraints.equalities)}):")
    for c in constraints.equalities:
        print(c.display(model.namespace))
    print(f"Inequalities ({len(constraints.inequalities)}):")
    for c in constraints.inequalities:
        print(c.display(model.namespace))
    return 0


def cmd_check(args, cfg: RunConfig) -> int:
    model = dsl.parse_file(args.model, cfg.namespace)
    model_name = Path(args.model).stem
    observations = [
        stats.load_observations(p, model.namespace, project=cfg.project)
        for p in args.observations
    ]
    namespaces = {model_name: model.namespace}
    if cfg.project or cfg.independent:
        # projection restricts the namespace per observation, and the
        # independence ablation changes the region; both go cell by cell
        from .geometry import constraints_from_signatures
        from .model import signatures_of_model
        from .stats import build_confidence_region

        cells = []
        base_sigs = signatures_of_model(model, cfg.cap)
        for obs in observations:
            if obs.namespace.names != model.namespace.names:
                positions = [model.namespace.position(n) for n in obs.namespace.names]
                sigs = [tuple(s.counts[i] for i in positions) for s in base_sigs]
            else:
                sigs = [s.counts for s in base_sigs]
            constraints = constraints_from_signatures(sigs, obs.namespace)
            region = build_confidence_region(
                obs, cfg.alpha, independent=cfg.independent
            )
            verdict = feasibility.check_feasibility(
                sigs, region, cap=cfg.cap, compress=cfg.compress_flows,
                constraints=constraints,
            )
            cells.append(feasibility.BatchCell(model_name, obs.run_id, verdict))
            namespaces[(model_name, obs.run_id)] = obs.namespace
        cells = tuple(sorted(cells, key=lambda c: (c.model_name, c.run_id)))
    else:
        cells = feasibility.batch_check(
            [(model_name, model)],
            observations,
            cfg.alpha,
            cap=cfg.cap,
            compress=cfg.compress_flows,
            jobs=cfg.jobs,
        )

    if cfg.output_format == "json":
        print(feasibility.verdict_table_json(cells, namespaces))
    else:
        print(feasibility.verdict_table_text(cells, namespaces))
    if any(c.error for c in cells):
        return 2
    if any(not c.verdict.feasible for c in cells):
        return 1
    return 0


def cmd_explore(args, cfg: RunConfig) -> int:
    catalog = exploration.load_catalog(args.catalog)
    expansion = exploration.expansion_results(catalog, cfg.cap)
    if cfg.output_format == "json":
        print(exploration.report_json(catalog, expansion))
    else:
        print(exploration.render_search_report(catalog, expansion), end="")
    return 0


def _parse_noise(text, n):
    if text is None:
        return 0.0
    parts = [p for p in text.split(",") if p.strip()]
    values = [float(p) for p in parts]
    if len(values) == 1:
        return values[0]
    if len(values) != n:
        raise MuddError(f"--noise needs 1 or {n} values, got {len(values)}")
    return values


def cmd_synth(args, cfg: RunConfig) -> int:
    model = dsl.parse_file(args.model, cfg.namespace)
    paths = enumerate_mupaths(model, cfg.cap)
    parts = [p for p in args.flows.split(",") if p.strip()]
    flows = [float(p) for p in parts]
    if len(flows) == 1:
        flows = flows * len(paths)
    if len(flows) != len(paths):
        raise MuddError(f"--flows needs 1 or {len(paths)} values, got {len(flows)}")
    spec = synth.SynthSpec(
        model=model,
        flows=tuple(flows),
        samples=args.samples,
        noise=_parse_noise(args.noise, len(model.namespace)),
        seed=args.seed,
    )
    obs = synth.generate(spec, run_id=Path(args.model).stem, cap=cfg.cap)
    if args.output:
        stats.write_observations(obs, args.output)
    else:
        stats.write_observations(obs, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mudd",
        description="Model micro-op counter behavior and test observations against it.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--cap", type=int, default=None, help="path enumeration cap")
        p.add_argument("--namespace", help="file listing counter names, one per line")
        p.add_argument("--format", choices=["text", "json"], default=None)
        p.add_argument("--config", help="key=value defaults file")

    p = sub.add_parser("paths", help="list paths and signatures of a model")
    p.add_argument("model")
    common(p)
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("constraints", help="deduce and print the model constraints")
    p.add_argument("model")
    common(p)
    p.set_defaults(func=cmd_constraints)

    p = sub.add_parser("check", help="test observation CSVs against a model")
    p.add_argument("model")
    p.add_argument("observations", nargs="+")
    p.add_argument("--alpha", type=float, default=None, help="significance level")
    p.add_argument("--project", action="store_true",
                   help="restrict the namespace to counters present in each CSV")
    p.add_argument("--independent", action="store_true",
                   help="ablation: drop counter correlations from the region")
    p.add_argument("--compress-flows", action="store_true",
                   help="one flow variable per distinct signature")
    p.add_argument("--jobs", type=int, default=None,
                   help="parallel observation checks (default MUDD_JOBS or 1)")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("explore", help="render a model-search catalog report")
    p.add_argument("catalog")
    common(p)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("synth", help="generate synthetic observations from a model")
    p.add_argument("model")
    p.add_argument("--flows", required=True,
                   help="comma-separated per-path flows, or one value for all paths")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--noise", default=None,
                   help="gaussian sigma, scalar or comma-separated per counter")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="write CSV here instead of stdout")
    common(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        return args.func(args, cfg)
    except dsl.DslParseError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (MuddError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
