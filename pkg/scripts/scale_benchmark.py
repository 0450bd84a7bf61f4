#!/usr/bin/env python3
"""Timing sweep on the bundled 26-counter MMU model.

Reports path enumeration, constraint deduction, and per-observation
feasibility times (full and signature-compressed flow variables) over a few
seeds. Useful when touching the solver or hull internals.
"""
import time

import numpy as np

from mudd import bundled_path, dsl
from mudd.feasibility import check_feasibility
from mudd.geometry import deduce_constraints, normalize_signatures
from mudd.model import CounterNamespace, enumerate_mupaths, signatures_of_model
from mudd.stats import build_confidence_region
from mudd.synth import SynthSpec, generate


def load_model():
    names = []
    with open(bundled_path("haswell_counters.txt"), encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                names.append(line)
    ns = CounterNamespace(names)
    return dsl.parse_file(bundled_path("haswell_mmu.mudd"), ns)


def main():
    model = load_model()
    t0 = time.perf_counter()
    paths = enumerate_mupaths(model)
    sigs = signatures_of_model(model)
    print(f"paths: {len(paths)} in {time.perf_counter() - t0:.3f}s")
    print(f"unique generators: {len(normalize_signatures(sigs))}")

    t0 = time.perf_counter()
    constraints = deduce_constraints(model)
    print(
        f"deduction: {time.perf_counter() - t0:.3f}s "
        f"({len(constraints.equalities)} equalities, "
        f"{len(constraints.inequalities)} inequalities)"
    )

    for seed in range(3):
        rng = np.random.default_rng(seed)
        flows = tuple(float(x) for x in rng.uniform(0.0, 50.0, len(paths)))
        obs = generate(
            SynthSpec(model=model, flows=flows, samples=50, noise=3.0, seed=seed)
        )
        region = build_confidence_region(obs, 0.01)
        t0 = time.perf_counter()
        full = check_feasibility(sigs, region)
        t_full = time.perf_counter() - t0
        t0 = time.perf_counter()
        compressed = check_feasibility(sigs, region, compress=True)
        t_comp = time.perf_counter() - t0
        assert full.feasible == compressed.feasible
        print(
            f"seed {seed}: feasible={full.feasible} "
            f"full={t_full:.2f}s compressed={t_comp:.2f}s"
        )


if __name__ == "__main__":
    main()
