"""Compare the engine's speedway frontier with the closed form and with the
Dijkstra ball boundary, one CSV row per clock value."""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

from cspath.analysis import active_points, ball_boundary, first_passage_times
from cspath.engine import SolverConfig, init_state, run_cycle
from cspath.generators import gen_speedway, speedway_active_set


@dataclass(frozen=True)
class SpeedwayConfig:
    t_max: int = 40
    n: int = 80


def main(cfg: SpeedwayConfig) -> None:
    inst = gen_speedway(cfg.n)
    tau = first_passage_times(inst)
    state = init_state(inst, SolverConfig(time_mode="unit"))
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["T", "engine", "formula", "formula_only", "engine_only", "equals_ball_boundary"])
    for T in range(1, cfg.t_max + 1):
        run_cycle(state)
        if T < 2:
            continue
        got, want = active_points(state), speedway_active_set(T, cfg.n)
        out.writerow([T, len(got), len(want), len(want - got), len(got - want),
                      got == ball_boundary(inst, T, tau)])


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--t-max", type=int, default=40)
    p.add_argument("--n", type=int, default=80)
    a = p.parse_args()
    if a.n < 2 * a.t_max:
        p.error("need n >= 2 * t-max")
    main(SpeedwayConfig(a.t_max, a.n))
