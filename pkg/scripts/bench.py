"""Cube benchmark: water on the boundary, target at the centre, passage times
1 or 2 with equal probability.  Prints a markdown table and optionally a CSV."""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from cspath.analysis import bench, format_bench_table, write_bench_csv
from cspath.engine import SolverConfig


@dataclass(frozen=True)
class BenchConfig:
    sides: tuple[int, ...] = (20, 30, 40, 50)
    repeats: int = 3
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    csv_path: str | None = None


def main(cfg: BenchConfig) -> None:
    rows = bench(cfg.sides, cfg.solver, repeats=cfg.repeats, seed=cfg.seed)
    print(format_bench_table(rows))
    if cfg.csv_path:
        with open(cfg.csv_path, "w", encoding="utf-8") as fh:
            write_bench_csv(rows, fh)


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--sides", type=int, nargs="+", default=[20, 30, 40, 50])
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv")
    a = p.parse_args()
    main(BenchConfig(tuple(a.sides), a.repeats, a.seed, SolverConfig(workers=a.workers), a.csv))
