"""Windowed active counts N_t for the fractal environments omega_1..omega_k at t = 2**k."""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

from cspath.analysis import fractal_level_counts
from cspath.generators import fractal_expected_count


@dataclass(frozen=True)
class FractalConfig:
    k_min: int = 3
    k_max: int = 6


def main(cfg: FractalConfig) -> None:
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["k", "t", "level", "N_t", "bound", "ratio"])
    for k in range(cfg.k_min, cfg.k_max + 1):
        bound = float(fractal_expected_count(k))
        for j, n_t in enumerate(fractal_level_counts(k), start=1):
            out.writerow([k, 2**k, j, n_t, f"{bound:.3f}", f"{n_t / bound:.3f}"])


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k-min", type=int, default=3)
    p.add_argument("--k-max", type=int, default=6)
    a = p.parse_args()
    if not 1 <= a.k_min <= a.k_max <= 7:
        p.error("need 1 <= k-min <= k-max <= 7")
    main(FractalConfig(a.k_min, a.k_max))
