"""Separation of nearby geodesics against the flat baseline t * rate.

Prints the ratio separation / (t * initial_rate) for a few launch
directions; ratios staying above 1 mean the spread outpaces linear growth.
"""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from betalogistic.geodesics import spread_diagnostic


@dataclass
class SpreadConfig:
    origin: tuple[float, float] = (1.0, 0.0)
    perturbation: float = 1e-4
    t_end: float = 5.0
    samples: int = 11
    directions: int = 8


def run(cfg: SpreadConfig):
    out = {}
    for k in range(cfg.directions):
        base = 2 * math.pi * k / cfg.directions
        r = spread_diagnostic(cfg.origin, base, cfg.perturbation, cfg.t_end, samples=cfg.samples)
        t = r.times[1:]
        out[base] = (t, r.separations[1:] / (t * r.initial_rate), r.terminations[0].value)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--perturbation", type=float, default=1e-4)
    ap.add_argument("--directions", type=int, default=8)
    a = ap.parse_args()
    res = run(SpreadConfig(perturbation=a.perturbation, directions=a.directions))
    for base, (t, ratio, term) in res.items():
        cells = " ".join(f"{x:6.3f}" for x in ratio)
        print(f"base {base:5.3f} [{term}]  ratio at t={t[0]:.1f}..{t[-1]:.1f}: {cells}")
    worst = min(float(np.min(r[t >= 1.0])) for t, r, _ in res.values())
    print(f"min ratio over t in [1, 5]: {worst:.3f}")


if __name__ == "__main__":
    main()
