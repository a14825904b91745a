#!/usr/bin/env python3
"""Shoot a small gallery of radial trajectories and plot them.

Writes one CSV and one SVG per sample into ./radial-out: the critical bubble
(no zero), a few subcritical pairs (finite first zeros), and one asymmetric
pair illustrating the component comparison.
"""

import os
import sys

from lecert import radial

SAMPLES = [
    ("critical-bubble", dict(n=3, p=5, q=5, u0=1.0, v0=1.0, r_max=10.0)),
    ("subcritical-n5", dict(n=5, p=2, q=2, u0=1.0, v0=1.0, r_max=50.0)),
    ("subcritical-n4", dict(n=4, p=3, q=3, u0=1.0, v0=1.0, r_max=50.0)),
    ("asymmetric-n5", dict(n=5, p=3, q=2, u0=1.0, v0=0.9, r_max=50.0)),
]


def main() -> int:
    outdir = "radial-out"
    os.makedirs(outdir, exist_ok=True)
    for name, kw in SAMPLES:
        traj = radial.shoot(**kw)
        radial.save_csv(traj, os.path.join(outdir, f"{name}.csv"))
        radial.save_svg(traj, os.path.join(outdir, f"{name}.svg"))
        info = radial.classify(kw["n"], kw["p"], kw["q"])
        print(f"{name}: class={info['class']}, first_zero={traj.first_zero}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
