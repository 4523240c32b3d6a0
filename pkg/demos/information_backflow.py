"""Trace-distance dynamics and the information-backflow measure.

Two states evolving under the same open dynamics can only get harder to
distinguish while the evolution is divisible; intervals where their trace
distance D(t) grows mark information returning from the environment.  The
measure N_BLP maximizes the accumulated growth over initial state pairs:
a Fibonacci-sphere grid of antipodal pure pairs plus random pairs, refined
by Nelder-Mead over the pair angles.

Run:  python demos/information_backflow.py
"""

import os

import numpy as np

from backflow import GeneratorSpec, ModelParams, blp_measure
from backflow.blp import bloch_map_grid, pair_distance_series
from backflow.plotting import emit_plot

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

params = ModelParams.from_dimensionless(s=1.0, p=10.0, alpha=0.5)
spec = GeneratorSpec("secular", params)

report = blp_measure(spec, T_max=30.0)
print("secular s=1, p=10, alpha=0.5")
print(f"  N_BLP = {report.measure:.6e} after {report.n_evaluations} pair evaluations")
print(f"  best pair Bloch difference (dx, dy, dz) = "
      f"({report.best_deltas[0]:+.3f}, {report.best_deltas[1]:+.3f}, {report.best_deltas[2]:+.3f})")

# The winning pair sits on the poles of the dressed z axis: its distance is
# driven by the population rates, whose negative windows are the deepest.
maps = bloch_map_grid(spec, report.grid)
D_best, sigma_best = pair_distance_series(maps, report.grid, report.best_deltas)
D_eq, sigma_eq = pair_distance_series(maps, report.grid, np.array([2.0, 0.0, 0.0]))
emit_plot(
    [("best pair", report.grid, D_best), ("equatorial pair", report.grid, D_eq)],
    os.path.join(OUT, "trace_distance.svg"),
    title="distinguishability of evolving pairs", xlabel="T", ylabel="D",
)
emit_plot(
    [("best pair", report.grid, sigma_best)],
    os.path.join(OUT, "sigma.svg"),
    title="trace-distance derivative (positive = backflow)", xlabel="T", ylabel="sigma",
)

dt = report.grid[1] - report.grid[0]
eq_value = float(np.clip(sigma_eq, 0.0, None).sum() * dt)
print(f"  equatorial antipodal pair accumulates {eq_value:.6e} -- the polar pair wins")
print(f"\nplots written to {OUT}/")
