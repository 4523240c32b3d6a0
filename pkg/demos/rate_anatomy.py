"""Anatomy of the time-dependent decay rates.

The driven qubit in a Lorentzian reservoir has three decay channels whose
rates depend on the channel detunings q = s - xi * p.  Each rate starts at
zero, oscillates while the reservoir memory lasts (a few units of T), and
settles on a positive asymptote.  The oscillation can momentarily push a
rate below zero -- that is where all the memory effects studied in the other
demos come from.

Run:  python demos/rate_anatomy.py
"""

import os

import numpy as np

from backflow import lorentzian_rate, negativity_threshold_s, nondriven_rate
from backflow.rates import nondriven_first_pole
from backflow.plotting import emit_plot

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

T = np.linspace(0.0, 12.0, 1201)

# --- 1. the detuning knob -------------------------------------------------
# Small q: the rate rises monotonically to its asymptote.  Large q: it rings,
# and once |q| passes the threshold near 3.6 it dips below zero.
series = []
for q in (0.0, 2.0, 4.0, 6.0):
    gamma, _ = lorentzian_rate(T, q, 1.0)
    series.append((f"q = {q:g}", T, gamma))
emit_plot(series, os.path.join(OUT, "rates_vs_q.svg"),
          title="decay rate vs channel detuning", xlabel="T", ylabel="gamma")

s_star = negativity_threshold_s()
print(f"negativity threshold: rates first dip below zero at q = {s_star:.4f}")

for q in (2.0, 4.0, 6.0):
    gamma, _ = lorentzian_rate(np.linspace(0, 30, 30001), q, 1.0)
    print(f"  q = {q:g}: min gamma = {gamma.min():+.5f}")

# --- 2. the undriven qubit has its own rate -------------------------------
# Resonant with the Lorentzian center and undriven, the qubit's single decay
# rate is a closed expression in physical time.  Weak coupling
# (lambda > 2 alpha): smooth and nonnegative.  Strong coupling: the rate
# diverges where the decay envelope crosses zero and is negative just after,
# which is the memory window.
t = np.linspace(0.0, 8.0, 801)
weak = nondriven_rate(t, 0.4, 1.0)
print(f"\nundriven, alpha=0.4 (weak): min gamma = {weak.min():+.5f} -> Markovian")

pole = nondriven_first_pole(1.0, 1.0)
print(f"undriven, alpha=1.0 (strong): first rate pole at t = {pole:.4f}")
before = np.linspace(0.0, 0.98 * pole, 400)
after = np.linspace(1.02 * pole, 8.0, 400)
emit_plot(
    [
        ("alpha = 0.4", t, weak),
        ("alpha = 1.0 (before pole)", before, nondriven_rate(before, 1.0, 1.0)),
        ("alpha = 1.0 (after pole)", after, nondriven_rate(after, 1.0, 1.0)),
    ],
    os.path.join(OUT, "undriven_rate.svg"),
    title="undriven decay rate", xlabel="t", ylabel="gamma",
)
print(f"\nplots written to {OUT}/")
