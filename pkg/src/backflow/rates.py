"""Time-dependent decay and shift rates.

Driven qubit, Lorentzian reservoir.  With T = lambda_width * t and
q = s - xi * p for the channel xi in {-1, 0, +1}, the decay rate gamma and the
shift rate lamb (both in units of lambda_width) are

    gamma(T) = alpha^2 / (2 (1 + q^2)) * (1 - e^-T cos qT + q e^-T sin qT)
    lamb(T)  = alpha^2 / (1 + q^2)     * (-q + q e^-T cos qT + e^-T sin qT)

Both vanish at T = 0 and converge exponentially to their asymptotes
gamma_inf = alpha^2 / (2 (1 + q^2)) and lamb_inf = -alpha^2 q / (1 + q^2).
gamma develops transiently negative windows once |q| exceeds a threshold
near 3.6 (located numerically by :func:`negativity_threshold_s`).

Undriven resonant qubit (bare basis, physical time t; alpha carries units of
rate in this parameterization, which is kept separate from the driven one):

    gamma(t) = 2 alpha lam sinh(d t / 2) / (d cosh(d t / 2) + lam sinh(d t / 2))

with d = sqrt(lam^2 - 2 alpha lam).  For lam < 2 alpha, d is imaginary, the
expression continues to trigonometric functions, and the denominator has
zeros: gamma has poles and negative windows, the dynamics is non-Markovian.
The underlying decay envelope

    G(t) = e^{-lam t / 2} [cosh(d t / 2) + (lam / d) sinh(d t / 2)]

stays smooth through those poles (gamma = -2 G'/G), and is what the exact
undriven state map is built from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class PoleError(ArithmeticError):
    """Raised when the undriven rate is evaluated at (or too close to) a pole."""


#: Relative tolerance below which a denominator counts as a pole hit.
POLE_RTOL = 1e-9


def lorentzian_rate(T, q: float, alpha: float):
    """Decay and shift rate pair (gamma, lamb) at dimensionless time T.

    T may be a scalar or an array; the rates are returned in units of
    lambda_width.  T < 0 raises ValueError.
    """
    T = np.asarray(T, dtype=float)
    if np.any(T < 0):
        raise ValueError("dimensionless time T must be nonnegative")
    env = np.exp(-T)
    c = np.cos(q * T)
    s = np.sin(q * T)
    gamma = alpha**2 / (2.0 * (1.0 + q**2)) * (1.0 - env * c + q * env * s)
    lamb = alpha**2 / (1.0 + q**2) * (-q + q * env * c + env * s)
    if gamma.ndim == 0:
        return float(gamma), float(lamb)
    return gamma, lamb


def gamma_asymptote(q: float, alpha: float) -> float:
    return alpha**2 / (2.0 * (1.0 + q**2))


def lamb_asymptote(q: float, alpha: float) -> float:
    return -(alpha**2) * q / (1.0 + q**2)


@dataclass(frozen=True)
class QTriple:
    """Per-channel detunings q_xi = s - xi * p for xi in {-1, 0, +1}."""

    q_minus: float
    q_zero: float
    q_plus: float

    @classmethod
    def from_regime(cls, s: float, p: float) -> "QTriple":
        return cls(q_minus=s + p, q_zero=s, q_plus=s - p)


@dataclass(frozen=True)
class RateSample:
    """All six channel rates at one dimensionless time, in units of lambda_width."""

    T: float
    gamma_minus: float
    gamma_zero: float
    gamma_plus: float
    lamb_minus: float
    lamb_zero: float
    lamb_plus: float

    @property
    def gamma(self) -> tuple[float, float, float]:
        return (self.gamma_minus, self.gamma_zero, self.gamma_plus)

    @property
    def lamb(self) -> tuple[float, float, float]:
        return (self.lamb_minus, self.lamb_zero, self.lamb_plus)


def rate_sample(T: float, s: float, p: float, alpha: float) -> RateSample:
    """Evaluate all three channels at one time."""
    q = QTriple.from_regime(s, p)
    gm, lm = lorentzian_rate(T, q.q_minus, alpha)
    g0, l0 = lorentzian_rate(T, q.q_zero, alpha)
    gp, lp = lorentzian_rate(T, q.q_plus, alpha)
    return RateSample(
        T=float(T),
        gamma_minus=gm,
        gamma_zero=g0,
        gamma_plus=gp,
        lamb_minus=lm,
        lamb_zero=l0,
        lamb_plus=lp,
    )


def rate_table(T, s: float, p: float, alpha: float):
    """Vectorized rates on a time grid: two (3, len(T)) arrays (gamma, lamb).

    Channel order is (minus, zero, plus), matching :class:`RateSample`.
    """
    q = QTriple.from_regime(s, p)
    T = np.atleast_1d(np.asarray(T, dtype=float))
    gammas = np.empty((3, T.size))
    lambs = np.empty((3, T.size))
    for row, qx in enumerate((q.q_minus, q.q_zero, q.q_plus)):
        gammas[row], lambs[row] = lorentzian_rate(T, qx, alpha)
    return gammas, lambs


def negativity_threshold_s(
    t_max: float = 50.0,
    t_step: float = 1e-3,
    bracket: tuple[float, float] = (0.0, 6.0),
    s_tol: float = 1e-4,
) -> float:
    """Smallest s >= 0 for which gamma(T; q=s) dips below zero somewhere.

    Bisection on s with a dense T scan inside; the sign of gamma does not
    depend on alpha, so alpha = 1 is used.  The known answer is near 3.6.
    """
    Ts = np.arange(0.0, t_max, t_step)

    def goes_negative(s: float) -> bool:
        gamma, _ = lorentzian_rate(Ts, s, 1.0)
        return bool(gamma.min() < 0.0)

    lo, hi = bracket
    if goes_negative(lo):
        return lo
    if not goes_negative(hi):
        raise ValueError(f"no sign change inside bracket {bracket}")
    while hi - lo > s_tol:
        mid = 0.5 * (lo + hi)
        if goes_negative(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# undriven resonant qubit
# ---------------------------------------------------------------------------


def _d_param(alpha: float, lambda_width: float) -> complex:
    return np.sqrt(complex(lambda_width**2 - 2.0 * alpha * lambda_width))


def nondriven_rate(t, alpha: float, lambda_width: float):
    """Decay rate gamma(t) of the undriven resonant qubit.

    For lambda_width < 2 alpha the rate is evaluated through the trigonometric
    continuation and has poles where the denominator vanishes; evaluation
    within POLE_RTOL (relative) of a zero raises PoleError.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time t must be nonnegative")
    lam = lambda_width
    d = _d_param(alpha, lam)
    if d == 0:
        # removable d -> 0 limit
        gamma = 2.0 * alpha * lam * t / (2.0 + lam * t)
        return float(gamma) if gamma.ndim == 0 else gamma
    sh = np.sinh(d * t / 2.0)
    ch = np.cosh(d * t / 2.0)
    den = d * ch + lam * sh
    scale = np.abs(d) * np.abs(ch) + lam * np.abs(sh)
    if np.any(np.abs(den) <= POLE_RTOL * scale):
        bad = np.atleast_1d(t)[np.atleast_1d(np.abs(den) <= POLE_RTOL * scale)]
        raise PoleError(f"rate evaluated at a pole of the undriven model, t={bad[0]:.9g}")
    gamma = np.real(2.0 * alpha * lam * sh / den)
    return float(gamma) if gamma.ndim == 0 else gamma


def nondriven_envelope(t, alpha: float, lambda_width: float):
    """Decay envelope G(t) with G(0) = 1; excited population decays as G^2.

    Real for all t; crosses zero exactly at the poles of the rate when
    lambda_width < 2 alpha.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time t must be nonnegative")
    lam = lambda_width
    d = _d_param(alpha, lam)
    if d == 0:
        G = np.exp(-lam * t / 2.0) * (1.0 + lam * t / 2.0)
    else:
        G = np.real(
            np.exp(-lam * t / 2.0)
            * (np.cosh(d * t / 2.0) + (lam / d) * np.sinh(d * t / 2.0))
        )
    return float(G) if G.ndim == 0 else G


def nondriven_envelope_derivative(t, alpha: float, lambda_width: float):
    """dG/dt of the decay envelope; stays finite through the rate poles."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time t must be nonnegative")
    lam = lambda_width
    d = _d_param(alpha, lam)
    if d == 0:
        Gp = -np.exp(-lam * t / 2.0) * lam**2 * t / 4.0
    else:
        Gp = np.real(
            -(alpha * lam / d) * np.exp(-lam * t / 2.0) * np.sinh(d * t / 2.0)
        )
    return float(Gp) if Gp.ndim == 0 else Gp


def nondriven_first_pole(alpha: float, lambda_width: float) -> float | None:
    """Time of the first rate pole, or None when lambda_width >= 2 alpha."""
    lam = lambda_width
    if lam >= 2.0 * alpha:
        return None
    dd = math.sqrt(2.0 * alpha * lam - lam**2)
    return (2.0 / dd) * (math.pi - math.atan(dd / lam))
