"""Integration of d(rho)/dt = L(t) rho and finite-time propagators.

Fixed-step classical RK4 throughout.  The output grid is decoupled from the
integration substep: each grid interval is covered by full substeps of size h
plus one shortened final substep, so the integrator lands exactly on every
requested grid point.  Because the generator is linear, trajectories and
propagators satisfy the same equation; they are nevertheless computed along
two genuinely different arithmetic paths (per-stage state updates vs
accumulated one-step matrices), which makes their agreement a meaningful
solver check rather than a tautology.

For the undriven model with lambda_width < 2 alpha, the decay rate has poles
inside the time axis; RK4 cannot step across them, so grids crossing the
first pole are rejected.  The exact envelope map (see
:func:`undriven_bloch_affine`) remains smooth through the poles and is what
the measure modules use there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .generator import (
    GeneratorSpec,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    I2,
    compile_generator,
    unvec,
    vec,
)
from .params import UndrivenParams
from .rates import PoleError, nondriven_envelope, nondriven_first_pole

#: Default RK4 substep, in the time unit of the chosen regime.
DEFAULT_SUBSTEP = 1e-3

#: Default integration horizon for the driven model (rates are within
#: e^-30 of their asymptotes there, so measure integrals have converged).
DEFAULT_T_MAX = 30.0

_PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])


class IntegrationError(RuntimeError):
    """Integration produced a state outside tolerance."""


@dataclass(frozen=True, eq=False)
class QubitState:
    """2x2 density matrix with a Bloch-vector view.

    Validates Hermiticity and unit trace to 1e-10, positivity to -1e-8.
    """

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError(f"density matrix must be 2x2, got shape {rho.shape}")
        if np.abs(rho - rho.conj().T).max() > 1e-10:
            raise ValueError("density matrix is not Hermitian")
        if abs(rho.trace() - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace is {rho.trace():.12g}, not 1")
        if np.linalg.eigvalsh(rho).min() < -1e-8:
            raise ValueError("density matrix has a negative eigenvalue")
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_bloch(cls, x: float, y: float, z: float) -> "QubitState":
        r2 = x * x + y * y + z * z
        if r2 > 1.0 + 1e-8:
            raise ValueError(f"Bloch vector has norm {np.sqrt(r2):.6g} > 1")
        return cls(0.5 * (I2 + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z))

    @classmethod
    def excited(cls) -> "QubitState":
        return cls.from_bloch(0.0, 0.0, 1.0)

    @classmethod
    def ground(cls) -> "QubitState":
        return cls.from_bloch(0.0, 0.0, -1.0)

    @property
    def bloch(self) -> np.ndarray:
        return np.real(np.einsum("kab,ba->k", _PAULI, self.rho))

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States on an increasing time grid; the first state is rho0 exactly."""

    grid: np.ndarray
    rhos: np.ndarray  # (N, 2, 2)
    spec: GeneratorSpec | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size < 1:
            raise ValueError("grid must be a nonempty 1-d array")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "rhos", np.asarray(self.rhos, dtype=complex))

    def __len__(self) -> int:
        return self.grid.size

    @property
    def bloch(self) -> np.ndarray:
        return np.real(np.einsum("kab,nba->nk", _PAULI, self.rhos))

    def state(self, i: int) -> QubitState:
        return QubitState(self.rhos[i])


def _integration_plan(grid: np.ndarray, substep: float):
    """Substep start times, sizes, and the substep index ending each grid point."""
    if substep <= 0:
        raise ValueError("substep must be positive")
    starts, sizes, grid_marks = [], [], []
    for k in range(grid.size - 1):
        t0, t1 = grid[k], grid[k + 1]
        d = t1 - t0
        n_full = int(np.floor(d / substep + 1e-12))
        rem = d - n_full * substep
        steps = [substep] * n_full
        if rem > 1e-12 * max(substep, d):
            steps.append(rem)
        elif n_full == 0:
            steps.append(d)
        acc = t0
        for hstep in steps:
            starts.append(acc)
            sizes.append(hstep)
            acc += hstep
        grid_marks.append(len(starts))
    return np.asarray(starts), np.asarray(sizes), grid_marks


def _check_pole_free(spec: GeneratorSpec, t_end: float):
    if spec.regime != "undriven":
        return
    pole = nondriven_first_pole(spec.params.alpha, spec.params.lambda_width)
    if pole is not None and t_end >= pole:
        raise PoleError(
            f"grid extends to t={t_end:.6g}, past the first rate pole at "
            f"t={pole:.6g}; stop the grid before it or use the closed-form "
            "undriven map"
        )


def _stage_generators(spec: GeneratorSpec, starts, sizes):
    gen = compile_generator(spec)
    L_start = gen.batch(starts)
    L_mid = gen.batch(starts + sizes / 2.0)
    L_end = gen.batch(starts + sizes)
    return L_start, L_mid, L_end


def evolve(
    rho0: QubitState,
    spec: GeneratorSpec,
    grid,
    substep: float = DEFAULT_SUBSTEP,
    renormalize: bool = True,
) -> Trajectory:
    """Integrate the master equation from rho0 over the grid.

    Emitted states are re-symmetrized and trace-renormalized at output points
    (set renormalize=False to observe the raw integrator drift).  A negative
    eigenvalue beyond 1e-6 aborts with the offending time.
    """
    grid = np.asarray(grid, dtype=float)
    if grid[0] != 0.0:
        raise ValueError("trajectory grid must start at 0")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    _check_pole_free(spec, grid[-1])

    starts, sizes, marks = _integration_plan(grid, substep)
    L_start, L_mid, L_end = _stage_generators(spec, starts, sizes)

    out = np.empty((grid.size, 2, 2), dtype=complex)
    out[0] = rho0.rho
    v = vec(rho0.rho).astype(complex)
    next_mark = 0
    for j in range(starts.size):
        h = sizes[j]
        k1 = L_start[j] @ v
        k2 = L_mid[j] @ (v + 0.5 * h * k1)
        k3 = L_mid[j] @ (v + 0.5 * h * k2)
        k4 = L_end[j] @ (v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if next_mark < len(marks) and j + 1 == marks[next_mark]:
            rho = unvec(v)
            rho = 0.5 * (rho + rho.conj().T)
            tr = np.real(rho.trace())
            low = float(np.linalg.eigvalsh(rho).min())
            if low < -1e-6:
                raise IntegrationError(
                    f"positivity violated at t={grid[next_mark + 1]:.6g}: "
                    f"min eigenvalue {low:.3e}"
                )
            if renormalize:
                rho = rho / tr
                v = vec(rho)
            out[next_mark + 1] = rho
            next_mark += 1
    return Trajectory(grid=grid, rhos=out, spec=spec)


def propagator_grid(spec: GeneratorSpec, grid, substep: float = DEFAULT_SUBSTEP) -> np.ndarray:
    """Propagators Phi(t_k, grid[0]) at every grid point: (N, 4, 4).

    Built from batched one-step RK4 matrices accumulated in sequence.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 1 or np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise ValueError("grid must be increasing and start at t >= 0")
    _check_pole_free(spec, grid[-1])

    out = np.empty((grid.size, 4, 4), dtype=complex)
    out[0] = np.eye(4)
    if grid.size == 1:
        return out

    starts, sizes, marks = _integration_plan(grid, substep)
    L_start, L_mid, L_end = _stage_generators(spec, starts, sizes)

    eye = np.broadcast_to(np.eye(4, dtype=complex), L_start.shape)
    h = sizes[:, None, None]
    K1 = L_start
    K2 = L_mid @ (eye + 0.5 * h * K1)
    K3 = L_mid @ (eye + 0.5 * h * K2)
    K4 = L_end @ (eye + h * K3)
    steps = eye + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4)

    M = np.eye(4, dtype=complex)
    next_mark = 0
    for j in range(starts.size):
        M = steps[j] @ M
        if next_mark < len(marks) and j + 1 == marks[next_mark]:
            out[next_mark + 1] = M
            next_mark += 1
    return out


def propagator(spec: GeneratorSpec, t0: float, t1: float, substep: float = DEFAULT_SUBSTEP) -> np.ndarray:
    """Single propagator Phi(t1, t0) as a 4x4 superoperator matrix."""
    if not 0 <= t0 <= t1:
        raise ValueError(f"need 0 <= t0 <= t1, got t0={t0}, t1={t1}")
    if t0 == t1:
        return np.eye(4, dtype=complex)
    return propagator_grid(spec, np.array([t0, t1]), substep=substep)[1]


def bloch_linear_grid(props: np.ndarray) -> np.ndarray:
    """Linear Bloch-map parts R(t) of propagators: (N, 3, 3), real.

    Differences of Bloch vectors evolve as delta(t) = R(t) delta(0); the
    affine offset cancels for state pairs.
    """
    props = np.asarray(props)
    images = np.einsum("nab,kb->nka", props, np.stack([vec(s) for s in _PAULI]))
    mats = images.reshape(props.shape[0], 3, 2, 2).transpose(0, 1, 3, 2)
    return 0.5 * np.real(np.einsum("iab,njba->nij", _PAULI, mats))


def undriven_bloch_affine(params: UndrivenParams, grid) -> tuple[np.ndarray, np.ndarray]:
    """Exact Bloch map of the undriven model: linear parts (N,3,3) and offsets (N,3).

    Coherences scale by the envelope G(t), the population by E = G^2 with
    fixed point at the ground state: r(t) = diag(G, G, E) r(0) + (0, 0, E - 1).
    Smooth through the rate poles, so it works on any grid.
    """
    grid = np.asarray(grid, dtype=float)
    G = np.atleast_1d(nondriven_envelope(grid, params.alpha, params.lambda_width))
    E = G * G
    lin = np.zeros((grid.size, 3, 3))
    lin[:, 0, 0] = G
    lin[:, 1, 1] = G
    lin[:, 2, 2] = E
    off = np.zeros((grid.size, 3))
    off[:, 2] = E - 1.0
    return lin, off


def undriven_trajectory(rho0: QubitState, params: UndrivenParams, grid) -> Trajectory:
    """Exact trajectory of the undriven model via the envelope map."""
    grid = np.asarray(grid, dtype=float)
    lin, off = undriven_bloch_affine(params, grid)
    r = np.einsum("nij,j->ni", lin, rho0.bloch) + off
    rhos = 0.5 * (
        np.broadcast_to(I2, (grid.size, 2, 2))
        + np.einsum("nk,kab->nab", r, _PAULI)
    )
    rhos = np.array(rhos)
    rhos[0] = rho0.rho
    return Trajectory(grid=grid, rhos=rhos, spec=GeneratorSpec("undriven", params))
