"""Time-dependent superoperators of the dressed-basis master equation.

All superoperators are 4x4 complex matrices acting on the column-stacked
vectorization of the 2x2 density matrix: vec(rho) stacks the columns of rho,
so vec(X rho Y) = (Y^T kron X) vec(rho).  One convention everywhere; mixing
conventions is the classic source of transpose bugs.

Regimes and their generators (rates in units of lambda_width, time T):

* ``secular``: -i[(p/2) sigma_z, .] plus the three weighted decay channels
  C+^2 L[sigma_-, gamma_+] + C-^2 L[sigma_+, gamma_-] + C0^2 L[sigma_z, gamma_0].
  Note the pairing: the *plus* rate drives the lowering operator.
* ``full_nonsecular``: the secular generator plus the six cross terms, each of
  the form X rho Y - Y X rho with a complex prefactor
  Gamma_xi = gamma_xi/2 - i lamb_xi, plus the Hermitian conjugate of the whole
  expression.  "Hermitian conjugate" means: for each term X rho Y - Y X rho,
  add Y+ rho X+ - rho X+ Y+ with the conjugated prefactor.  This is the unique
  reading that preserves Hermiticity of rho.
* ``simplified_nonsecular``: the p << 1 reduction to a single decay channel
  with jump operator A = C- sigma_+ + C+ sigma_- + C0 sigma_z (Tr A+A = 1) and
  a coherent correction H'(T) = lamb(T) C0 (C+ - C-) sigma_x, both evaluated at
  the common channel detuning q = s.  At p = 0 the full form's cross terms
  regroup exactly into this single channel plus H'; the test suite enforces
  that identity to machine precision, so any slip in the six-term table
  would surface immediately.
* ``undriven``: bare-basis amplitude damping gamma(t) L[sigma_-] in physical
  time, no Hamiltonian.

A compiled :class:`TimeGenerator` separates the Hamiltonian pieces from the
dissipative ones; the divisibility probe consumes only the dissipative part
(the commutator part contributes exactly zero to it).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .params import ModelParams, UndrivenParams
from .rates import lorentzian_rate, nondriven_rate, rate_table

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # |e><g|
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |g><e|

REGIMES = ("secular", "full_nonsecular", "simplified_nonsecular", "undriven")


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(matrix).T.reshape(-1)


def unvec(vector: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec` for square matrices."""
    vector = np.asarray(vector)
    dim = int(round(np.sqrt(vector.size)))
    return vector.reshape(dim, dim).T


def left_multiply(Z: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> Z rho."""
    return np.kron(I2, Z)


def right_multiply(Z: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> rho Z."""
    return np.kron(np.asarray(Z).T, I2)


def sandwich(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> X rho Y."""
    return np.kron(np.asarray(Y).T, X)


def dissipator(A: np.ndarray, gamma: float = 1.0) -> np.ndarray:
    """Superoperator of gamma (A rho A+ - {A+A, rho}/2); linear in gamma.

    gamma may be negative: temporarily negative rates are the whole point.
    """
    A = np.asarray(A, dtype=complex)
    AdA = A.conj().T @ A
    return gamma * (
        sandwich(A, A.conj().T)
        - 0.5 * left_multiply(AdA)
        - 0.5 * right_multiply(AdA)
    )


def hamiltonian_part(H: np.ndarray) -> np.ndarray:
    """Superoperator of -i[H, rho]; H must be Hermitian to 1e-12."""
    H = np.asarray(H, dtype=complex)
    scale = max(1.0, float(np.abs(H).max()))
    if np.abs(H - H.conj().T).max() > 1e-12 * scale:
        raise ValueError("Hamiltonian is not Hermitian")
    return -1j * (left_multiply(H) - right_multiply(H))


def _cross_term(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Superoperator of X rho Y - Y X rho."""
    return sandwich(X, Y) - left_multiply(Y @ X)


def _cross_term_hc(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Superoperator of the Hermitian conjugate, Y+ rho X+ - rho X+ Y+."""
    Xd, Yd = X.conj().T, Y.conj().T
    return sandwich(Yd, Xd) - right_multiply(Xd @ Yd)


# The six cross terms, grouped by the complex prefactor channel xi that
# multiplies them: (channel, weight name, X, Y) with weight evaluated from the
# coefficients at build time.  Channel order matches RateSample: minus/zero/plus.
def nonsecular_term_table(coeffs) -> list[tuple[str, float, np.ndarray, np.ndarray]]:
    cp, cm, c0 = coeffs.c_plus, coeffs.c_minus, coeffs.c_zero
    return [
        ("minus", cm * c0, SIGMA_PLUS, SIGMA_Z),
        ("minus", cp * cm, SIGMA_PLUS, SIGMA_PLUS),
        ("plus", cp * c0, SIGMA_MINUS, SIGMA_Z),
        ("plus", cp * cm, SIGMA_MINUS, SIGMA_MINUS),
        ("zero", cm * c0, SIGMA_Z, SIGMA_MINUS),
        ("zero", cp * c0, SIGMA_Z, SIGMA_PLUS),
    ]


def _nonsecular_basis(coeffs, table=None):
    """Per-channel constant matrices multiplying gamma_xi and lamb_xi.

    For a term group M with prefactor Gamma = gamma/2 - i lamb plus its
    Hermitian conjugate with conj(Gamma), the rate decomposition is
    (gamma/2)(M + M_hc) - i lamb (M - M_hc); the first bracket is returned in
    ``sym`` (coefficient gamma) and the second in ``asym`` (coefficient lamb).
    """
    sym = {k: np.zeros((4, 4), dtype=complex) for k in ("minus", "zero", "plus")}
    asym = {k: np.zeros((4, 4), dtype=complex) for k in ("minus", "zero", "plus")}
    for channel, weight, X, Y in table if table is not None else nonsecular_term_table(coeffs):
        M = weight * _cross_term(X, Y)
        Mhc = weight * _cross_term_hc(X, Y)
        sym[channel] += 0.5 * (M + Mhc)
        asym[channel] += -1j * (M - Mhc)
    return sym, asym


@dataclass
class TimeGenerator:
    """Compiled generator L(T) = static_ham + sum_j c_j(T) B_j.

    Basis matrices are split into Hamiltonian pieces (commutator form) and
    dissipative pieces; ``coefficients`` maps a time array (N,) to the pair of
    coefficient arrays ((N, n_ham), (N, n_diss)).
    """

    static_ham: np.ndarray
    ham_basis: np.ndarray    # (n_ham, 4, 4)
    diss_basis: np.ndarray   # (n_diss, 4, 4)
    coefficients: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]

    def batch(self, times: np.ndarray) -> np.ndarray:
        """Full generator at each time: (N, 4, 4)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        ham_c, diss_c = self.coefficients(times)
        out = np.broadcast_to(self.static_ham, (times.size, 4, 4)).copy()
        if self.ham_basis.size:
            out += np.einsum("nk,kab->nab", ham_c, self.ham_basis)
        if self.diss_basis.size:
            out += np.einsum("nk,kab->nab", diss_c, self.diss_basis)
        return out

    def dissipative_batch(self, times: np.ndarray) -> np.ndarray:
        """Dissipative part only at each time: (N, 4, 4)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        _, diss_c = self.coefficients(times)
        if not self.diss_basis.size:
            return np.zeros((times.size, 4, 4), dtype=complex)
        return np.einsum("nk,kab->nab", diss_c, self.diss_basis)

    def __call__(self, T: float) -> np.ndarray:
        return self.batch(np.array([T]))[0]

    def dissipative(self, T: float) -> np.ndarray:
        return self.dissipative_batch(np.array([T]))[0]


@dataclass(frozen=True)
class GeneratorSpec:
    """Which generator to build, and from which parameter bundle.

    regime is one of 'secular', 'full_nonsecular', 'simplified_nonsecular'
    (ModelParams, dressed basis, dimensionless time T = lambda_width * t) or
    'undriven' (UndrivenParams, bare basis, physical time).
    """

    regime: str
    params: Union[ModelParams, UndrivenParams]

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}; expected one of {REGIMES}")
        if self.regime == "undriven":
            if not isinstance(self.params, UndrivenParams):
                raise TypeError("undriven regime requires UndrivenParams")
        elif not isinstance(self.params, ModelParams):
            raise TypeError(f"regime {self.regime!r} requires ModelParams")


def _secular_pieces(params: ModelParams):
    c = params.coeffs
    basis = np.stack(
        [
            c.c_plus**2 * dissipator(SIGMA_MINUS),
            c.c_minus**2 * dissipator(SIGMA_PLUS),
            c.c_zero**2 * dissipator(SIGMA_Z),
        ]
    )
    static = hamiltonian_part(0.5 * params.regime.p * SIGMA_Z)
    return static, basis


def compile_generator(spec: GeneratorSpec) -> TimeGenerator:
    """Build the coefficient-decomposed form of L for the requested regime."""
    none = np.zeros((0, 4, 4), dtype=complex)

    if spec.regime == "undriven":
        u = spec.params
        diss = np.stack([dissipator(SIGMA_MINUS)])

        def coeff_und(ts):
            g = np.atleast_1d(nondriven_rate(ts, u.alpha, u.lambda_width))
            return np.zeros((ts.size, 0)), g[:, None]

        return TimeGenerator(
            static_ham=np.zeros((4, 4), dtype=complex),
            ham_basis=none,
            diss_basis=diss,
            coefficients=coeff_und,
        )

    params = spec.params
    s, p, alpha = params.regime.s, params.regime.p, params.reservoir.alpha
    static, sec_basis = _secular_pieces(params)

    if spec.regime == "secular":

        def coeff_sec(ts):
            gammas, _ = rate_table(ts, s, p, alpha)
            # rate_table rows: (minus, zero, plus); basis order: (+, -, 0)
            diss_c = np.stack([gammas[2], gammas[0], gammas[1]], axis=1)
            return np.zeros((ts.size, 0)), diss_c

        return TimeGenerator(static, none, sec_basis, coeff_sec)

    if spec.regime == "simplified_nonsecular":
        c = params.coeffs
        A = c.c_minus * SIGMA_PLUS + c.c_plus * SIGMA_MINUS + c.c_zero * SIGMA_Z
        diss = np.stack([dissipator(A)])
        ham = np.stack([hamiltonian_part(c.c_zero * (c.c_plus - c.c_minus) * SIGMA_X)])

        def coeff_simp(ts):
            g, lam = lorentzian_rate(ts, s, alpha)
            g = np.atleast_1d(g)
            lam = np.atleast_1d(lam)
            return lam[:, None], g[:, None]

        return TimeGenerator(static, ham, diss, coeff_simp)

    # full nonsecular: secular channels plus the six cross terms
    sym, asym = _nonsecular_basis(params.coeffs)
    diss = np.stack(
        [
            sec_basis[0] + sym["plus"],
            sec_basis[1] + sym["minus"],
            sec_basis[2] + sym["zero"],
            asym["plus"],
            asym["minus"],
            asym["zero"],
        ]
    )

    def coeff_full(ts):
        gammas, lambs = rate_table(ts, s, p, alpha)
        diss_c = np.stack(
            [gammas[2], gammas[0], gammas[1], lambs[2], lambs[0], lambs[1]], axis=1
        )
        return np.zeros((ts.size, 0)), diss_c

    return TimeGenerator(static, none, diss, coeff_full)


# ---------------------------------------------------------------------------
# single-time convenience builders
# ---------------------------------------------------------------------------


def secular_generator(T: float, params: ModelParams) -> np.ndarray:
    """L(T) of the strong secular regime (Hamiltonian + three channels)."""
    return compile_generator(GeneratorSpec("secular", params))(T)


def nonsecular_terms(T: float, params: ModelParams, table=None) -> np.ndarray:
    """The six cross terms of the nonsecular dissipator, with their H.c.

    ``table`` overrides the term list (same format as
    :func:`nonsecular_term_table`); the assembly is order-independent.
    """
    s, p, alpha = params.regime.s, params.regime.p, params.reservoir.alpha
    gammas, lambs = rate_table(np.array([T]), s, p, alpha)
    sym, asym = _nonsecular_basis(params.coeffs, table=table)
    by_channel = {"minus": 0, "zero": 1, "plus": 2}
    out = np.zeros((4, 4), dtype=complex)
    for name, row in by_channel.items():
        out += gammas[row, 0] * sym[name] + lambs[row, 0] * asym[name]
    return out


def simplified_nonsecular_generator(T: float, params: ModelParams) -> np.ndarray:
    """Single-channel p << 1 generator: -i[H + H'(T), .] + gamma(T) D[A]."""
    return compile_generator(GeneratorSpec("simplified_nonsecular", params))(T)


def full_generator(T: float, params: ModelParams) -> np.ndarray:
    """Secular generator plus all nonsecular cross terms."""
    return compile_generator(GeneratorSpec("full_nonsecular", params))(T)


def undriven_generator(t: float, params: UndrivenParams) -> np.ndarray:
    """Bare-basis amplitude-damping generator gamma(t) L[sigma_-]."""
    return compile_generator(GeneratorSpec("undriven", params))(t)


def jump_operator(coeffs) -> np.ndarray:
    """The single-channel jump operator A = C- sigma_+ + C+ sigma_- + C0 sigma_z."""
    return (
        coeffs.c_minus * SIGMA_PLUS
        + coeffs.c_plus * SIGMA_MINUS
        + coeffs.c_zero * SIGMA_Z
    )
