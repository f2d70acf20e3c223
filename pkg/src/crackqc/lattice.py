"""Full-chain assembly, Newton solving, reconstruction, and the oracle.

The semi-infinite chain is truncated at index j_max, far enough beyond the
crack tip n that the bonded-region decay max(|z1|, |z2|)^(j_max - n) is
negligible.  Truncation uses two closure rows enforcing the bonded-region
recursion u_j = alpha u_{j-2} + beta u_{j-1} at j = j_max - 1 and j_max,
which is exact for the semi-infinite solution, so no clamping error enters.

Force residuals are assembled directly from the equilibrium equations
of each model; energies are assembled from independently derived pair-term
lists.  The two constructions are checked against each other by the
finite-difference gradient tests, which is why neither is generated from
the other here.

`oracle_coefficients` extracts (kappa, eta) by pure linear algebra: delete
the tip row, prescribe u_n, solve the remaining linear system for the unit
responses to u_n and P, and evaluate the tip-row stencil on each response.
It never touches the closed-form kernels, so it is an independent oracle
for everything in `effective`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse import csc_matrix, lil_matrix
from scipy.sparse.linalg import splu

from .effective import EffectiveCoefficients, ModelKind
from .kernels import HyperbolicKernel
from .material import (MaterialParams, bonded_region_roots,
                       characteristic_roots, force_law)

RESIDUAL_TOL = 1e-12
MAX_ITERATIONS = 50
MAX_HALVINGS = 20
TAIL_DECAY_TARGET = 1e-14
TAIL_MIN = 30
TAIL_MAX = 400


class SingularJacobianError(RuntimeError):
    """Jacobian factorization hit a (near-)zero pivot; expected at folds."""

    def __init__(self, pivot_index: int, pivot_value: float):
        super().__init__(
            f"singular Jacobian: pivot {pivot_value:.3e} at row {pivot_index}")
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value


class ConvergenceError(RuntimeError):
    """Newton iteration failed to reach the residual tolerance."""


def _kappa2_zero_root(params: MaterialParams) -> float:
    """Decaying root of the second-order bonded recurrence when kappa2 = 0:
    kappa1 z^2 - 2 (kappa1 + kappa3) z + kappa1 = 0, |z| < 1."""
    k1, k3 = params.kappa1, params.kappa3
    b = -2 * (k1 + k3)
    disc = b * b - 4 * k1 * k1
    q = -(b - math.sqrt(disc)) / 2
    r1, r2 = q / k1, k1 / q
    return r1 if abs(r1) <= abs(r2) else r2


def default_tail(params: MaterialParams) -> int:
    """Smallest J with max-bonded-root^J <= 1e-14, clamped to [30, 400]."""
    if params.kappa2 == 0:
        zmax = abs(_kappa2_zero_root(params))
    else:
        z1, z2 = bonded_region_roots(params)
        zmax = max(abs(z1), abs(z2))
    if zmax <= 0:
        return TAIL_MIN
    j = int(math.ceil(math.log(TAIL_DECAY_TARGET) / math.log(zmax)))
    return min(max(j, TAIL_MIN), TAIL_MAX)


@dataclass(frozen=True)
class ChainConfig:
    """Truncated-chain layout for one model; build with `chain_config`."""

    params: MaterialParams
    model: ModelKind
    n: int
    m: Optional[int]
    j_max: int


def chain_config(params: MaterialParams, model: ModelKind, n: int,
                 m: Optional[int] = None,
                 j_max: Optional[int] = None) -> ChainConfig:
    """Validate index ordering per model stencil and fill the default tail."""
    if model is ModelKind.EXACT:
        if n < 2:
            raise ValueError(f"exact assembly requires n >= 2, got n={n}")
        m = None
    else:
        if m is None:
            raise ValueError(f"{model.value} requires an interface index m")
        if model is ModelKind.QC and not (3 <= m and m + 2 <= n):
            raise ValueError(
                f"QC assembly requires 3 <= m and n >= m + 2, got m={m}, n={n}")
        if model is ModelKind.QQC and not (2 <= m < n):
            raise ValueError(
                f"QQC assembly requires 2 <= m < n, got m={m}, n={n}")
        if model is ModelKind.FQC and not (1 <= m < n):
            raise ValueError(
                f"FQC assembly requires 1 <= m < n, got m={m}, n={n}")
    if j_max is None:
        j_max = n + default_tail(params)
    if j_max < n + 5:
        raise ValueError(f"j_max={j_max} leaves no bonded tail beyond n={n}")
    return ChainConfig(params, model, n, m, j_max)


@dataclass
class DisplacementField:
    """Vertical displacements u_0 .. u_{j_max} under tip-chain load P."""

    u: np.ndarray
    P: float


@dataclass(frozen=True)
class ReconstructionCoefficients:
    """Crack-region ansatz u_j = a + b j + c cosh[j delta] + d sinh[j delta]
    plus the seed pair that generates the bonded region recursively."""

    a: float
    b: float
    c: float
    d: float
    seed: Tuple[float, float]


def _closure_rows(config: ChainConfig, a_mat: lil_matrix):
    """Bonded-recursion closure in the last row(s)."""
    params = config.params
    jm = config.j_max
    if params.kappa2 == 0:
        zeta = _kappa2_zero_root(params)
        a_mat[jm, jm] = 1.0
        a_mat[jm, jm - 1] = -zeta
        return
    roots = characteristic_roots(params)
    for j in (jm - 1, jm):
        a_mat[j, j] = 1.0
        a_mat[j, j - 1] = -roots.beta
        a_mat[j, j - 2] = -roots.alpha


def _add(a_mat: lil_matrix, row: int, entries):
    for col, val in entries:
        a_mat[row, col] += val


def linear_system(config: ChainConfig):
    """(A, p) with residual = A u + p P + F(u_n) e_n for the config's model.

    Every row is the model's equilibrium equation at that site; the tip
    nonlinearity is excluded (callers add F(u_n) to row n themselves).
    """
    params = config.params
    k1, k2, kbar, k3 = (params.kappa1, params.kappa2,
                        params.kappa_bar, params.kappa3)
    n, m, jm = config.n, config.m, config.j_max
    size = jm + 1
    a_mat = lil_matrix((size, size))
    p_vec = np.zeros(size)

    def la_row(j):
        _add(a_mat, j, [(j + 1, k1), (j, -2 * k1), (j - 1, k1)])
        if k2 != 0:
            _add(a_mat, j, [(j + 2, k2), (j, -2 * k2), (j - 2, k2)])

    def cont_row(j):
        _add(a_mat, j, [(j + 1, kbar), (j, -2 * kbar), (j - 1, kbar)])

    if config.model is ModelKind.EXACT:
        _add(a_mat, 0, [(1, k1), (0, -k1), (2, k2), (0, -k2)])
        p_vec[0] = 1.0
        _add(a_mat, 1, [(2, k1), (1, -2 * k1), (0, k1), (3, k2), (1, -k2)])
        atom_start = 2
    else:
        _add(a_mat, 0, [(1, kbar), (0, -kbar)])
        p_vec[0] = 1.0
        if config.model is ModelKind.QC:
            for j in range(1, m - 1):
                cont_row(j)
            _add(a_mat, m - 1, [(m - 2, kbar), (m - 1, -(2 * k1 + 17 * k2 / 2)),
                                (m, kbar), (m + 1, k2 / 2)])
            _add(a_mat, m, [(m - 1, kbar), (m, -(2 * k1 + 5 * k2)),
                            (m + 1, k1), (m + 2, k2)])
            _add(a_mat, m + 1, [(m - 1, k2 / 2), (m, k1),
                                (m + 1, -(2 * k1 + 3 * k2 / 2)),
                                (m + 2, k1), (m + 3, k2)])
            atom_start = m + 2
        elif config.model is ModelKind.QQC:
            for j in range(1, m - 1):
                cont_row(j)
            _add(a_mat, m - 1, [(m - 2, kbar), (m - 1, -kbar),
                                (m, k1 + 2 * k2), (m - 1, -(k1 + 2 * k2)),
                                (m + 1, k2), (m - 1, -k2)])
            _add(a_mat, m, [(m - 1, k1 + 2 * k2), (m, -(k1 + 2 * k2)),
                            (m + 1, k1), (m, -k1), (m + 2, k2), (m, -k2)])
            atom_start = m + 1
        else:
            for j in range(1, m + 1):
                cont_row(j)
            atom_start = m + 1

    for j in range(atom_start, n + 1):
        la_row(j)
    bonded_stop = jm - 1 if params.kappa2 == 0 else jm - 2
    for j in range(n + 1, bonded_stop + 1):
        la_row(j)
        a_mat[j, j] += -2 * k3
    _closure_rows(config, a_mat)
    return csc_matrix(a_mat), p_vec


def assemble_residual(config: ChainConfig,
                      field: DisplacementField) -> np.ndarray:
    """Left-hand sides of every equilibrium row at the given field."""
    u = np.asarray(field.u, dtype=float)
    if u.shape != (config.j_max + 1,):
        raise ValueError(
            f"field length {u.shape[0]} does not match j_max={config.j_max}")
    a_mat, p_vec = linear_system(config)
    residual = a_mat @ u + p_vec * field.P
    residual[config.n] += force_law(config.params).force(u[config.n])
    return residual


def _energy_pairs(config: ChainConfig):
    """(coefficient, i, j) list with energy Sum c (u_j - u_i)^2."""
    params = config.params
    k1, k2, kbar = params.kappa1, params.kappa2, params.kappa_bar
    m, jm = config.m, config.j_max
    pairs: List[Tuple[float, int, int]] = []
    if config.model is ModelKind.EXACT:
        pairs += [(k1 / 2, j, j + 1) for j in range(jm)]
        pairs += [(k2 / 2, j, j + 2) for j in range(jm - 1)]
        return pairs
    pairs += [(kbar / 2, j, j + 1) for j in range(m - 1)]
    if config.model is ModelKind.QC:
        pairs.append((k1 / 2 + 2 * k2, m - 1, m))
        pairs.append((k2 / 4, m - 1, m + 1))
    else:
        pairs.append((k1 / 2 + k2, m - 1, m))
        pairs.append((k2 / 2, m - 1, m + 1))
    pairs.append((k1 / 2, m, m + 1))
    pairs.append((k2 / 2, m, m + 2))
    pairs += [(k1 / 2, j, j + 1) for j in range(m + 1, jm)]
    pairs += [(k2 / 2, j, j + 2) for j in range(m + 1, jm - 1)]
    return pairs


def assemble_energy(config: ChainConfig, field: DisplacementField) -> float:
    """Total energy for Exact, QC, or QQC; FQC has no associated energy.

    Includes -P u_0, the pair terms, the broken-bond surface constant
    2 n gamma0 plus the tip bond's gamma(u_n), and the vertical quadratic
    terms kappa3 u_j^2 beyond the tip.  Its gradient in u_j reproduces
    minus the assembled residual for every row not touching the truncation
    closure.
    """
    if not config.model.has_energy:
        raise ValueError("FQC is force-based and has no associated energy")
    u = np.asarray(field.u, dtype=float)
    if u.shape != (config.j_max + 1,):
        raise ValueError(
            f"field length {u.shape[0]} does not match j_max={config.j_max}")
    law = force_law(config.params)
    n = config.n
    total = -field.P * u[0]
    for coef, i, j in _energy_pairs(config):
        diff = u[j] - u[i]
        total += coef * diff * diff
    total += config.params.kappa3 * float(np.sum(u[n + 1:] ** 2))
    total += 2 * n * law.gamma0 + law.surface_energy(u[n])
    return total


def _factorize(matrix: csc_matrix):
    try:
        lu = splu(matrix)
    except RuntimeError as exc:
        raise SingularJacobianError(-1, 0.0) from exc
    diag = np.abs(lu.U.diagonal())
    scale = diag.max()
    worst = int(np.argmin(diag))
    if diag[worst] <= 1e-13 * scale:
        raise SingularJacobianError(worst, float(diag[worst]))
    return lu


def newton_solve(config: ChainConfig, P: float,
                 u_init: Optional[DisplacementField] = None,
                 return_history: bool = False):
    """Newton iteration with analytic Jacobian and residual-norm halving.

    Converges when the max-norm residual drops below 1e-12 (1 + |P|).
    Raises SingularJacobianError at a (near-)zero pivot and
    ConvergenceError after 50 iterations.
    """
    size = config.j_max + 1
    if u_init is None:
        u = np.zeros(size)
    else:
        u = np.array(u_init.u, dtype=float)
        if u.shape != (size,):
            raise ValueError("u_init length does not match config")
    law = force_law(config.params)
    a_mat, p_vec = linear_system(config)
    n = config.n
    tol = RESIDUAL_TOL * (1 + abs(P))
    history = []

    def residual_of(vec):
        r = a_mat @ vec + p_vec * P
        r[n] += law.force(vec[n])
        return r

    residual = residual_of(u)
    norm = float(np.max(np.abs(residual)))
    history.append(norm)
    for _ in range(MAX_ITERATIONS):
        if norm <= tol:
            field = DisplacementField(u=u, P=P)
            return (field, history) if return_history else field
        jac = a_mat.tolil(copy=True)
        jac[n, n] += law.force_derivative(u[n])
        lu = _factorize(csc_matrix(jac))
        step = lu.solve(-residual)
        scale = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = u + scale * step
            trial_res = residual_of(trial)
            trial_norm = float(np.max(np.abs(trial_res)))
            if trial_norm < norm or norm <= tol:
                break
            scale /= 2
        u, residual, norm = trial, trial_res, trial_norm
        history.append(norm)
    if norm <= tol:
        field = DisplacementField(u=u, P=P)
        return (field, history) if return_history else field
    raise ConvergenceError(
        f"no convergence after {MAX_ITERATIONS} iterations; "
        f"residual norm {norm:.3e}")


def oracle_coefficients(config: ChainConfig) -> EffectiveCoefficients:
    """(kappa, eta) extracted from the assembled chain by linear algebra.

    Deletes the tip row, prescribes u_n, solves the remaining system for the
    unit responses to (u_n = 1, P = 0) and (u_n = 0, P = 1), and evaluates
    the tip-row stencil on each response: the tip equation then reads
    F(u_n) + kappa u_n + eta P = 0 by linearity.
    """
    a_mat, p_vec = linear_system(config)
    n = config.n
    tip_row = a_mat[n, :].toarray().ravel()
    reduced = a_mat.tolil(copy=True)
    reduced[n, :] = 0.0
    reduced[n, n] = 1.0
    lu = _factorize(csc_matrix(reduced))

    rhs_u = np.zeros(config.j_max + 1)
    rhs_u[n] = 1.0
    resp_u = lu.solve(rhs_u)
    rhs_p = -p_vec.copy()
    rhs_p[n] = 0.0
    resp_p = lu.solve(rhs_p)
    kappa = float(tip_row @ resp_u)
    eta = float(tip_row @ resp_p + p_vec[n])
    return EffectiveCoefficients(config.model, kappa, eta, n, config.m)


def reconstruct_solution(params: MaterialParams, n: int, u_n: float, P: float,
                         j_max: Optional[int] = None):
    """Analytic exact-model field from the crack-region ansatz.

    Evaluates u_j = a + b j + e+ z0^-j + e- z0^j through the scaled
    amplitude e+ z0^-j = (e+ z0^-n) z0^(n-j), so no unscaled hyperbolic
    value appears; the bonded region follows the two-term recursion from
    the seed (u_{n-1}, u_n).
    """
    if n < 2:
        raise ValueError(f"reconstruction requires n >= 2, got n={n}")
    if j_max is None:
        j_max = n + default_tail(params)
    roots = characteristic_roots(params)
    ker = HyperbolicKernel(roots.z0)
    kbar = params.kappa_bar
    z0, s1 = roots.z0, ker.s1
    alpha, beta = roots.alpha, roots.beta
    abm1 = alpha + beta - 1

    b = -P / kbar
    d = P / (kbar * s1)
    fhat, _ = ker.fg_scaled(n, alpha)
    # (Ghat - Fhat)(n, alpha) = z0^(2n) [(1 - alpha) + alpha/z0 - z0]:
    # cancellation-free, so the growing-amplitude extraction stays stable.
    gmf_scaled = ker.pow(n) * ((1 - alpha) + alpha / z0 - z0)
    e_plus_hat = (abm1 * u_n + (P / kbar) * ((1 + alpha) - gmf_scaled / s1)) \
        / (2 * fhat)
    e_minus = e_plus_hat * ker.pow(n) - d
    c = 2 * e_plus_hat * ker.pow(n) - d
    a = u_n - b * n - e_plus_hat - e_minus * ker.pow(n)

    u = np.zeros(j_max + 1)
    for j in range(n + 1):
        u[j] = a + b * j + e_plus_hat * ker.pow(n - j) + e_minus * ker.pow(j)
    for j in range(n + 1, j_max + 1):
        u[j] = alpha * u[j - 2] + beta * u[j - 1]
    coeffs = ReconstructionCoefficients(a=a, b=b, c=c, d=d,
                                        seed=(u[n - 1], u_n))
    return coeffs, DisplacementField(u=u, P=P)
