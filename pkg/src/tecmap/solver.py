"""Weighted-l1 spectral reconstruction with a gradient-smoothness penalty.

The reconstruction program is

    minimize   ||W s||_1 + gamma * f(D s)
    subject to ||A s - b||^2 / ||b||^2 <= epsilon

where ``W`` penalizes high wave numbers through inverse Butterworth
weights, ``f`` is the squared forward-difference gradient energy of the
synthesized map, and ``A`` samples the synthesis at the observed pixels.
The constraint is handled by an outer search on a penalty multiplier
``lambda`` wrapped around an inner accelerated proximal-gradient solve
(monotone variant) of

    ||W s||_1 + gamma * f(D s) + lambda * ||A s - b||^2.

Two structural facts keep iterations cheap.  The cosine basis
diagonalizes the replicate-boundary difference operator, so
f(D s) = sum_t Lambda_t s_t^2 with closed-form eigenvalues, and the
sampling rows of A are orthonormal, so ||A|| = 1 and the smooth part's
curvature is exactly bounded by 2*gamma*max(Lambda) + 2*lambda.  The
normalized residual of the inner solution decreases monotonically in
lambda, from 1 (the zero solution) toward 0 (exact interpolation), so a
geometric bracket plus bisection lands inside the feasibility band in a
handful of inner solves, each warm-started from the previous one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dct import SpectralCoeffs, analysis_2d, synthesis_2d
from .exceptions import DegenerateInputError, ParameterError
from .grid import Grid, TecMap
from .sensing import ObservationSet, apply_sensing_adjoint

# Floor for the penalty multiplier while searching downward; below this the
# data term is numerically absent and the constraint is treated as slack.
_LAMBDA_FLOOR = 1e-14
_LAMBDA_CEIL = 1e16
# Consecutive near-stationary objective changes required to declare the
# inner solve converged.
_FLAT_STREAK = 5


@dataclass(frozen=True)
class SolverParams:
    """Knobs of the reconstruction program and its numerical solution.

    ``sigma`` is the Butterworth cutoff wave number, ``gamma`` the weight
    of the gradient-energy penalty, ``epsilon`` the normalized residual
    bound.  ``feas_tol`` widens the residual target into the band
    [epsilon*(1-feas_tol), epsilon*(1+feas_tol)]; ``opt_tol`` is the
    relative objective-change tolerance of the inner iteration.
    """

    sigma: float = 5.0
    gamma: float = 1.0
    epsilon: float = 1e-4
    feas_tol: float = 0.05
    opt_tol: float = 1e-8
    max_iters: int = 20000
    multiplier_search_iters: int = 60

    def __post_init__(self):
        if self.sigma <= 0:
            raise ParameterError(f"sigma must be positive, got {self.sigma}")
        if self.gamma < 0:
            raise ParameterError(f"gamma must be nonnegative, got {self.gamma}")
        if self.epsilon <= 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        if self.feas_tol <= 0 or self.opt_tol <= 0:
            raise ParameterError("tolerances must be positive")
        if self.max_iters < 1:
            raise ParameterError(f"max_iters must be at least 1, got {self.max_iters}")
        if self.multiplier_search_iters < 1:
            raise ParameterError("multiplier_search_iters must be at least 1")


@dataclass(frozen=True)
class ReconstructionResult:
    """Solution of the reconstruction program plus solver diagnostics.

    ``objective`` is the constrained program's cost ||W s||_1 + gamma*f(Ds)
    at the returned coefficients; ``lambda_`` the final penalty multiplier
    on the squared residual; ``iterations`` the total inner-iteration count
    across the multiplier search.
    """

    coeffs: SpectralCoeffs
    map: TecMap
    normalized_residual: float
    objective: float
    iterations: int
    converged: bool
    lambda_: float


def butterworth_weights(P: int, Q: int, sigma: float) -> np.ndarray:
    """First-order lowpass weights w_i = 1/(1 + (k^2+l^2)/sigma^2).

    Returned column-stacked (i = P*l + k) to match coefficient vectors.
    The l1 term penalizes coefficient t by 1/w_t, so high wave numbers
    pay more.
    """
    if sigma <= 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    k2 = np.arange(P, dtype=np.float64)[:, None] ** 2
    l2 = np.arange(Q, dtype=np.float64)[None, :] ** 2
    w = 1.0 / (1.0 + (k2 + l2) / (sigma * sigma))
    return w.flatten(order="F")


def gradient_energy(tec_map: TecMap) -> float:
    """Squared gradient energy f(u) = ||grad_x u||^2 + ||grad_y u||^2.

    Forward differences on unit pixel spacing; the difference past the
    last row/column is zero (replicate boundary), so each axis simply
    contributes its n-1 interior differences.
    """
    v = tec_map.values
    dp = np.diff(v, axis=0)
    dq = np.diff(v, axis=1)
    return float(np.sum(dp * dp) + np.sum(dq * dq))


def difference_eigenvalues(P: int, Q: int) -> np.ndarray:
    """Spectrum of the difference operator's normal matrix, column-stacked.

    The cosine basis diagonalizes the replicate-boundary difference
    operator, with per-axis eigenvalues 2 - 2cos(pi*k/n); the 2-D spectrum
    is their sum, so f(D s) = sum_t eig_t * s_t^2 exactly.
    """
    ek = 2.0 - 2.0 * np.cos(np.pi * np.arange(P) / P)
    el = 2.0 - 2.0 * np.cos(np.pi * np.arange(Q) / Q)
    return (ek[:, None] + el[None, :]).flatten(order="F")


class _Operator:
    """Precomputed pieces of one reconstruction problem (fixed obs, params)."""

    def __init__(self, obs: ObservationSet, params: SolverParams):
        grid = obs.grid
        self.P, self.Q = grid.P, grid.Q
        self.pp = (obs.indices % grid.P).astype(np.intp)
        self.qq = (obs.indices // grid.P).astype(np.intp)
        self.b = obs.values
        self.omega = 1.0 / butterworth_weights(grid.P, grid.Q, params.sigma)
        self.eig = difference_eigenvalues(grid.P, grid.Q)
        self.eig_max = float(self.eig[-1])  # largest wave numbers sit last
        self.gamma = params.gamma

    def synth(self, s: np.ndarray) -> np.ndarray:
        """Map matrix U from a flat coefficient vector."""
        return synthesis_2d(s.reshape((self.P, self.Q), order="F"))

    def residual(self, s: np.ndarray) -> np.ndarray:
        """A s - b."""
        return self.synth(s)[self.pp, self.qq] - self.b

    def adjoint_scatter(self, r: np.ndarray) -> np.ndarray:
        """A^T r as a flat coefficient vector."""
        img = np.zeros((self.P, self.Q))
        img[self.pp, self.qq] = r
        return analysis_2d(img).flatten(order="F")

    def objective_smoothpart(self, s: np.ndarray) -> float:
        """gamma * f(D s) through the diagonalized quadratic."""
        return float(self.gamma * np.dot(self.eig, s * s))

    def objective(self, s: np.ndarray) -> float:
        """Constrained program's cost ||W s||_1 + gamma f(D s)."""
        return float(np.dot(self.omega, np.abs(s))) + self.objective_smoothpart(s)


def _mfista(op: _Operator, lam: float, s0: np.ndarray, params: SolverParams,
            trace: list | None = None) -> tuple[np.ndarray, float, int, bool]:
    """Monotone accelerated proximal-gradient descent on the penalized cost.

    Returns (solution, squared residual at solution, iterations, converged).
    The accepted objective never increases: a trial point that worsens the
    cost is rejected while the momentum sequence still advances.
    """
    gamma2eig = 2.0 * op.gamma * op.eig
    L = op.gamma * 2.0 * op.eig_max + 2.0 * lam
    thresh = op.omega / L

    x = s0.copy()
    rx = op.residual(x)
    r2x = float(rx @ rx)
    psi_x = op.objective(x) + lam * r2x
    if trace is not None:
        trace.append(psi_x)
    y = x
    x_prev = x
    t = 1.0
    streak = 0
    iters = 0
    for iters in range(1, params.max_iters + 1):
        ry = op.residual(y) if y is not x else rx  # reuse when momentum is cold
        grad = gamma2eig * y + (2.0 * lam) * op.adjoint_scatter(ry)
        z = y - grad / L
        z = np.sign(z) * np.maximum(np.abs(z) - thresh, 0.0)
        rz = op.residual(z)
        r2z = float(rz @ rz)
        psi_z = op.objective(z) + lam * r2z
        if psi_z <= psi_x:
            x_new, psi_new, r2_new, rnew = z, psi_z, r2z, rz
        else:
            x_new, psi_new, r2_new, rnew = x, psi_x, r2x, rx
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = x_new + (t / t_new) * (z - x_new) + ((t - 1.0) / t_new) * (x_new - x_prev)
        x_prev, x = x, x_new
        change = abs(psi_new - psi_x)
        psi_x, r2x, rx = psi_new, r2_new, rnew
        if trace is not None:
            trace.append(psi_x)
        if change <= params.opt_tol * max(1.0, abs(psi_x)):
            streak += 1
            if streak >= _FLAT_STREAK:
                return x, r2x, iters, True
        else:
            streak = 0
    return x, r2x, iters, False


def solve_penalized(obs: ObservationSet, params: SolverParams, lam: float,
                    start: np.ndarray | None = None,
                    trace: list | None = None) -> SpectralCoeffs:
    """Minimize ||W s||_1 + gamma f(D s) + lam ||A s - b||^2 for fixed lam."""
    if lam <= 0:
        raise ParameterError(f"penalty multiplier must be positive, got {lam}")
    op = _Operator(obs, params)
    s0 = start if start is not None else apply_sensing_adjoint(obs.values, obs).s
    s, _, _, _ = _mfista(op, lam, np.asarray(s0, dtype=np.float64), params, trace)
    return SpectralCoeffs(obs.grid.P, obs.grid.Q, s)


def reconstruct(obs: ObservationSet, params: SolverParams = SolverParams()) -> ReconstructionResult:
    """Solve the constrained reconstruction program for one observation set.

    The returned map satisfies the residual constraint up to
    ``params.feas_tol`` whenever ``converged`` is true; otherwise the best
    iterate found within the search budget is returned.
    """
    b = obs.values
    b2 = float(b @ b)
    if b2 == 0.0:
        raise DegenerateInputError("all observations are zero; the normalized residual is undefined")

    grid = obs.grid
    if params.epsilon >= 1.0:
        # The zero map is feasible (normalized residual exactly 1) and has
        # zero cost, so it is the optimum; no iteration needed.
        zero = SpectralCoeffs(grid.P, grid.Q, np.zeros(grid.n_pixels))
        return ReconstructionResult(
            coeffs=zero, map=TecMap(grid, np.zeros((grid.P, grid.Q))),
            normalized_residual=1.0, objective=0.0, iterations=0,
            converged=True, lambda_=0.0)

    op = _Operator(obs, params)
    lo_band = params.epsilon * (1.0 - params.feas_tol)
    hi_band = params.epsilon * (1.0 + params.feas_tol)

    def solve_at(lam: float, warm: np.ndarray):
        s, r2, iters, ok = _mfista(op, lam, warm, params)
        return s, r2 / b2, iters, ok

    total_iters = 0
    lam = 1.0
    warm = apply_sensing_adjoint(b, obs).s
    s, rho, iters, inner_ok = solve_at(lam, warm)
    total_iters += iters
    solves = 1
    best = (s, rho, lam, inner_ok)  # best feasible, else least-infeasible

    def better(cand_rho, cand_s, inc_rho, inc_s):
        """Prefer feasible-with-smaller-cost, else smaller residual."""
        cand_ok, inc_ok = cand_rho <= hi_band, inc_rho <= hi_band
        if cand_ok and inc_ok:
            return op.objective(cand_s) <= op.objective(inc_s)
        if cand_ok != inc_ok:
            return cand_ok
        return cand_rho <= inc_rho

    lam_lo = None  # rho too large (under-penalized)
    lam_hi = None  # rho below the band (over-penalized)
    s_state = s
    while solves < params.multiplier_search_iters:
        if lo_band <= rho <= hi_band:
            return ReconstructionResult(
                coeffs=SpectralCoeffs(grid.P, grid.Q, s),
                map=TecMap(grid, op.synth(s)),
                normalized_residual=rho, objective=op.objective(s),
                iterations=total_iters, converged=inner_ok, lambda_=lam)
        if better(rho, s, best[1], best[0]):
            best = (s, rho, lam, inner_ok)
        if rho > hi_band:
            lam_lo = lam
        else:
            lam_hi = lam
        if lam_lo is None:
            lam = lam / 10.0  # residual already slack at every lambda tried
            if lam < _LAMBDA_FLOOR:
                break
        elif lam_hi is None:
            lam = lam * 10.0
            if lam > _LAMBDA_CEIL:
                break
        else:
            lam = math.sqrt(lam_lo * lam_hi)
        s_state, rho, iters, inner_ok = solve_at(lam, s_state)
        s = s_state
        total_iters += iters
        solves += 1

    # Search budget exhausted (or multiplier left the representable range):
    # fall back to the best iterate seen.
    if lo_band <= rho <= hi_band:
        final = (s, rho, lam, inner_ok)
    elif better(rho, s, best[1], best[0]):
        final = (s, rho, lam, inner_ok)
    else:
        final = best
    s_f, rho_f, lam_f, ok_f = final
    converged = ok_f and rho_f <= hi_band and (rho_f >= lo_band or lam_f <= _LAMBDA_FLOOR * 10)
    return ReconstructionResult(
        coeffs=SpectralCoeffs(grid.P, grid.Q, s_f),
        map=TecMap(grid, op.synth(s_f)),
        normalized_residual=rho_f, objective=op.objective(s_f),
        iterations=total_iters, converged=converged, lambda_=lam_f)
