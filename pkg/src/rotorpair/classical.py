"""Classical coupled standard maps, Lyapunov exponents, and interaction correlators.

One kick period maps

    p1' = p1 + (K/2 pi) sin(2 pi q1) - dU/dq1(q1 - q2)
    p2' = p2 + (K/2 pi) sin(2 pi q2) + dU/dq1(q1 - q2)
    qi' = qi + pi'            (mod 1)

with U the same mean-subtracted Gaussian pair potential applied as the
quantum interaction kick.  The correlators of U and of its gradient along
uncoupled trajectory pairs set the predicted weak-coupling purity decay
rate; the Lyapunov exponents set the strong-coupling bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from rotorpair.qdynamics import ModelParams, gaussian_grid_mean

TWO_PI = 2.0 * np.pi

_LYAPUNOV_BURN_IN = 100
_CORRELATOR_BURN_IN = 20


class ClassicalError(ValueError):
    """Invalid arguments to a classical estimator."""


def wrap_position(q):
    """Reduce positions to the fundamental domain [0, 1)."""
    return np.asarray(q) % 1.0


def wrap_momentum(p):
    """Reduce momenta to the fundamental domain [-1/2, 1/2)."""
    return (np.asarray(p) + 0.5) % 1.0 - 0.5


def signed_separation(delta):
    """Signed circular separation in [-1/2, 1/2)."""
    return (np.asarray(delta) + 0.5) % 1.0 - 0.5


def pair_potential(delta, eps: float, zeta: float, offset: float):
    """U(q1 - q2) = eps * (exp(-s^2 / 2 zeta^2) - offset), s the wrapped separation."""
    s = signed_separation(delta)
    return eps * (np.exp(-(s**2) / (2.0 * zeta**2)) - offset)


def pair_force(delta, eps: float, zeta: float):
    """dU/dq1 evaluated at q1 - q2 = delta."""
    s = signed_separation(delta)
    return eps * np.exp(-(s**2) / (2.0 * zeta**2)) * (-s / zeta**2)


def pair_curvature(delta, eps: float, zeta: float):
    """d2U/dq1^2 evaluated at q1 - q2 = delta (enters the tangent map)."""
    s = signed_separation(delta)
    return eps * np.exp(-(s**2) / (2.0 * zeta**2)) * (s**2 / zeta**4 - 1.0 / zeta**2)


@dataclass(frozen=True)
class PhasePoint:
    """A point of the coupled 4D map with its tangent-space accumulator.

    tangent is a (4, k) matrix of tangent vectors (or a length-4 vector in
    single-exponent mode) ordered as (dq1, dp1, dq2, dp2).
    """

    q1: float
    p1: float
    q2: float
    p2: float
    tangent: np.ndarray = field(default_factory=lambda: np.eye(4))


def _step_coords(q1, p1, q2, p2, kick_K: float, eps: float, zeta: float):
    """One kick period on coordinate arrays; returns new coords and Jacobian entries."""
    f1 = (kick_K / TWO_PI) * np.sin(TWO_PI * q1)
    f2 = (kick_K / TWO_PI) * np.sin(TWO_PI * q2)
    delta = q1 - q2
    force = pair_force(delta, eps, zeta)
    p1n = wrap_momentum(p1 + f1 - force)
    p2n = wrap_momentum(p2 + f2 + force)
    q1n = wrap_position(q1 + p1n)
    q2n = wrap_position(q2 + p2n)
    a = kick_K * np.cos(TWO_PI * q1)
    b = kick_K * np.cos(TWO_PI * q2)
    c = pair_curvature(delta, eps, zeta)
    return q1n, p1n, q2n, p2n, a, b, c


def _step_tangent(tangent, a, b, c):
    """Apply the exact Jacobian (kick shear then drift shear) to tangent vectors.

    tangent has shape (..., 4, k) with rows (dq1, dp1, dq2, dp2); a, b, c
    broadcast over the leading axes.
    """
    dq1 = tangent[..., 0, :]
    dp1 = tangent[..., 1, :]
    dq2 = tangent[..., 2, :]
    dp2 = tangent[..., 3, :]
    a = np.asarray(a)[..., None]
    b = np.asarray(b)[..., None]
    c = np.asarray(c)[..., None]
    dp1n = dp1 + (a - c) * dq1 + c * dq2
    dp2n = dp2 + c * dq1 + (b - c) * dq2
    dq1n = dq1 + dp1n
    dq2n = dq2 + dp2n
    return np.stack([dq1n, dp1n, dq2n, dp2n], axis=-2)


def classical_step(pt: PhasePoint, params: ModelParams) -> PhasePoint:
    """Advance one phase-space point (and its tangent vectors) by one period."""
    q1, p1, q2, p2, a, b, c = _step_coords(
        pt.q1, pt.p1, pt.q2, pt.p2, params.kick_K, params.coupling_eps, params.range_zeta
    )
    tangent = np.asarray(pt.tangent, dtype=float)
    vector_mode = tangent.ndim == 1
    if vector_mode:
        tangent = tangent[:, None]
    new_tangent = _step_tangent(tangent, a, b, c)
    if vector_mode:
        new_tangent = new_tangent[:, 0]
    return PhasePoint(
        q1=float(q1), p1=float(p1), q2=float(q2), p2=float(p2), tangent=new_tangent
    )


@dataclass(frozen=True)
class LyapunovEstimate:
    """Two largest Lyapunov exponents of the coupled map, with ensemble error."""

    lambda1: float
    lambda2: float
    stderr: float
    converged: bool
    n_traj: int
    n_steps: int
    seed: int


def _push_normalize_2d(v, jqq):
    """One-particle tangent step (dq, dp) -> (dq + dp', dp'), renormalized in place."""
    dp = v[:, 1] + jqq * v[:, 0]
    dq = v[:, 0] + dp
    r = np.hypot(dq, dp)
    v[:, 0] = dq / r
    v[:, 1] = dp / r
    return r


def _orthonormalize(t):
    """Modified Gram-Schmidt on two tangent columns; returns log growth factors."""
    v1 = t[:, :, 0]
    v2 = t[:, :, 1]
    r11 = np.linalg.norm(v1, axis=1)
    u1 = v1 / r11[:, None]
    r12 = np.sum(u1 * v2, axis=1)
    w = v2 - r12[:, None] * u1
    r22 = np.linalg.norm(w, axis=1)
    t[:, :, 0] = u1
    t[:, :, 1] = w / r22[:, None]
    return np.log(r11), np.log(r22)


def lyapunov(
    params: ModelParams, n_traj: int, n_steps: int, seed: int
) -> LyapunovEstimate:
    """Two largest Lyapunov exponents via tangent-space evolution.

    Evolves n_traj trajectories from uniform random initial conditions, each
    carrying two tangent vectors re-orthonormalized every step; exponents are
    per-trajectory time averages (after a short tangent-alignment transient),
    reported as ensemble mean with standard error.  At eps = 0 the coupled
    map decouples and both exponents equal the one-particle exponent.
    """
    if n_steps < 1000:
        raise ClassicalError(f"n_steps must be >= 1000 for a converged estimate, got {n_steps}")
    if n_traj < 10:
        raise ClassicalError(f"n_traj must be >= 10, got {n_traj}")
    rng = np.random.default_rng(seed)
    q1 = rng.random(n_traj)
    q2 = rng.random(n_traj)
    p1 = rng.random(n_traj) - 0.5
    p2 = rng.random(n_traj) - 0.5
    tangent = rng.standard_normal((n_traj, 4, 2))
    _orthonormalize(tangent)

    log1 = np.zeros(n_traj)
    log2 = np.zeros(n_traj)
    k, eps, zeta = params.kick_K, params.coupling_eps, params.range_zeta
    if eps == 0.0:
        # Decoupled: one 2D tangent vector per particle, so lambda1 and
        # lambda2 are two independent estimates of the one-particle exponent
        # (the ordered 4D QR exponents would split by max/min selection bias).
        v1 = rng.standard_normal((n_traj, 2))
        v2 = rng.standard_normal((n_traj, 2))
        v1 /= np.linalg.norm(v1, axis=1)[:, None]
        v2 /= np.linalg.norm(v2, axis=1)[:, None]
        for step in range(n_steps + _LYAPUNOV_BURN_IN):
            q1, p1, q2, p2, a, b, _ = _step_coords(q1, p1, q2, p2, k, 0.0, zeta)
            r1 = _push_normalize_2d(v1, a)
            r2 = _push_normalize_2d(v2, b)
            if step >= _LYAPUNOV_BURN_IN:
                log1 += np.log(r1)
                log2 += np.log(r2)
    else:
        for step in range(n_steps + _LYAPUNOV_BURN_IN):
            q1, p1, q2, p2, a, b, c = _step_coords(q1, p1, q2, p2, k, eps, zeta)
            tangent = _step_tangent(tangent, a, b, c)
            l1, l2 = _orthonormalize(tangent)
            if step >= _LYAPUNOV_BURN_IN:
                log1 += l1
                log2 += l2

    lam1 = log1 / n_steps
    lam2 = log2 / n_steps
    mean1 = float(np.mean(lam1))
    mean2 = float(np.mean(lam2))
    err1 = float(np.std(lam1, ddof=1) / math.sqrt(n_traj))
    err2 = float(np.std(lam2, ddof=1) / math.sqrt(n_traj))
    stderr = max(err1, err2)
    # relative-error flag; meaningless (and False) near lambda = 0
    converged = mean1 != 0.0 and stderr <= 0.2 * abs(mean1)
    return LyapunovEstimate(
        lambda1=mean1,
        lambda2=mean2,
        stderr=stderr,
        converged=converged,
        n_traj=n_traj,
        n_steps=n_steps,
        seed=seed,
    )


@dataclass(frozen=True)
class CorrelatorEstimate:
    """Time-integrated interaction correlator along uncoupled trajectory pairs.

    value is the lag sum C(0) + 2 sum_{n>=1} C(n) of the connected
    autocorrelation of the observable ("potential" for the big correlator,
    "gradient" for the small one); decayed is False when C(n_max) is still
    more than 3 standard errors from zero.
    """

    value: float
    correlation_curve: np.ndarray
    n_traj: int
    stderr: float
    decayed: bool
    observable: str


def _correlator(
    params: ModelParams,
    n_traj: int,
    n_steps: int,
    n_max_lag: int,
    seed: int,
    observable: str,
) -> CorrelatorEstimate:
    if n_traj < 2:
        raise ClassicalError(f"n_traj must be >= 2, got {n_traj}")
    if n_steps <= 2 * n_max_lag:
        raise ClassicalError(
            f"n_steps = {n_steps} too short for n_max_lag = {n_max_lag}"
        )
    rng = np.random.default_rng(seed)
    qs = rng.random(n_traj)
    qr = rng.random(n_traj)
    ps = rng.random(n_traj) - 0.5
    pr = rng.random(n_traj) - 0.5
    k = params.kick_K
    eps = params.coupling_eps
    zeta = params.range_zeta
    offset = gaussian_grid_mean(params.grid.n_sites, zeta)

    series = np.empty((n_traj, n_steps))
    for step in range(n_steps + _CORRELATOR_BURN_IN):
        # interaction off in the dynamics, on in the observable
        qs, ps, qr, pr, _, _, _ = _step_coords(qs, ps, qr, pr, k, 0.0, zeta)
        if step >= _CORRELATOR_BURN_IN:
            delta = qs - qr
            if observable == "potential":
                series[:, step - _CORRELATOR_BURN_IN] = pair_potential(delta, eps, zeta, offset)
            else:
                series[:, step - _CORRELATOR_BURN_IN] = pair_force(delta, eps, zeta)

    fluct = series - np.mean(series)
    lags = np.arange(n_max_lag + 1)
    per_pair = np.empty((n_traj, n_max_lag + 1))
    for n in lags:
        stop = n_steps - n
        per_pair[:, n] = np.mean(fluct[:, :stop] * fluct[:, n:], axis=1)
    curve = np.mean(per_pair, axis=0)
    gamma_per_pair = per_pair[:, 0] + 2.0 * np.sum(per_pair[:, 1:], axis=1)
    value = float(np.mean(gamma_per_pair))
    stderr = float(np.std(gamma_per_pair, ddof=1) / math.sqrt(n_traj))
    tail_err = float(np.std(per_pair[:, -1], ddof=1) / math.sqrt(n_traj))
    decayed = bool(abs(curve[-1]) <= 3.0 * tail_err) if eps > 0.0 else True
    curve.setflags(write=False)
    return CorrelatorEstimate(
        value=value,
        correlation_curve=curve,
        n_traj=n_traj,
        stderr=stderr,
        decayed=decayed,
        observable=observable,
    )


def correlator_gamma_big(
    params: ModelParams, n_traj: int, n_steps: int, n_max_lag: int, seed: int
) -> CorrelatorEstimate:
    """Lag sum of the pair-potential autocorrelation (the rate correlator).

    Trajectory pairs evolve with the interaction switched off in the
    dynamics and on in the observable, realizing the weak-coupling
    stationary-phase average; the delta-correlated limit gives the
    golden-rule purity decay rate 2 Gamma / h_eff^2.
    """
    return _correlator(params, n_traj, n_steps, n_max_lag, seed, "potential")


def correlator_gamma_small(
    params: ModelParams, n_traj: int, n_steps: int, n_max_lag: int, seed: int
) -> CorrelatorEstimate:
    """Lag sum of the pair-force autocorrelation (off-diagonal width correlator)."""
    return _correlator(params, n_traj, n_steps, n_max_lag, seed, "gradient")


def ehrenfest_time(lambda1: float, zeta: float, sigma: float) -> float:
    """Time for a sigma-wide packet to spread to the interaction scale zeta.

    tau = ln(zeta / sigma) / lambda1, defined for chaotic dynamics only.
    """
    if lambda1 <= 0.0:
        raise ClassicalError(
            f"lambda1 must be positive (chaotic dynamics), got {lambda1}"
        )
    if zeta <= sigma:
        raise ClassicalError(
            f"zeta = {zeta} must exceed sigma = {sigma} (otherwise the early window is empty)"
        )
    return math.log(zeta / sigma) / lambda1
