"""Exact unitary Floquet evolution of two coupled quantum kicked rotors.

One period applies, in order: a kick phase diagonal in position,
exp[-i (V(q1) + V(q2) + U(q1 - q2)) / h_eff] with V(q) = (K/4 pi^2) cos(2 pi q),
then the free phase exp[-i (p1^2 + p2^2) / (2 h_eff)] diagonal in momentum.
The classical limit is the coupled standard map
p' = p + (K/2 pi) sin(2 pi q), q' = q + p' on the unit torus.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.fft

from rotorpair.hilbert import NORM_GATE, TWO_PI, GridSpec, HilbertError, QuantumState, make_grid


class WeakCouplingWarning(UserWarning):
    """Coupling strength exceeds the kick strength, outside the weak-coupling regime."""


class DynamicsError(ValueError):
    """Invalid model parameters or corrupted input state."""


@dataclass(frozen=True)
class ModelParams:
    """Physical and numerical knobs of the coupled kicked-rotor model.

    kick_K is the classical stochasticity parameter (chaotic for K >~ 5,
    near-integrable for K <~ 1), coupling_eps the interaction strength and
    range_zeta the interaction length scale in torus units.
    """

    grid: GridSpec
    kick_K: float
    coupling_eps: float
    range_zeta: float
    n_steps: int

    def __post_init__(self):
        n = self.grid.n_sites
        if self.kick_K < 0.0:
            raise DynamicsError(f"kick_K must be non-negative, got {self.kick_K}")
        if self.coupling_eps < 0.0:
            raise DynamicsError(f"coupling_eps must be non-negative, got {self.coupling_eps}")
        if not 2.0 / n <= self.range_zeta <= 0.5:
            raise DynamicsError(
                f"range_zeta must lie in [2/N, 0.5] = [{2.0 / n:.6g}, 0.5], got {self.range_zeta}"
            )
        if self.n_steps < 1:
            raise DynamicsError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.coupling_eps > self.kick_K:
            warnings.warn(
                f"coupling_eps = {self.coupling_eps} exceeds kick_K = {self.kick_K}; "
                "outside the weak-coupling regime the decay predictions are unreliable",
                WeakCouplingWarning,
                stacklevel=2,
            )


def model_params(
    n_sites: int, kick_K: float, coupling_eps: float, range_zeta: float, n_steps: int
) -> ModelParams:
    """Convenience constructor building the grid from its size."""
    return ModelParams(
        grid=make_grid(n_sites),
        kick_K=kick_K,
        coupling_eps=coupling_eps,
        range_zeta=range_zeta,
        n_steps=n_steps,
    )


@dataclass(frozen=True)
class InteractionTable:
    """Mean-subtracted periodized Gaussian pair potential on the grid.

    values[j] = eps * (G(d_j) - mean(G)) with d_j = min(j/N, 1 - j/N) and
    G(d) = exp(-d^2 / (2 zeta^2)).  The subtraction removes a global phase
    that cannot affect the reduced state but would contaminate the
    interaction correlator with a zero-frequency spike.
    """

    values: np.ndarray
    mean_removed: bool = True


def gaussian_shape(distance: np.ndarray | float, zeta: float) -> np.ndarray | float:
    """Unit-strength Gaussian pair potential G(d) = exp(-d^2 / (2 zeta^2))."""
    return np.exp(-np.asarray(distance) ** 2 / (2.0 * zeta**2))


def gaussian_grid_mean(n_sites: int, zeta: float) -> float:
    """Grid mean of G over the N circular distances; the offset removed from the table."""
    j = np.arange(n_sites)
    d = np.minimum(j, n_sites - j) / n_sites
    return float(np.mean(gaussian_shape(d, zeta)))


def build_interaction(params: ModelParams) -> InteractionTable:
    """Tabulate the pair potential at the N circular grid distances."""
    n = params.grid.n_sites
    j = np.arange(n)
    d = np.minimum(j, n - j) / n
    g = gaussian_shape(d, params.range_zeta)
    values = params.coupling_eps * (g - np.mean(g))
    values.setflags(write=False)
    return InteractionTable(values=values)


class FloquetPropagator:
    """Precomputed phase tables for repeated application of one kick period."""

    def __init__(self, params: ModelParams):
        grid = params.grid
        n = grid.n_sites
        self.params = params
        v = (params.kick_K / (4.0 * np.pi**2)) * np.cos(TWO_PI * grid.positions)
        table = build_interaction(params).values
        idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
        self._kick2 = np.exp(
            -1j * (v[:, None] + v[None, :] + table[idx]) / grid.h_eff
        )
        self._kick1 = np.exp(-1j * v / grid.h_eff)
        free1 = np.exp(-1j * grid.momenta**2 / (2.0 * grid.h_eff))
        self._free1 = free1
        self._free2 = free1[:, None] * free1[None, :]
        self._interaction_phase = np.exp(-1j * table[idx] / grid.h_eff)

    def step_pair(self, amps: np.ndarray) -> np.ndarray:
        """One period on a two-particle amplitude matrix (N, N)."""
        a = amps * self._kick2
        f = scipy.fft.fft2(a, norm="ortho", overwrite_x=True)
        f *= self._free2
        return scipy.fft.ifft2(f, norm="ortho", overwrite_x=True)

    def step_single(self, amps: np.ndarray) -> np.ndarray:
        """One uncoupled period on a one-particle amplitude vector."""
        f = scipy.fft.fft(amps * self._kick1, norm="ortho")
        f *= self._free1
        return scipy.fft.ifft(f, norm="ortho", overwrite_x=True)

    def interaction_only(self, amps: np.ndarray) -> np.ndarray:
        """Apply only the interaction part of the kick phase (diagnostics)."""
        return amps * self._interaction_phase


@lru_cache(maxsize=4)
def _cached_propagator(n_sites: int, kick_K: float, coupling_eps: float, range_zeta: float):
    params = model_params(n_sites, kick_K, coupling_eps, range_zeta, n_steps=1)
    return FloquetPropagator(params)


def get_propagator(params: ModelParams) -> FloquetPropagator:
    """Propagator for the given parameters; phase tables are cached."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeakCouplingWarning)
        return _cached_propagator(
            params.grid.n_sites, params.kick_K, params.coupling_eps, params.range_zeta
        )


def _check_normalized(state: QuantumState) -> None:
    dev = abs(state.norm() - 1.0)
    if dev > NORM_GATE:
        raise DynamicsError(
            f"input state norm deviates from 1 by {dev:.3g} (> {NORM_GATE}); upstream corruption"
        )


def floquet_step(state: QuantumState, params: ModelParams) -> QuantumState:
    """Advance a two-particle state by one kick period."""
    if state.particles != 2:
        raise DynamicsError("floquet_step requires a two-particle state")
    if state.grid != params.grid:
        raise DynamicsError("state and params live on different grids")
    _check_normalized(state)
    out = get_propagator(params).step_pair(state.as_matrix())
    return QuantumState(amplitudes=out.reshape(-1), grid=state.grid, particles=2)


def floquet_step_single(state: QuantumState, params: ModelParams) -> QuantumState:
    """Advance a one-particle state by one uncoupled kick period."""
    if state.particles != 1:
        raise DynamicsError("floquet_step_single requires a one-particle state")
    if state.grid != params.grid:
        raise DynamicsError("state and params live on different grids")
    _check_normalized(state)
    out = get_propagator(params).step_single(state.amplitudes.copy())
    return QuantumState(amplitudes=out, grid=state.grid, particles=1)


def apply_interaction_phase(state: QuantumState, params: ModelParams) -> QuantumState:
    """Apply only the interaction kick phase (used to probe phase linearity)."""
    if state.particles != 2:
        raise DynamicsError("apply_interaction_phase requires a two-particle state")
    _check_normalized(state)
    out = get_propagator(params).interaction_only(state.as_matrix())
    return QuantumState(amplitudes=out.reshape(-1), grid=state.grid, particles=2)


def evolve(
    initial: QuantumState,
    params: ModelParams,
    observer: Callable[[int, QuantumState], None] | None = None,
) -> QuantumState:
    """Apply params.n_steps Floquet periods, reporting each intermediate state.

    The observer, when given, is called after every step with the 1-based
    step index and the current state; it must not mutate the state (states
    are write-protected in any case).
    """
    if initial.particles != 2:
        raise DynamicsError("evolve requires a two-particle state")
    if initial.grid != params.grid:
        raise DynamicsError("state and params live on different grids")
    _check_normalized(initial)
    prop = get_propagator(params)
    amps = initial.as_matrix().copy()
    state = initial
    for step in range(1, params.n_steps + 1):
        amps = prop.step_pair(amps)
        state = QuantumState(amplitudes=amps.reshape(-1).copy(), grid=initial.grid, particles=2)
        if observer is not None:
            observer(step, state)
    return state
