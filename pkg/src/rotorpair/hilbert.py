"""Discrete one- and two-particle Hilbert spaces on the unit torus.

The torus is discretized on N sites, q_k = k/N, with conjugate momenta
p_m = m/N for integer m in [-N/2, N/2) and an effective Planck constant
h_eff = 1/(2 pi N), so the classical limit is N -> infinity and one
Planck cell corresponds to one grid cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft

TWO_PI = 2.0 * np.pi

# Winding images used to periodize a Gaussian packet on the torus.  With
# sigma <= 0.1 the first omitted image contributes exp(-0.5/0.1^2) ~ 2e-22.
_WINDINGS = (-1.0, 0.0, 1.0)

# Norm deviation beyond which a state is considered corrupted upstream.
NORM_GATE = 1e-6


class HilbertError(ValueError):
    """Unusable grid, wavepacket, or state."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridSpec:
    """One-particle discretization of the unit torus.

    Attributes
    ----------
    n_sites : int
        Number of grid sites N (one-particle Hilbert dimension).
    h_eff : float
        Effective Planck constant, 1/(2 pi N).
    positions : ndarray
        q_k = k/N for k = 0..N-1.
    momenta : ndarray
        p_m = m/N for integer m in [-N/2, N/2), stored in FFT bin order
        (0, 1/N, ..., (N/2-1)/N, -1/2, ..., -1/N).
    """

    n_sites: int
    h_eff: float
    positions: np.ndarray
    momenta: np.ndarray

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GridSpec) and other.n_sites == self.n_sites

    def __hash__(self) -> int:
        return hash(self.n_sites)


def make_grid(n_sites: int) -> GridSpec:
    """Build the N-site torus grid with h_eff = 1/(2 pi N).

    n_sites must be even (symmetric momentum lattice) and in [4, 4096].
    """
    if n_sites != int(n_sites) or n_sites % 2 != 0 or not 4 <= n_sites <= 4096:
        raise HilbertError(
            f"n_sites must be an even integer in [4, 4096], got {n_sites!r}"
        )
    n = int(n_sites)
    positions = _frozen(np.arange(n) / n)
    # fftfreq(n, d=1) = m/n with m in [-n/2, n/2), FFT bin order.
    momenta = _frozen(np.fft.fftfreq(n, d=1.0))
    return GridSpec(n_sites=n, h_eff=1.0 / (TWO_PI * n), positions=positions, momenta=momenta)


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Complex amplitude vector over the position grid.

    One-particle states have length N; two-particle states have length
    N^2 with flat index x*N + r = <x, r|psi> (first particle major).
    Instances are immutable; the amplitude buffer is write-protected.
    """

    amplitudes: np.ndarray
    grid: GridSpec
    particles: int = 1

    def __post_init__(self):
        n = self.grid.n_sites
        if self.particles not in (1, 2):
            raise HilbertError(f"particles must be 1 or 2, got {self.particles}")
        expected = n if self.particles == 1 else n * n
        if self.amplitudes.shape != (expected,):
            raise HilbertError(
                f"amplitude vector has shape {self.amplitudes.shape}, "
                f"expected ({expected},) for {self.particles} particle(s) on {n} sites"
            )
        if abs(self.norm() - 1.0) > NORM_GATE:
            raise HilbertError(f"state norm {self.norm():.12g} deviates from 1 beyond {NORM_GATE}")
        self.amplitudes.setflags(write=False)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_matrix(self) -> np.ndarray:
        """Two-particle amplitudes reshaped to (N, N), row index = particle 1."""
        if self.particles != 2:
            raise HilbertError("as_matrix requires a two-particle state")
        n = self.grid.n_sites
        return self.amplitudes.reshape(n, n)


@dataclass(frozen=True)
class WavepacketSpec:
    """Center and width of a Gaussian packet in torus units."""

    center_q: float
    center_p: float
    width_sigma: float


def make_wavepacket(spec: WavepacketSpec, grid: GridSpec) -> QuantumState:
    """Periodized Gaussian wavepacket, normalized to unit norm.

    Amplitudes are proportional to

        sum_w exp[ i p0 (q - q0 - w) / h_eff - (q - q0 - w)^2 / (2 sigma^2) ]

    with winding images w in {-1, 0, 1}.

    Parameters
    ----------
    spec : WavepacketSpec
        center_q in [0, 1), center_p in [-1/2, 1/2), and
        1/N <= width_sigma <= 0.1 (resolvable on the grid yet narrow).
    grid : GridSpec
    """
    n = grid.n_sites
    if not 0.0 <= spec.center_q < 1.0:
        raise HilbertError(f"center_q must lie in [0, 1), got {spec.center_q}")
    if not -0.5 <= spec.center_p < 0.5:
        raise HilbertError(f"center_p must lie in [-1/2, 1/2), got {spec.center_p}")
    if not 1.0 / n <= spec.width_sigma <= 0.1:
        raise HilbertError(
            f"width_sigma must lie in [1/N, 0.1] = [{1.0 / n:.6g}, 0.1], got {spec.width_sigma}"
        )
    q = grid.positions
    amp = np.zeros(n, dtype=np.complex128)
    for w in _WINDINGS:
        dq = q - spec.center_q - w
        amp += np.exp(1j * spec.center_p * dq / grid.h_eff - dq**2 / (2.0 * spec.width_sigma**2))
    amp /= np.linalg.norm(amp)
    return QuantumState(amplitudes=amp, grid=grid, particles=1)


def tensor_product(a: QuantumState, b: QuantumState) -> QuantumState:
    """Two-particle product state |a> (x) |b>, flat index x*N + r."""
    if a.particles != 1 or b.particles != 1:
        raise HilbertError("tensor_product takes two one-particle states")
    if a.grid != b.grid:
        raise HilbertError(
            f"mismatched grids: {a.grid.n_sites} vs {b.grid.n_sites} sites"
        )
    amp = np.kron(a.amplitudes, b.amplitudes)
    return QuantumState(amplitudes=amp, grid=a.grid, particles=2)


def momentum_amplitudes(state: QuantumState) -> np.ndarray:
    """Amplitudes in the momentum basis (unitary DFT), FFT bin order.

    For one particle this is phi_m = N^{-1/2} sum_k exp(-2 pi i k m / N) psi_k;
    for two particles the transform acts on both indices and the result is
    returned as an (N, N) array.
    """
    if state.particles == 1:
        return scipy.fft.fft(state.amplitudes, norm="ortho")
    return scipy.fft.fft2(state.as_matrix(), norm="ortho")


def position_mean(state: QuantumState) -> float:
    """Naive position expectation sum_k q_k |psi_k|^2 (one particle)."""
    if state.particles != 1:
        raise HilbertError("position_mean requires a one-particle state")
    prob = np.abs(state.amplitudes) ** 2
    return float(np.sum(state.grid.positions * prob))


def circular_position_mean(prob: np.ndarray, positions: np.ndarray) -> float:
    """Circular mean of a position distribution on the torus, in [0, 1).

    Robust against packets straddling the q = 0 wrap; reduces to the naive
    mean for narrow packets away from the boundary.
    """
    z = np.sum(prob * np.exp(2j * np.pi * positions))
    return float(np.angle(z) / TWO_PI % 1.0)


def overlap(a: QuantumState, b: QuantumState) -> complex:
    """Inner product <a|b>."""
    if a.grid != b.grid or a.particles != b.particles:
        raise HilbertError("overlap requires states on the same grid with equal particle count")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
