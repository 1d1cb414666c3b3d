"""Decay-law fits and the three-regime reading of a purity time series.

After an initial classical transient (up to the Ehrenfest time) the purity
of the reduced state decays either exponentially, at the smaller of the
golden-rule rate 2 Gamma / h_eff^2 and the Lyapunov sum, or algebraically
with exponent 2 in regular systems, before saturating at the random-state
floor 2/N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from rotorpair.classical import ClassicalError, CorrelatorEstimate, LyapunovEstimate, ehrenfest_time
from rotorpair.qdynamics import ModelParams

MIN_FIT_POINTS = 5
R_SQUARED_MARGIN = 0.02


class AnalysisError(ValueError):
    """Invalid series or fit request."""


@dataclass(frozen=True)
class PuritySeries:
    """Ensemble-averaged purity at integer kick counts."""

    times: np.ndarray
    purity: np.ndarray
    params: ModelParams
    ensemble_size: int
    seed: int
    stderr: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times)
        p = np.asarray(self.purity)
        if t.shape != p.shape or t.ndim != 1:
            raise AnalysisError("times and purity must be 1D arrays of equal length")
        if t[0] != 0 or abs(p[0] - 1.0) > 1e-8:
            raise AnalysisError("series must start at t = 0 with purity 1 (product state)")
        n = self.params.grid.n_sites
        if np.any(p < 1.0 / n - 1e-8) or np.any(p > 1.0 + 1e-8):
            raise AnalysisError(f"purity values outside [1/{n}, 1]")
        t.setflags(write=False)
        p.setflags(write=False)


@dataclass(frozen=True)
class DecayFit:
    """Fitted decay model on a time window.

    model is "exponential" (rate_or_exponent = decay rate per kick),
    "power_law" (rate_or_exponent = decay exponent), or "none" when no
    valid fit exists (see diagnostic).
    """

    model: str
    rate_or_exponent: float
    stderr: float
    window: tuple[float, float]
    r_squared: float
    n_points: int
    diagnostic: str = ""


@dataclass(frozen=True)
class RegimePrediction:
    """Predicted decay rates, saturation floor, and Ehrenfest time."""

    rate_golden_rule: float
    rate_lyapunov: float
    rate_predicted: float
    saturation: float
    tau_ehrenfest: float

    def __post_init__(self):
        if self.rate_predicted != min(self.rate_golden_rule, self.rate_lyapunov):
            raise AnalysisError("rate_predicted must equal min(golden rule, Lyapunov)")


def saturation_estimate(n_sites: int) -> float:
    """Saturation floor 2/N: the random-state purity of an N x N bipartition."""
    return 2.0 / n_sites


def random_state_purity_mc(n_sites: int, n_samples: int, seed: int) -> float:
    """Monte Carlo mean purity of uniformly random two-particle pure states.

    Oracle for the saturation floor: the exact mean is 2N/(N^2+1) ~ 2/N.
    """
    rng = np.random.default_rng(seed)
    total = 0.0
    for _ in range(n_samples):
        a = rng.standard_normal((n_sites, n_sites)) + 1j * rng.standard_normal((n_sites, n_sites))
        s2 = np.linalg.svd(a, compute_uv=False) ** 2
        total += float(np.sum(s2**2) / np.sum(s2) ** 2)
    return total / n_samples


def make_prediction(
    params: ModelParams,
    lyap: LyapunovEstimate,
    gamma_big: CorrelatorEstimate,
    sigma: float,
) -> RegimePrediction:
    """Combine classical estimates into the predicted decay regimes.

    The golden-rule rate restores the effective Planck constant absorbed by
    the continuum convention: rate = 2 Gamma / h_eff^2.  No Ehrenfest time
    is reported for non-chaotic dynamics (lambda1 <= 0) or when the packet
    is wider than the interaction range.
    """
    h = params.grid.h_eff
    rate_gr = 2.0 * gamma_big.value / h**2
    rate_ly = lyap.lambda1 + lyap.lambda2
    try:
        tau = ehrenfest_time(lyap.lambda1, params.range_zeta, sigma)
    except ClassicalError:
        tau = math.nan
    return RegimePrediction(
        rate_golden_rule=rate_gr,
        rate_lyapunov=rate_ly,
        rate_predicted=min(rate_gr, rate_ly),
        saturation=saturation_estimate(params.grid.n_sites),
        tau_ehrenfest=tau,
    )


def _no_fit(window, n_points: int, diagnostic: str) -> DecayFit:
    return DecayFit(
        model="none",
        rate_or_exponent=math.nan,
        stderr=math.nan,
        window=(float(window[0]), float(window[1])),
        r_squared=0.0,
        n_points=n_points,
        diagnostic=diagnostic,
    )


def _windowed(series: PuritySeries, window, floor: float, log_time: bool):
    t = np.asarray(series.times, dtype=float)
    p = np.asarray(series.purity, dtype=float)
    mask = (t >= window[0]) & (t <= window[1]) & (p - floor > 0.0)
    if log_time:
        mask &= t > 0.0
    return t[mask], p[mask] - floor


def fit_exponential(series: PuritySeries, window, floor: float | None = None) -> DecayFit:
    """Least-squares line on (t, ln(P - floor)); rate = -slope.

    The floor defaults to the 2/N saturation estimate; points at or below
    it are dropped.  Returns model "none" with a diagnostic when fewer than
    5 usable points remain or the fitted rate is negative.
    """
    if floor is None:
        floor = saturation_estimate(series.params.grid.n_sites)
    t, y = _windowed(series, window, floor, log_time=False)
    if len(t) < MIN_FIT_POINTS:
        return _no_fit(window, len(t), f"only {len(t)} usable points above the floor")
    res = stats.linregress(t, np.log(y))
    rate = -res.slope
    if rate < 0.0:
        return _no_fit(window, len(t), f"fitted rate negative ({rate:.3g}); purity not decaying")
    return DecayFit(
        model="exponential",
        rate_or_exponent=float(rate),
        stderr=float(res.stderr),
        window=(float(window[0]), float(window[1])),
        r_squared=float(res.rvalue**2),
        n_points=len(t),
    )


def fit_power_law(series: PuritySeries, window, floor: float | None = None) -> DecayFit:
    """Least-squares line on (ln t, ln(P - floor)); decay exponent = -slope."""
    if floor is None:
        floor = saturation_estimate(series.params.grid.n_sites)
    t, y = _windowed(series, window, floor, log_time=True)
    if len(t) < MIN_FIT_POINTS:
        return _no_fit(window, len(t), f"only {len(t)} usable points above the floor")
    res = stats.linregress(np.log(t), np.log(y))
    exponent = -res.slope
    if exponent < 0.0:
        return _no_fit(
            window, len(t), f"fitted exponent negative ({exponent:.3g}); purity not decaying"
        )
    return DecayFit(
        model="power_law",
        rate_or_exponent=float(exponent),
        stderr=float(res.stderr),
        window=(float(window[0]), float(window[1])),
        r_squared=float(res.rvalue**2),
        n_points=len(t),
    )


@dataclass(frozen=True)
class RegimeReport:
    """Three-regime reading of one purity series against its prediction."""

    status: str  # "ok", "no_entanglement", or "partial"
    missing: tuple[str, ...]
    window_ii: tuple[float, float] | None
    fit_exp: DecayFit | None
    fit_pow: DecayFit | None
    selected_model: str  # "exponential", "power_law", "ambiguous", or "none"
    rate_ratio: float  # fitted rate / predicted rate (nan when not applicable)
    saturation_observed: float
    saturation_predicted: float
    tau_ehrenfest: float
    early_decay_exponent: float  # regime-(i) growth exponent of 1 - P (nan if too few points)


def default_window_ii(series: PuritySeries, tau: float) -> tuple[float, float]:
    """Regime-(ii) fit window: past the Ehrenfest transient, above the floor.

    Runs from ceil(tau) + 1 to the first passage below 3x the saturation
    estimate (or the end of the series).
    """
    floor = saturation_estimate(series.params.grid.n_sites)
    t = np.asarray(series.times, dtype=float)
    p = np.asarray(series.purity, dtype=float)
    t_lo = math.ceil(tau) + 1 if math.isfinite(tau) else 1
    below = np.nonzero(p < 3.0 * floor)[0]
    t_hi = t[below[0]] if len(below) else t[-1]
    return (float(t_lo), float(t_hi))


def _early_decay_exponent(series: PuritySeries, tau: float) -> float:
    """Log-log slope of 1 - P on 0 < t < tau (regime-(i) diagnostic)."""
    if not math.isfinite(tau):
        return math.nan
    t = np.asarray(series.times, dtype=float)
    p = np.asarray(series.purity, dtype=float)
    mask = (t > 0) & (t < tau) & (1.0 - p > 0.0)
    if np.count_nonzero(mask) < 3:
        return math.nan
    res = stats.linregress(np.log(t[mask]), np.log(1.0 - p[mask]))
    return float(res.slope)


def select_regime(series: PuritySeries, prediction: RegimePrediction) -> RegimeReport:
    """Segment a purity series at the Ehrenfest time and the saturation floor.

    Fits regime (ii) with both decay models and selects the better one by
    r-squared (ties within 0.02 are reported as ambiguous); reports the
    fitted-to-predicted rate ratio and the observed saturation over the
    final quartile of the series.
    """
    t = np.asarray(series.times, dtype=float)
    p = np.asarray(series.purity, dtype=float)
    tau = prediction.tau_ehrenfest
    sat_obs = float(np.mean(p[3 * len(p) // 4 :]))

    if float(np.min(p)) > 0.99:
        return RegimeReport(
            status="no_entanglement",
            missing=("regime_ii", "regime_iii"),
            window_ii=None,
            fit_exp=None,
            fit_pow=None,
            selected_model="none",
            rate_ratio=math.nan,
            saturation_observed=sat_obs,
            saturation_predicted=prediction.saturation,
            tau_ehrenfest=tau,
            early_decay_exponent=math.nan,
        )

    missing = []
    if math.isfinite(tau) and t[-1] < 5.0 * tau:
        missing.append("series shorter than 5x Ehrenfest time")
    if not np.any(p < 3.0 * prediction.saturation):
        missing.append("saturation not reached")

    window = default_window_ii(series, tau)
    fit_exp = fit_exponential(series, window)
    fit_pow = fit_power_law(series, window)

    if fit_exp.model == "none" and fit_pow.model == "none":
        selected = "none"
    elif fit_exp.model == "none":
        selected = "power_law"
    elif fit_pow.model == "none":
        selected = "exponential"
    elif fit_exp.r_squared > fit_pow.r_squared + R_SQUARED_MARGIN:
        selected = "exponential"
    elif fit_pow.r_squared > fit_exp.r_squared + R_SQUARED_MARGIN:
        selected = "power_law"
    else:
        selected = "ambiguous"

    if fit_exp.model == "exponential" and prediction.rate_predicted > 0.0:
        rate_ratio = fit_exp.rate_or_exponent / prediction.rate_predicted
    else:
        rate_ratio = math.nan

    return RegimeReport(
        status="partial" if missing else "ok",
        missing=tuple(missing),
        window_ii=window,
        fit_exp=fit_exp,
        fit_pow=fit_pow,
        selected_model=selected,
        rate_ratio=rate_ratio,
        saturation_observed=sat_obs,
        saturation_predicted=prediction.saturation,
        tau_ehrenfest=tau,
        early_decay_exponent=_early_decay_exponent(series, tau),
    )
