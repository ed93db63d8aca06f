"""Local spectral form of the Riemann-Siegel main sum.

On a short window [x_r, x_r + h] with h <= x_r^(1/4), Z(t) is close to a
finite bank of fixed-frequency oscillators

    Z(t) ~ sum_{n <= tau(x_r)} (2/sqrt(n)) cos(t ln(tau(x_r)/n) - x_r/2 - pi/8)

with an error that decays like x_r^(-1/4).  The frequency table is frozen
at the window base point, so evaluations inside the window skip the theta
recomputation.  The audit helpers measure that error directly against the
global evaluation from zetacore.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import zetacore
from .errors import DomainError, WindowError

# Empirical constant for the window error envelope c_L * x_r^(-1/4).
# Calibration runs show max window errors below 4 * x_r^(-1/4) even when a
# truncation-index crossing falls inside the window.
LOCAL_ERROR_COEFF = 5.0

# Phase-discrepancy envelope c_P (1 + h^2) / x_r for the frozen-phase
# approximation; the quadratic Taylor term contributes h^2/(4 x_r).
PHASE_ERROR_COEFF = 1.0


@dataclass(frozen=True)
class LocalSpectrum:
    """Frozen oscillator bank for one window [x_r, x_r + h]."""

    x_r: float
    h: float
    frequencies: np.ndarray   # ln(tau(x_r)/n), strictly decreasing in n
    amplitudes: np.ndarray    # 2/sqrt(n)
    phase_constant: float     # -x_r/2 - pi/8

    @property
    def oscillator_count(self) -> int:
        return len(self.frequencies)


@dataclass(frozen=True)
class LocalErrorAudit:
    """Measured sup |Z_local - Z_global| over one window."""

    x_r: float
    h: float
    max_abs_error: float
    bound: float


def local_spectrum(x_r: float, h: float, t0_floor: float = zetacore.T0_FLOOR) -> LocalSpectrum:
    """Build the oscillator table for the window [x_r, x_r + h].

    The window length must satisfy 0 < h <= x_r^(1/4).  ``t0_floor`` is the
    working floor below which the asymptotics behind the window form are
    not meaningful; tests may lower it to probe tiny cases.
    """
    if x_r <= t0_floor:
        raise DomainError(f"x_r={x_r} at or below working floor {t0_floor}")
    if not 0.0 < h <= x_r ** 0.25:
        raise WindowError(f"window length h={h} outside (0, x_r^(1/4)={x_r**0.25:.6g}]")
    tau_r = zetacore.tau(x_r)
    n = np.arange(1, math.floor(tau_r) + 1, dtype=np.float64)
    freqs = np.log(tau_r / n)
    amps = 2.0 / np.sqrt(n)
    return LocalSpectrum(x_r, h, freqs, amps, -0.5 * x_r - math.pi / 8.0)


def local_z(spec: LocalSpectrum, t) -> float | np.ndarray:
    """Evaluate the oscillator sum at t inside the window."""
    arr = np.asarray(t, dtype=np.float64)
    lo, hi = spec.x_r, spec.x_r + spec.h
    if np.any(arr < lo) or np.any(arr > hi):
        raise WindowError(f"t outside window [{lo:.6g}, {hi:.6g}]")
    phases = np.multiply.outer(arr, spec.frequencies) + spec.phase_constant
    vals = np.cos(phases) @ spec.amplitudes
    return float(vals) if arr.ndim == 0 else vals


def phase_expansion_audit(x_r: float, h: float, t: float,
                          t0_floor: float = zetacore.T0_FLOOR) -> float:
    """Exact discrepancy between the true and the frozen window phase.

    Returns delta(t) = (theta(t) - t ln n) - (t ln(tau(x_r)/n) - x_r/2 - pi/8)
    for n = 1; the t ln n term cancels, so delta is the same for every
    oscillator.  The contract is |delta| <= (1 + h^2) / x_r.
    """
    if x_r <= t0_floor:
        raise DomainError(f"x_r={x_r} at or below working floor {t0_floor}")
    if not 0.0 < h <= x_r ** 0.25:
        raise WindowError(f"window length h={h} outside (0, x_r^(1/4)]")
    if not x_r <= t <= x_r + h:
        raise WindowError(f"t={t} outside window [{x_r}, {x_r + h}]")
    theta_t = zetacore.theta(t).theta
    return theta_t - t * math.log(zetacore.tau(x_r)) + 0.5 * x_r + math.pi / 8.0


def chebyshev_samples(lo: float, hi: float, count: int) -> np.ndarray:
    """Chebyshev-distributed sample points; denser near window endpoints."""
    k = np.arange(count, dtype=np.float64)
    x = np.cos(math.pi * (2 * k + 1) / (2 * count))
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * x[::-1]


def audit_window(x_r: float, h: float, n_samples: int = 64,
                 t0_floor: float = zetacore.T0_FLOOR) -> LocalErrorAudit:
    """Compare the window oscillator sum with the global main sum.

    Both sides are bare main sums (no correction term), so the difference
    isolates the frozen-phase and truncation effects the window form
    introduces.
    """
    spec = local_spectrum(x_r, h, t0_floor=t0_floor)
    ts = chebyshev_samples(x_r, x_r + h, n_samples)
    z_loc = local_z(spec, ts)
    z_glob = zetacore.rs_z_points(ts, corrected=False)
    err = float(np.max(np.abs(z_loc - z_glob)))
    return LocalErrorAudit(x_r, h, err, LOCAL_ERROR_COEFF * x_r ** -0.25)


def audits_to_csv(audits, path) -> None:
    """Write audit rows as CSV: x_r, h, max_abs_error, bound."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x_r,h,max_abs_error,bound\n")
        for a in sorted(audits, key=lambda a: a.x_r):
            fh.write(f"{a.x_r:.12g},{a.h:.12g},{a.max_abs_error:.12g},{a.bound:.12g}\n")
