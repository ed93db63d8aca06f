"""Numerical surrogate of the Jacob's ladder phi_1 and its reverse iterates.

The ladder is the increasing function with d phi_1 / dt = Ztilde^2(t),
where Ztilde^2(t) = |zeta(1/2+it)|^2 / ln(t).  Only the differential
relation and the asymptotic lag t - phi_1(t) ~ (1-c) t / ln(t) (c Euler's
constant) pin the surrogate down on a finite window, so the table is
anchored by that lag at its left edge.  Reverse-iterating the base segment
[T, T+U] through the inverse map produces the disjoint segment chain whose
gaps follow the (1-c) T / ln(T) law.

Construction: Z is evaluated on a uniform grid fine enough to resolve the
fastest oscillation of Z^2 (frequency ln(t/2pi)), cumulative Simpson gives
phi at every second grid point, and a monotone cubic Hermite interpolant
with the analytic slopes Ztilde^2(t_i) fills the gaps.  Slopes are clipped
to the Fritsch-Carlson monotone region, which only bites near zeros of Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from . import zetacore
from .errors import AccuracyError, DomainError, TableRangeError, ChainConsistencyError
from .zetacore import EULER_GAMMA, TWO_PI

DEFAULT_SAMPLES_PER_OSC = 64


def u_of_t_theta(t: float, theta: float) -> float:
    """Base segment length U(t, theta) = ln ln t + theta ln t.

    Needs t > e so the iterated logarithm is positive; theta in [0, 1].
    """
    if theta < 0.0 or theta > 1.0:
        raise DomainError(f"theta must lie in [0, 1], got {theta}")
    if t <= math.e:
        raise DomainError(f"u_of_t_theta requires t > e, got {t}")
    return math.log(math.log(t)) + theta * math.log(t)


def expected_lag(t: float) -> float:
    """Asymptotic lag (1 - c) t / ln t used to anchor the ladder."""
    return (1.0 - EULER_GAMMA) * t / math.log(t)


def z_tilde_squared(t, t0_floor: float = zetacore.T0_FLOOR):
    """Ztilde^2(t) = Z(t)^2 / ln(t), the ladder's derivative.  Nonnegative.

    Uses the corrected Riemann-Siegel evaluation so the systematic error
    is far below the oscillation scale.
    """
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < t0_floor):
        raise DomainError(f"z_tilde_squared requires t >= {t0_floor}")
    z = zetacore.rs_z_points(arr, corrected=True)
    out = z * z / np.log(arr)
    return float(out) if arr.ndim == 0 else out


@dataclass
class LadderTable:
    """Monotone tabulation of phi_1 over [t_grid[0], t_grid[-1]].

    ``slopes`` holds the (monotonicity-clipped) values of Ztilde^2 at the
    nodes; the interpolant is the cubic Hermite spline on (t, phi, slope),
    which reproduces node values exactly and is strictly increasing.
    """

    t_grid: np.ndarray
    phi_values: np.ndarray
    slopes: np.ndarray
    anchor: tuple[float, float]
    quadrature_tol: float
    _spline: CubicHermiteSpline = field(init=False, repr=False)

    def __post_init__(self):
        if np.any(np.diff(self.t_grid) <= 0):
            raise DomainError("ladder t_grid must be strictly increasing")
        if np.any(np.diff(self.phi_values) <= 0):
            raise DomainError("ladder phi_values must be strictly increasing")
        self._spline = CubicHermiteSpline(self.t_grid, self.phi_values, self.slopes)

    @property
    def t_low(self) -> float:
        return float(self.t_grid[0])

    @property
    def t_high(self) -> float:
        return float(self.t_grid[-1])

    def phi(self, t):
        """phi_1(t) inside the table span."""
        arr = np.asarray(t, dtype=np.float64)
        tol = 1e-9 * max(1.0, abs(self.t_high))
        if np.any(arr < self.t_grid[0] - tol) or np.any(arr > self.t_grid[-1] + tol):
            raise TableRangeError(
                f"t outside table span [{self.t_low:.6g}, {self.t_high:.6g}]")
        out = self._spline(np.clip(arr, self.t_grid[0], self.t_grid[-1]))
        return float(out) if arr.ndim == 0 else out

    def phi_iterated(self, t, r: int):
        """r-fold forward application of phi_1."""
        cur = np.asarray(t, dtype=np.float64)
        for _ in range(r):
            cur = self.phi(cur)
        return cur

    def inverse(self, target: float) -> float:
        """x with phi_1(x) = target, by bracketed root finding per node cell."""
        phi = self.phi_values
        if target < phi[0] or target > phi[-1]:
            raise TableRangeError(
                f"target {target:.6g} outside phi range [{phi[0]:.6g}, {phi[-1]:.6g}]; "
                f"extend the table (t_high past {self.t_high:.6g}) to invert it")
        i = int(np.searchsorted(phi, target, side="left"))
        if i == 0:
            return float(self.t_grid[0])
        if phi[i] == target:
            return float(self.t_grid[i])
        a, b = self.t_grid[i - 1], self.t_grid[i]
        spline = self._spline
        return float(brentq(lambda x: float(spline(x)) - target, a, b,
                            xtol=1e-10, rtol=4e-15))

    def save(self, path) -> None:
        """Plain-text table: version header, then t / phi / dphi columns.

        %.17g formatting round-trips float64 exactly, so a reloaded table
        reproduces this one bit for bit.
        """
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# zladder-table v1 tol={self.quadrature_tol!r}\n")
            fh.write("t phi dphi\n")
            for t, p, s in zip(self.t_grid, self.phi_values, self.slopes):
                fh.write(f"{t:.17g} {p:.17g} {s:.17g}\n")

    @classmethod
    def load(cls, path) -> "LadderTable":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline()
            if not header.startswith("# zladder-table v1"):
                raise DomainError(f"{path}: not a zladder-table v1 file")
            tol = float(header.rsplit("tol=", 1)[1])
            fh.readline()  # column names
            data = np.loadtxt(fh)
        data = np.atleast_2d(data)
        t, phi, dphi = data[:, 0], data[:, 1], data[:, 2]
        return cls(t, phi, dphi, (float(t[0]), float(phi[0])), tol)


def _clip_monotone(slopes: np.ndarray, t: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Fritsch-Carlson clip: slope_i <= 3 min(secant_{i-1}, secant_i)."""
    sec = np.diff(phi) / np.diff(t)
    out = np.maximum(slopes, 0.0)
    out[0] = min(out[0], 3.0 * sec[0])
    out[-1] = min(out[-1], 3.0 * sec[-1])
    np.minimum(out[1:-1], 3.0 * np.minimum(sec[:-1], sec[1:]), out=out[1:-1])
    return out


def build_ladder(t_low: float, t_high: float, tol: float = 1e-6,
                 samples_per_osc: int = DEFAULT_SAMPLES_PER_OSC,
                 t0_floor: float = zetacore.T0_FLOOR) -> LadderTable:
    """Tabulate phi_1 over [t_low, t_high] by cumulative quadrature.

    ``tol`` is the total absolute error budget for the cumulative Simpson
    integral, checked by a step-halving (Richardson) estimate; the grid is
    refined up to twice before giving up.  ``samples_per_osc`` sets the
    evaluation density per shortest Z^2 oscillation (period
    2 pi / ln(t/2pi)); 8 is enough for chain geometry, the default 64
    supports composed-product integrals downstream.
    """
    if t_low < t0_floor:
        raise DomainError(f"t_low={t_low} below working floor {t0_floor}")
    if t_high <= t_low:
        raise DomainError("t_high must exceed t_low")
    anchor_phi = t_low - expected_lag(t_low)
    spo = samples_per_osc
    for attempt in range(3):
        omega = math.log(t_high / TWO_PI)
        step = (TWO_PI / omega) / spo
        intervals = int(math.ceil((t_high - t_low) / step))
        intervals += (-intervals) % 4  # divisible by 4 for the halved-step check
        step = (t_high - t_low) / intervals
        count = intervals + 1
        z = zetacore.rs_z_uniform(t_low, step, count, corrected=True)
        f = z * z / np.log(t_low + step * np.arange(count))
        inc = (step / 3.0) * (f[0:-2:2] + 4.0 * f[1:-1:2] + f[2::2])
        inc_coarse = (2.0 * step / 3.0) * (f[0:-4:4] + 4.0 * f[2:-2:4] + f[4::4])
        # Richardson cell estimates are signed and cancel strongly for an
        # oscillatory integrand; the net sum estimates the cumulative error.
        cell_err = (inc[0::2] + inc[1::2] - inc_coarse) / 15.0
        total_err = abs(float(np.sum(cell_err)))
        if total_err <= tol:
            break
        if attempt == 2:
            worst = int(np.argmax(np.abs(cell_err)))
            a = t_low + 4 * step * worst
            raise AccuracyError(
                f"cumulative quadrature error estimate {total_err:.3g} > tol {tol:g}; "
                f"worst subinterval [{a:.6g}, {a + 4 * step:.6g}]")
        spo *= 2
    # Nonnegative integrand: increments are positive except exactly at
    # zeros of Z; nudge any flat cell so the table stays strictly monotone.
    tiny = 1e-30 * max(1.0, float(np.max(inc)))
    np.maximum(inc, tiny, out=inc)
    # pairwise/extended-precision cumulative sum keeps rounding ~1e-12
    phi = anchor_phi + np.concatenate(
        ([0.0], np.cumsum(inc.astype(np.longdouble)))).astype(np.float64)
    nodes = t_low + (2.0 * step) * np.arange(len(phi))
    slopes = _clip_monotone(f[::2].copy(), nodes, phi)
    return LadderTable(nodes, phi, slopes, (t_low, anchor_phi), tol)


def ladder_inverse(table: LadderTable, target: float) -> float:
    """x with |phi_1(x) - target| within the table tolerance."""
    return table.inverse(target)


@dataclass(frozen=True)
class SegmentChain:
    """Base segment [T, T+U] and its k reverse iterates, left to right.

    ``iterates[r-1]`` is the r-th reverse iterate; ``gaps[r-1]`` is the
    distance between iterate r-1 (the base for r=1) and iterate r.
    """

    base: tuple[float, float]
    iterates: list[tuple[float, float]]
    gaps: np.ndarray
    u: float

    @property
    def k(self) -> int:
        return len(self.iterates)

    def segment(self, r: int) -> tuple[float, float]:
        """Segment r, with r = 0 the base."""
        return self.base if r == 0 else self.iterates[r - 1]

    def contains(self, r: int, x: float, slack: float = 1e-7) -> bool:
        a, b = self.segment(r)
        return a - slack < x < b + slack

    def gap_law_ratios(self) -> np.ndarray:
        """gaps / ((1-c) T / ln T), the spacing-law diagnostic."""
        return self.gaps / expected_lag(self.base[0])


def reverse_iterates(table: LadderTable, t_base: float, u: float, k: int) -> SegmentChain:
    """Apply the inverse ladder k times to both endpoints of [T, T+U]."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if u <= 0:
        raise DomainError(f"segment length must be positive, got {u}")
    lo, hi = t_base, t_base + u
    segs = []
    for r in range(1, k + 1):
        try:
            lo, hi = table.inverse(lo), table.inverse(hi)
        except TableRangeError as exc:
            need = t_base + u + k * expected_lag(t_base) * 1.5
            raise TableRangeError(
                f"table too short for iterate {r} of {k}: {exc}; "
                f"rebuild with t_high >= {need:.6g}") from exc
        segs.append((lo, hi))
    gaps = np.empty(k)
    prev_hi = t_base + u
    for r, (a, b) in enumerate(segs, start=1):
        gaps[r - 1] = a - prev_hi
        prev_hi = b
    chain = SegmentChain((t_base, t_base + u), segs, gaps, u)
    validate_chain(chain, table)
    return chain


def validate_chain(chain: SegmentChain, table: LadderTable,
                   tol: float | None = None) -> dict:
    """Check ordering, the phi mapping between iterates, and iterate sizes.

    Raises ChainConsistencyError on violation, returns diagnostics
    otherwise.  The mapping tolerance defaults to the table's quadrature
    tolerance plus root-finding slack.
    """
    tol = tol if tol is not None else max(10.0 * table.quadrature_tol, 1e-6)
    if np.any(chain.gaps <= 0):
        raise ChainConsistencyError(
            f"iterates out of order: gaps {chain.gaps.tolist()}")
    worst_map = 0.0
    for r in range(1, chain.k + 1):
        a, b = chain.segment(r)
        pa, pb = chain.segment(r - 1)
        res = max(abs(float(table.phi(a)) - pa), abs(float(table.phi(b)) - pb))
        worst_map = max(worst_map, res)
        if res > tol:
            raise ChainConsistencyError(
                f"phi does not map iterate {r} onto iterate {r-1}: residual {res:.3g}")
    lengths = [b - a for a, b in chain.iterates]
    if max(lengths) > 3.0 * chain.u or min(lengths) < chain.u / 3.0:
        raise ChainConsistencyError(
            f"iterate lengths {lengths} outside [U/3, 3U] with U={chain.u:.6g}")
    return {"map_residual": worst_map, "lengths": lengths,
            "gap_law_ratios": chain.gap_law_ratios().tolist()}
