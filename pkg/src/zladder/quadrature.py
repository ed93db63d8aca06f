"""Adaptive integration of |zeta(sigma+it)|^2 and ladder-composed products,
plus the mean-value points d and e.

The composed integrand prod_r Ztilde^2(phi_1^r(t)) is deceptively hostile:
its instantaneous frequency is the base oscillation frequency multiplied
by the derivative of the iterated ladder map, which itself is the product
of the inner factors.  Near tall peaks the local wavelength shrinks by one
to two orders of magnitude, so fixed panel widths fail and bisection-style
adaptivity is required.  Panels are refined breadth first with batched
integrand evaluations to keep everything vectorized.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import zetacore
from .errors import AccuracyError, ChainConsistencyError, DomainError, ResolutionError
from .ladder import LadderTable, SegmentChain, z_tilde_squared
from .zetacore import TWO_PI

_GL_NODES, _GL_WEIGHTS = leggauss(15)


class Integrand(Enum):
    ZETA_SQ_SIGMA = "zeta_sq_sigma"
    ZTILDE_PRODUCT = "ztilde_product"
    COMPOSED_PRODUCT = "composed_product"


class PointKind(Enum):
    D_POINT = "d_point"
    E_POINT = "e_point"


@dataclass(frozen=True)
class IntegralResult:
    value: float
    abs_error_estimate: float
    panels: int
    integrand_id: Integrand


@dataclass(frozen=True)
class MeanValuePoint:
    """Root of the mean-value equation I = L * F(x) on the k-th iterate."""

    location: float
    kind: PointKind
    residual: float
    iterate_images: np.ndarray  # phi_1^r(location), r = 0, 1, ...


def adaptive_panels(fvec, a: float, b: float, tol: float,
                    init_panels: int = 32, max_depth: int = 16,
                    batch: int = 256):
    """Integrate a vectorized integrand by bisection-adaptive GL15 panels.

    Per-panel acceptance compares one GL15 pass against the two half-panel
    passes; a panel is accepted at its share w/(b-a) of ``tol``.  Returns
    (value, error_estimate, panels_accepted).
    """
    if b <= a:
        raise DomainError("integration interval must have b > a")
    edges = np.linspace(a, b, init_panels + 1)
    stack = [(edges[i], edges[i + 1], 0) for i in range(init_panels)]
    total = 0.0
    err_total = 0.0
    accepted = 0
    span = b - a
    while stack:
        todo = stack[:batch]
        stack = stack[batch:]
        xs = np.empty((len(todo), 3, 15))
        for i, (lo, hi, _) in enumerate(todo):
            mid = 0.5 * (lo + hi)
            xs[i, 0] = 0.5 * (hi - lo) * _GL_NODES + 0.5 * (lo + hi)
            xs[i, 1] = 0.5 * (mid - lo) * _GL_NODES + 0.5 * (lo + mid)
            xs[i, 2] = 0.5 * (hi - mid) * _GL_NODES + 0.5 * (mid + hi)
        vals = np.asarray(fvec(xs.reshape(-1))).reshape(len(todo), 3, 15)
        coarse = vals[:, 0] @ _GL_WEIGHTS
        halves = (vals[:, 1] + vals[:, 2]) @ _GL_WEIGHTS
        for i, (lo, hi, depth) in enumerate(todo):
            w = hi - lo
            i_coarse = 0.5 * w * coarse[i]
            i_fine = 0.25 * w * halves[i]
            err = abs(i_fine - i_coarse)
            if err <= tol * max(w / span, 1e-3) or depth >= max_depth:
                total += i_fine
                err_total += err
                accepted += 2
            else:
                mid = 0.5 * (lo + hi)
                stack.append((lo, mid, depth + 1))
                stack.append((mid, hi, depth + 1))
    return total, err_total, accepted


class ZetaSqWindow:
    """|zeta(sigma + it)|^2 over a short t window, spline-accelerated.

    The Euler-Maclaurin grid evaluation costs O(t) per window but the
    spline makes every subsequent lookup O(1), which is what the composed
    integrals and the d-point scans need.
    """

    def __init__(self, sigma: float, t_from: float, t_to: float,
                 step: float = 0.01):
        if sigma <= 1.0:
            raise DomainError(f"window requires sigma > 1, got {sigma}")
        if t_to <= t_from:
            raise DomainError("window requires t_to > t_from")
        count = int(math.ceil((t_to - t_from) / step)) + 1
        ts = np.linspace(t_from, t_to, count)
        vals = zetacore.zeta_em_grid(sigma, float(ts[0]),
                                     float(ts[1] - ts[0]), count)
        self._init_from_grid(sigma, ts, np.abs(vals) ** 2)

    def _init_from_grid(self, sigma, ts, sq_vals):
        self.sigma = sigma
        self.t_from = float(ts[0])
        self.t_to = float(ts[-1])
        self.grid = (ts, sq_vals)
        self._spline = CubicSpline(ts, sq_vals)

    @classmethod
    def from_grid(cls, sigma: float, ts: np.ndarray,
                  sq_vals: np.ndarray) -> "ZetaSqWindow":
        """Rebuild a window from its stored grid (cache reload path)."""
        win = cls.__new__(cls)
        win._init_from_grid(sigma, ts, sq_vals)
        return win

    def __call__(self, t):
        arr = np.asarray(t, dtype=np.float64)
        if np.any(arr < self.t_from - 1e-9) or np.any(arr > self.t_to + 1e-9):
            raise DomainError(
                f"t outside zeta window [{self.t_from:.6g}, {self.t_to:.6g}]")
        return self._spline(arr)


def integrate_zeta_sq(sigma: float, t_from: float, t_to: float,
                      tol: float = 1e-8) -> IntegralResult:
    """Adaptive integral of |zeta(sigma + it)|^2 over [t_from, t_to]."""
    if sigma <= 1.0:
        raise DomainError(f"integrate_zeta_sq requires sigma > 1, got {sigma}")
    if t_to <= t_from:
        raise DomainError("t_to must exceed t_from")
    window = ZetaSqWindow(sigma, t_from - 0.5, t_to + 0.5)
    value, err, panels = adaptive_panels(window, t_from, t_to, tol,
                                         init_panels=max(16, int(t_to - t_from)))
    if err > tol:
        raise AccuracyError(
            f"integrate_zeta_sq error estimate {err:.3g} exceeds tol {tol:g}")
    return IntegralResult(float(value), float(err), panels, Integrand.ZETA_SQ_SIGMA)


def _composed_integrand(chain: SegmentChain, table: LadderTable,
                        window: ZetaSqWindow | None):
    """Vectorized prod_{r<k} Ztilde^2(phi^r(t)) [* |zeta(s+i phi^k(t))|^2]."""
    k = chain.k

    def fvec(ts):
        vals = np.ones_like(ts)
        cur = ts
        for _ in range(k):
            vals = vals * z_tilde_squared(cur)
            cur = table.phi(cur)
        if window is not None:
            vals = vals * window(cur)
        return vals

    return fvec


def _window_for(chain: SegmentChain, sigma: float) -> ZetaSqWindow:
    lo, hi = chain.base
    return ZetaSqWindow(sigma, lo - 1.0, hi + 1.0)


def integrate_composed(chain: SegmentChain, table: LadderTable,
                       sigma: float | None = None, tol: float = 1e-6,
                       window: ZetaSqWindow | None = None) -> IntegralResult:
    """Integral over the k-th iterate of the ladder-composed product.

    Without ``sigma`` this is the change-of-variables identity and must
    return U up to tolerances; with ``sigma`` the mean-value law makes it
    approximately zeta(2 sigma) U.
    """
    if sigma is not None:
        if sigma <= 1.0:
            raise DomainError(f"sigma must exceed 1, got {sigma}")
        if window is None:
            window = _window_for(chain, sigma)
    else:
        window = None
    a, b = chain.segment(chain.k)
    # verify the iterate images stay inside their segments before integrating
    probes = np.linspace(a, b, 17)
    cur = probes
    for r in range(1, chain.k + 1):
        cur = table.phi(cur)
        lo, hi = chain.segment(chain.k - r)
        slack = 1e-6 * max(1.0, hi)
        if np.any(cur < lo - slack) or np.any(cur > hi + slack):
            raise ChainConsistencyError(
                f"iterate images escape segment {chain.k - r} under phi^{r}")
    base_width = TWO_PI / math.log(b / TWO_PI)  # shortest Z^2 period
    init = max(16, int(math.ceil((b - a) / (0.25 * base_width))))
    fvec = _composed_integrand(chain, table, window)
    value, err, panels = adaptive_panels(fvec, a, b, tol, init_panels=init)
    if err > tol:
        raise AccuracyError(
            f"composed integral error estimate {err:.3g} exceeds tol {tol:g}")
    kind = Integrand.COMPOSED_PRODUCT if sigma is not None else Integrand.ZTILDE_PRODUCT
    return IntegralResult(float(value), float(err), panels, kind)


def _scan_for_root(f, a: float, b: float, integral: float, n_scan: int,
                   max_scan: int = 1 << 16):
    """Find the leftmost sign change of g = I - L f on the open interval."""
    length = b - a
    n = n_scan
    while True:
        xs = np.linspace(a, b, n + 2)[1:-1]
        g = integral - length * np.asarray(f(xs))
        flips = np.flatnonzero(np.diff(np.sign(g)) != 0)
        if len(flips):
            i = int(flips[0])
            return xs[i], xs[i + 1]
        if n >= max_scan:
            raise ResolutionError(
                f"no sign change of the mean-value equation on a {n}-point scan")
        n *= 2


def _mean_value_root(f, chain: SegmentChain, table: LadderTable,
                     integral: float, tol: float, kind: PointKind,
                     n_scan: int) -> MeanValuePoint:
    a, b = chain.segment(chain.k)
    length = b - a
    lo, hi = _scan_for_root(f, a, b, integral, n_scan)
    root = float(brentq(
        lambda x: integral - length * float(f(np.asarray([x]))[0]),
        lo, hi, xtol=1e-10, rtol=4e-15))
    residual = abs(integral - length * float(f(np.asarray([root]))[0]))
    if residual > tol * abs(integral):
        raise AccuracyError(
            f"mean-value residual {residual:.3g} exceeds {tol:g} * I")
    if min(root - a, b - root) < tol * length:
        warnings.warn(f"mean-value root {root:.6g} within tolerance of the "
                      f"iterate boundary", stacklevel=2)
    n_images = chain.k + 1 if kind is PointKind.D_POINT else chain.k
    images = np.empty(n_images)
    cur = root
    for r in range(n_images):
        images[r] = cur
        if r < n_images - 1:
            cur = float(table.phi(cur))
    # inclusion per the reverse chain: phi^r(x) lies in segment k - r
    for r in range(n_images):
        if not chain.contains(chain.k - r, images[r]):
            raise ChainConsistencyError(
                f"phi^{r}(x) = {images[r]:.6g} outside segment {chain.k - r}")
    return MeanValuePoint(root, kind, residual, images)


def find_d_point(chain: SegmentChain, table: LadderTable, sigma: float,
                 tol: float = 1e-6, n_scan: int = 512,
                 integral: IntegralResult | None = None,
                 window: ZetaSqWindow | None = None) -> MeanValuePoint:
    """Mean-value point of the sigma-weighted composed integral.

    Solves I = L * F(d) with F(d) = |zeta(sigma + i phi^k(d))|^2 *
    prod_{r<k} Ztilde^2(phi^r(d)); F is continuous and attains values on
    both sides of its mean I/L, so a sign change exists.  The leftmost
    root of the scan is refined and returned.
    """
    if window is None:
        window = _window_for(chain, sigma)
    if integral is None:
        integral = integrate_composed(chain, table, sigma=sigma, tol=tol,
                                      window=window)
    f = _composed_integrand(chain, table, window)
    point = _mean_value_root(f, chain, table, integral.value, tol,
                             PointKind.D_POINT, n_scan)
    return point


def find_e_point(chain: SegmentChain, table: LadderTable, tol: float = 1e-6,
                 n_scan: int = 512) -> MeanValuePoint:
    """Mean-value point of the bare composed product: F(e) = U / L."""
    f = _composed_integrand(chain, table, None)
    return _mean_value_root(f, chain, table, chain.u, tol,
                            PointKind.E_POINT, n_scan)


def integrals_to_csv(results, path) -> None:
    """Write IntegralResult rows as CSV."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("value,abs_error_estimate,panels,integrand_id\n")
        for r in results:
            fh.write(f"{r.value:.12g},{r.abs_error_estimate:.12g},"
                     f"{r.panels},{r.integrand_id.value}\n")


def points_to_csv(points, path) -> None:
    """Write MeanValuePoint rows as CSV; images joined with semicolons."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("location,kind,residual,iterate_images\n")
        for p in points:
            images = ";".join(f"{x:.12g}" for x in p.iterate_images)
            fh.write(f"{p.location:.12g},{p.kind.value},{p.residual:.12g},"
                     f"{images}\n")
