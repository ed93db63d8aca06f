"""Evaluation of theta(t), Z(t), zeta(s) and the Mobius Dirichlet series.

Everything downstream (local spectra, ladders, mean-value points) consumes
these primitives.  Two independent routes to |zeta(1/2+it)| are kept
deliberately separate: the Riemann-Siegel main sum (fast, O(sqrt(t)) terms)
and Euler-Maclaurin summation (slow, O(t) terms, used as the in-package
oracle).  All functions are pure; a MobiusSieve is built once and is
read-only afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import bernoulli, digamma, loggamma

from .errors import AccuracyError, DomainError, PoleError

TWO_PI = 2.0 * math.pi
EULER_GAMMA = float(np.euler_gamma)

# Working floor for the asymptotic regime used by the ladder machinery.
T0_FLOOR = 1000.0

# Coefficient of the t^(-1/4) remainder envelope of the main sum.  The
# remainder term is only known up to a constant; 3 is a conservative choice
# validated against the Euler-Maclaurin oracle (observed errors stay below
# 0.6 * t^(-1/4) over t in [1e3, 1e7]).
RS_REMAINDER_COEFF = 3.0
# Same role for the first-order corrected formula, envelope c * t^(-3/4).
RS_CORRECTED_COEFF = 10.0

# theta(t) asymptotic tail: sum_n (1 - 2^(1-2n)) |B_2n| / (4n(2n-1)) t^(1-2n).
# Four terms leave a remainder below 1e-16 relative for t >= 32.
_THETA_SWITCH = 32.0
_ABS_B2N = (1.0 / 6.0, 1.0 / 30.0, 1.0 / 42.0, 1.0 / 30.0)
_THETA_COEFFS = tuple(
    (1.0 - 2.0 ** (1 - 2 * n)) * b / (4 * n * (2 * n - 1))
    for n, b in zip((1, 2, 3, 4), _ABS_B2N)
)

_B2K = bernoulli(60)  # B_0 .. B_60, used by the Euler-Maclaurin tail


@dataclass(frozen=True)
class ThetaValue:
    """theta(t) with its first two derivatives."""

    t: float
    theta: float
    derivative: float
    second_derivative: float


@dataclass(frozen=True)
class ZEvaluation:
    """One Riemann-Siegel evaluation of Z(t)."""

    t: float
    z: float
    truncation_index: int
    remainder_bound: float
    corrected: bool


class ZetaMethod(Enum):
    EULER_MACLAURIN = "euler_maclaurin"
    DIRICHLET_SERIES = "dirichlet_series"


@dataclass(frozen=True)
class ComplexZetaValue:
    """zeta(sigma + it) or its Dirichlet-inverse partial sum."""

    sigma: float
    t: float
    value: complex
    method: ZetaMethod
    tail_bound: float


@dataclass(frozen=True)
class MobiusSieve:
    """mu(1..limit) as an int8 array; values[0] is unused."""

    limit: int
    values: np.ndarray

    def mu(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise DomainError(f"n={n} outside sieve range 1..{self.limit}")
        return int(self.values[n])

    def mertens(self, x: int) -> int:
        """Partial sum M(x) = sum_{n<=x} mu(n)."""
        if not 1 <= x <= self.limit:
            raise DomainError(f"x={x} outside sieve range 1..{self.limit}")
        return int(self.values[1 : x + 1].sum(dtype=np.int64))


# ----------------------------------------------------------------------
# theta and tau
# ----------------------------------------------------------------------

def theta_grid(t: np.ndarray) -> np.ndarray:
    """Vectorized theta(t) by the asymptotic expansion.

    The four-term tail is already accurate to ~1e-11 absolute at the main
    sum's domain edge t = 2 pi and to full double precision past t = 32.
    """
    t = np.asarray(t, dtype=np.float64)
    val = t * (0.5 * np.log(t / TWO_PI)) - 0.5 * t - math.pi / 8.0
    ti = 1.0 / t
    t2 = ti * ti
    p = ti.copy()
    for c in _THETA_COEFFS:
        val += c * p
        p = p * t2
    return val


def theta(t: float) -> ThetaValue:
    """Phase function theta(t) = -t/2 ln(pi) + Im ln Gamma(1/4 + it/2).

    Uses the asymptotic expansion above t = 32 (relative accuracy well
    beyond 1e-12 there) and direct complex log-gamma below.  The second
    derivative tends to 1/(2t).
    """
    if t < 0:
        raise DomainError(f"theta requires t >= 0, got {t}")
    if t >= _THETA_SWITCH:
        val = float(theta_grid(np.float64(t)))
        deriv = 0.5 * math.log(t / TWO_PI)
        second = 0.5 / t
        ti2 = 1.0 / (t * t)
        p = ti2
        for n, c in enumerate(_THETA_COEFFS, start=1):
            deriv -= (2 * n - 1) * c * p
            second += (2 * n) * (2 * n - 1) * c * p / t
            p = p * ti2
        return ThetaValue(t, val, deriv, second)
    z = complex(0.25, 0.5 * t)
    val = -0.5 * t * math.log(math.pi) + loggamma(z).imag
    deriv = -0.5 * math.log(math.pi) + 0.5 * digamma(z).real
    # theta'' by difference of theta'; accurate enough (~1e-8) for the
    # small-t regime, which sits far below the working floor.
    h = 1e-4
    dp = -0.5 * math.log(math.pi) + 0.5 * digamma(complex(0.25, 0.5 * (t + h))).real
    if t >= h:
        dm = -0.5 * math.log(math.pi) + 0.5 * digamma(complex(0.25, 0.5 * (t - h))).real
        second = (dp - dm) / (2 * h)
    else:
        second = (dp - deriv) / h
    return ThetaValue(t, float(val), float(deriv), float(second))


def tau(t: float) -> float:
    """tau(t) = sqrt(t / 2pi); its floor truncates the main sum."""
    if t < 0:
        raise DomainError(f"tau requires t >= 0, got {t}")
    return math.sqrt(t / TWO_PI)


# ----------------------------------------------------------------------
# Riemann-Siegel Z
# ----------------------------------------------------------------------

def _rs_psi(p: np.ndarray) -> np.ndarray:
    """First correction coefficient cos(2pi(p^2-p-1/16)) / cos(2pi p).

    Entire despite the cosine denominator; near the removable points
    p = 1/4, 3/4 a series form keeps full accuracy.
    """
    p = np.asarray(p, dtype=np.float64)
    out = np.empty_like(p)
    near = np.zeros(p.shape, dtype=bool)
    for p0 in (0.25, 0.75):
        m = np.abs(p - p0) < 1e-3
        if np.any(m):
            u = p[m] - p0
            sgn = -1.0 if p0 == 0.25 else 1.0
            a = TWO_PI * u * (u + sgn * 0.5)
            b = TWO_PI * u
            out[m] = (u + sgn * 0.5) * sgn * (1.0 + (b * b - a * a) / 6.0)
            near |= m
    rest = ~near
    pr = p[rest]
    out[rest] = np.cos(TWO_PI * (pr * pr - pr - 1.0 / 16.0)) / np.cos(TWO_PI * pr)
    return out


def _rs_correction(ts: np.ndarray) -> np.ndarray:
    """(-1)^(N-1) tau^(-1/2) Psi(frac(tau)) for each t."""
    taus = np.sqrt(ts / TWO_PI)
    floors = np.floor(taus)
    p = taus - floors
    sign = np.where(floors.astype(np.int64) % 2 == 1, 1.0, -1.0)
    return sign * _rs_psi(p) / np.sqrt(taus)


def rs_z_points(ts, corrected: bool = True) -> np.ndarray:
    """Z(t) main sum at arbitrary points, vectorized.

    Points are grouped by common truncation index so each group shares one
    phase matrix.  Memory stays bounded by the internal chunk size.
    """
    ts = np.asarray(ts, dtype=np.float64)
    scalar = ts.ndim == 0
    flat = np.atleast_1d(ts)
    if np.any(flat < TWO_PI):
        raise DomainError("Riemann-Siegel main sum needs t >= 2*pi")
    order = np.argsort(flat, kind="stable")
    sorted_t = flat[order]
    trunc = np.floor(np.sqrt(sorted_t / TWO_PI)).astype(np.int64)
    res = np.empty_like(sorted_t)
    chunk = 256
    i = 0
    m = len(sorted_t)
    while i < m:
        j = i + 1
        while j < m and trunc[j] == trunc[i] and j - i < chunk:
            j += 1
        tt = sorted_t[i:j]
        n = np.arange(1, trunc[i] + 1, dtype=np.float64)
        phase = theta_grid(tt)[:, None] - np.outer(tt, np.log(n))
        np.cos(phase, out=phase)
        res[i:j] = 2.0 * (phase @ (1.0 / np.sqrt(n)))
        i = j
    if corrected:
        res += _rs_correction(sorted_t)
    out = np.empty_like(flat)
    out[order] = res
    return out[0] if scalar else out


def rs_z_uniform(t0: float, step: float, count: int, corrected: bool = True,
                 block: int = 1024) -> np.ndarray:
    """Z(t) on the uniform grid t0 + j*step, j = 0..count-1.

    Writes the main sum as 2 Re(e^{i theta(t)} W(t)) with
    W(t) = sum_n n^{-1/2-it} and advances W along the grid by elementwise
    rotations, so each point costs one complex matrix-vector row instead of
    a fresh batch of cosines.  Sections are split where floor(tau) changes.
    """
    if t0 < TWO_PI:
        raise DomainError("Riemann-Siegel main sum needs t >= 2*pi")
    ts = t0 + step * np.arange(count)
    w = np.empty(count, dtype=np.complex128)
    tau0 = math.sqrt(t0 / TWO_PI)
    tau1 = math.sqrt(ts[-1] / TWO_PI)
    crossings = TWO_PI * np.arange(math.floor(tau0) + 1, math.floor(tau1) + 1) ** 2
    cuts = np.searchsorted(ts, crossings, side="right")
    starts = np.concatenate(([0], cuts))
    ends = np.concatenate((cuts, [count]))
    for s0, s1 in zip(starts, ends):
        if s1 <= s0:
            continue
        t_start = ts[s0]
        n_terms = int(math.floor(math.sqrt(t_start / TWO_PI)))
        logn = np.log(np.arange(1, n_terms + 1, dtype=np.float64))
        v = np.exp(-0.5 * logn) * np.exp(-1j * (t_start * logn))
        rot = np.exp(-1j * (step * logn))
        m_loc = s1 - s0
        b_sz = min(block, m_loc)
        powers = np.empty((b_sz, n_terms), dtype=np.complex128)
        powers[0] = 1.0
        if b_sz > 1:
            np.cumprod(np.broadcast_to(rot, (b_sz - 1, n_terms)), axis=0,
                       out=powers[1:])
        rot_block = powers[-1] * rot
        for i0 in range(0, m_loc, b_sz):
            b = min(b_sz, m_loc - i0)
            w[s0 + i0 : s0 + i0 + b] = powers[:b] @ v
            if i0 + b < m_loc:
                v = v * rot_block
    z = 2.0 * np.real(np.exp(1j * theta_grid(ts)) * w)
    if corrected:
        z += _rs_correction(ts)
    return z


def riemann_siegel_z(t: float, corrected: bool = True) -> ZEvaluation:
    """Z(t) by the Riemann-Siegel main sum over n <= floor(tau(t)).

    With ``corrected`` the standard first-order correction term is added
    (the cosine-ratio coefficient at the fractional part of tau); this is
    an accuracy booster beyond the bare main sum and tightens the reported
    remainder envelope from 3 t^(-1/4) to 10 t^(-3/4).
    """
    if t < TWO_PI:
        raise DomainError(f"riemann_siegel_z requires t >= 2*pi, got {t}")
    z = float(rs_z_points(np.float64(t), corrected=corrected))
    n_trunc = int(math.floor(tau(t)))
    if corrected:
        bound = RS_CORRECTED_COEFF * t ** -0.75
    else:
        bound = RS_REMAINDER_COEFF * t ** -0.25
    return ZEvaluation(t, z, n_trunc, bound, corrected)


# ----------------------------------------------------------------------
# Euler-Maclaurin zeta (the in-package oracle route)
# ----------------------------------------------------------------------

def _em_cutoff(sigma: float, t: float) -> int:
    """Truncation length so the Bernoulli tail decays to ~1e-14."""
    return max(20, int(math.ceil((abs(t) + 10.0) * 0.3)),
               int(math.ceil(2.0 * abs(sigma))))


def _em_tail(s, big_n: int, max_terms: int = 25):
    """0.5 N^-s + N^(1-s)/(s-1) + Bernoulli corrections, vectorized in s.

    The rising product s(s+1)...(s+2k-2) is carried pre-divided by
    N^(2k-1); each factor (s+j)/N stays O(1), so nothing overflows even
    at |s| ~ 1e7 where the raw product would pass 1e300.
    """
    s = np.asarray(s, dtype=np.complex128)
    ln_n = math.log(big_n)
    n_pow = np.exp(-s * ln_n)
    tail = 0.5 * n_pow + n_pow * big_n / (s - 1.0)
    scaled_rising = s / big_n
    for k in range(1, max_terms + 1):
        coef = _B2K[2 * k] / math.factorial(2 * k)
        term = coef * scaled_rising * n_pow
        tail = tail + term
        if np.max(np.abs(term)) < 1e-17:
            break
        scaled_rising = (scaled_rising * ((s + (2 * k - 1)) / big_n)
                         * ((s + 2 * k) / big_n))
    return tail


def zeta_euler_maclaurin(sigma: float, t: float,
                         tol: float | None = None) -> ComplexZetaValue:
    """zeta(sigma + it) by Euler-Maclaurin summation.

    Valid for sigma > 0 away from the pole at s = 1.  Cost grows linearly
    with |t|; this is the deliberate slow-but-independent route used to
    check the Riemann-Siegel evaluations.  ``tol=None`` accepts the best
    accuracy double precision affords at this height (reported via
    ``tail_bound``); an explicit unreachable ``tol`` raises.
    """
    if sigma <= 0:
        raise DomainError(f"Euler-Maclaurin route requires sigma > 0, got {sigma}")
    if abs(complex(sigma - 1.0, t)) < 1e-6:
        raise PoleError("zeta has a pole at s = 1")
    # double precision floor: phase arguments t*ln(n) round at ~eps*t*ln(N)
    achievable = max(1e-14, 4.0 * abs(t) * 1.1e-16 * math.log(_em_cutoff(sigma, t) + 2))
    if tol is not None and tol < achievable:
        raise AccuracyError(
            f"tol={tol:g} below achievable {achievable:g} at t={t:g} in double precision")
    big_n = _em_cutoff(sigma, t)
    n = np.arange(1, big_n, dtype=np.float64)
    s = complex(sigma, t)
    head = np.sum(n ** (-sigma) * np.exp(-1j * t * np.log(n)))
    val = head + complex(_em_tail(s, big_n))
    return ComplexZetaValue(sigma, t, complex(val), ZetaMethod.EULER_MACLAURIN,
                            achievable)


def zeta_em_grid(sigma: float, t0: float, step: float, count: int) -> np.ndarray:
    """zeta(sigma + it) on a uniform t grid, recurrence-accelerated.

    Shares the Euler-Maclaurin truncation across the grid (valid when the
    grid span is small next to t0) and rotates the partial sums along the
    grid exactly as rs_z_uniform does.
    """
    ts = t0 + step * np.arange(count)
    big_n = _em_cutoff(sigma, float(ts[-1]))
    logn = np.log(np.arange(1, big_n, dtype=np.float64))
    v = np.exp(-sigma * logn) * np.exp(-1j * (t0 * logn))
    rot = np.exp(-1j * (step * logn))
    out = np.empty(count, dtype=np.complex128)
    b_sz = min(256, count)
    powers = np.empty((b_sz, big_n - 1), dtype=np.complex128)
    powers[0] = 1.0
    if b_sz > 1:
        np.cumprod(np.broadcast_to(rot, (b_sz - 1, big_n - 1)), axis=0, out=powers[1:])
    rot_block = powers[-1] * rot
    for i0 in range(0, count, b_sz):
        b = min(b_sz, count - i0)
        out[i0 : i0 + b] = powers[:b] @ v
        if i0 + b < count:
            v = v * rot_block
    out += _em_tail(sigma + 1j * ts, big_n)
    return out


# ----------------------------------------------------------------------
# Mobius function and its Dirichlet series
# ----------------------------------------------------------------------

def mobius_sieve(n_max: int) -> MobiusSieve:
    """Sieve mu(1..n_max).

    Vectorized sieve of Eratosthenes flavor, O(n log log n) element
    updates; fast enough (about a second at 1e7) that a strictly linear
    sieve is not worth a compiled dependency.
    """
    if n_max < 1:
        raise DomainError(f"mobius_sieve requires n_max >= 1, got {n_max}")
    is_prime = np.ones(n_max + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, int(math.isqrt(n_max)) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    mu = np.ones(n_max + 1, dtype=np.int8)
    for p in np.flatnonzero(is_prime):
        mu[p::p] *= -1
        sq = int(p) * int(p)
        if sq <= n_max:
            mu[sq::sq] = 0
    mu[0] = 0
    return MobiusSieve(n_max, mu)


def mobius_dirichlet(sigma: float, t: float, sieve: MobiusSieve,
                     tol: float | None = None) -> ComplexZetaValue:
    """Partial sum of sum_n mu(n) n^(-sigma-it), the inverse of zeta.

    Only meaningful in the absolute-convergence region sigma > 1; the
    reported tail bound is the crude envelope N^(1-sigma)/(sigma-1).  When
    ``tol`` is given the sieve must afford it, otherwise the sieve's own
    tail bound is accepted.
    """
    if sigma <= 1.0:
        raise DomainError(
            f"Mobius series diverges for sigma <= 1 (got sigma={sigma})")
    big_n = sieve.limit
    tail = big_n ** (1.0 - sigma) / (sigma - 1.0)
    if tol is not None and tail > tol:
        needed = math.ceil((tol * (sigma - 1.0)) ** (-1.0 / (sigma - 1.0)))
        raise AccuracyError(
            f"sieve limit {big_n} gives tail bound {tail:.3g} > tol {tol:g}; "
            f"need n_max >= {needed}")
    n = np.flatnonzero(sieve.values).astype(np.float64)
    mu = sieve.values[np.flatnonzero(sieve.values)].astype(np.float64)
    logn = np.log(n)
    val = np.sum(mu * np.exp(-sigma * logn) * np.exp(-1j * t * logn))
    return ComplexZetaValue(sigma, t, complex(val), ZetaMethod.DIRICHLET_SERIES,
                            float(tail))


def zeta_two_sigma(sigma: float) -> float:
    """zeta(2 sigma), accurate to ~1e-13; needs 2 sigma past the pole."""
    if 2.0 * sigma <= 1.0 + 1e-6:
        raise DomainError(f"zeta(2 sigma) undefined at sigma = {sigma}")
    return float(zeta_euler_maclaurin(2.0 * sigma, 0.0).value.real)
