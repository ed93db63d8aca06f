"""The full factorization pipeline for the critical-line quotient system.

A run at parameters (T, theta, k, sigma) builds the ladder and the reverse
segment chain, locates the mean-value points d and e, reads off the
control sequences alpha_0..alpha_k and beta_1..beta_k as ladder images,
and evaluates both sides of the factorization

    prod_r |Z(alpha_r) / Z(beta_r)|  ~  sqrt(zeta(2 sigma)) |sum_n mu(n) n^(-sigma - i alpha_0)|

The left side lives on the critical line, the right side in the
absolute-convergence half plane.  At finite height the relation is a
trend, not an identity; what IS exact (up to float rounding) is that
lhs/rhs_zeta equals the square root of the ratio of the two product-law
diagnostics, and every run checks that identity at the 1e-10 level.
"""

from __future__ import annotations

import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import spectral, zetacore
from .config import ExperimentConfig
from .errors import ChainConsistencyError, DomainError, SingularPointError, TableRangeError
from .ladder import (LadderTable, SegmentChain, build_ladder, expected_lag,
                     reverse_iterates, u_of_t_theta, validate_chain)
from .quadrature import (MeanValuePoint, ZetaSqWindow, find_d_point,
                         find_e_point, integrate_composed)

# Loose empirical band for the consecutive-spacing law at desk heights.
SPACING_BAND = (0.6, 1.4)


@dataclass(frozen=True)
class ControlSequences:
    """The alpha and beta control heights of one metamorphosis run."""

    alphas: np.ndarray  # alpha_0 .. alpha_k
    betas: np.ndarray   # beta_1 .. beta_k
    sigma: float
    t_base: float
    theta: float
    k: int
    epsilon: float


@dataclass(frozen=True)
class QSystemValue:
    """Quotient of two oscillator multiforms, prod |Z(x_r)/Z(y_r)|."""

    xs: np.ndarray
    ys: np.ndarray
    value: float


@dataclass
class MetamorphosisReport:
    """Both sides of the factorization plus every intermediate check."""

    sequences: ControlSequences
    lhs: float
    rhs: float          # sqrt(zeta(2s)) * |Mobius partial sum at alpha_0|
    rhs_zeta: float     # sqrt(zeta(2s)) / |zeta(sigma + i alpha_0)|
    ratio: float        # lhs / rhs
    ratio_zeta: float   # lhs / rhs_zeta
    d_point: MeanValuePoint
    e_point: MeanValuePoint
    diagnostics: dict = field(default_factory=dict)


def q_system(xs, ys, use_local_form: bool = False, zero_guard: float = 1e-6,
             validate: bool = True, corrected: bool = True) -> QSystemValue:
    """Evaluate the quotient multiform prod_r |Z(x_r)| / |Z(y_r)|.

    Inputs must be strictly increasing tuples above the working floor with
    no entry at a zero of Z (checked through ``zero_guard`` on the
    denominators).  ``use_local_form`` evaluates through the frozen window
    oscillator banks instead of the global main sum.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1 or len(xs) == 0:
        raise DomainError("q_system needs equal-length nonempty tuples")
    if validate:
        for name, arr in (("xs", xs), ("ys", ys)):
            if np.any(np.diff(arr) <= 0):
                raise DomainError(f"{name} must be strictly increasing")
            if np.any(arr <= zetacore.T0_FLOOR):
                raise DomainError(f"{name} must stay above the working floor")
    if use_local_form:
        zx = np.array([spectral.local_z(spectral.local_spectrum(x, min(1.0, x ** 0.25)), x)
                       for x in xs])
        zy = np.array([spectral.local_z(spectral.local_spectrum(y, min(1.0, y ** 0.25)), y)
                       for y in ys])
    else:
        zx = zetacore.rs_z_points(xs, corrected=corrected)
        zy = zetacore.rs_z_points(ys, corrected=corrected)
    small = np.flatnonzero(np.abs(zy) < zero_guard)
    if len(small):
        r = int(small[0])
        raise SingularPointError(
            f"|Z(y_{r + 1})| = {abs(zy[r]):.3g} below zero guard {zero_guard:g} "
            f"at y = {ys[r]:.6g}")
    value = float(np.prod(np.abs(zx) / np.abs(zy)))
    return QSystemValue(xs, ys, value)


def extract_alphas(d: MeanValuePoint, chain: SegmentChain | None = None) -> np.ndarray:
    """alpha_{k-r} = phi^r(d): ascending alpha_0 .. alpha_k."""
    alphas = d.iterate_images[::-1].copy()
    if np.any(np.diff(alphas) <= 0):
        raise ChainConsistencyError("alpha sequence not strictly increasing")
    if chain is not None:
        for r, a in enumerate(alphas):
            if not chain.contains(r, a):
                raise ChainConsistencyError(
                    f"alpha_{r} = {a:.6g} outside segment {r} (ladder drift)")
    return alphas


def extract_betas(e: MeanValuePoint, chain: SegmentChain | None = None) -> np.ndarray:
    """beta_{k-r} = phi^r(e): ascending beta_1 .. beta_k."""
    betas = e.iterate_images[::-1].copy()
    if np.any(np.diff(betas) <= 0):
        raise ChainConsistencyError("beta sequence not strictly increasing")
    if chain is not None:
        for i, b in enumerate(betas):
            if not chain.contains(i + 1, b):
                raise ChainConsistencyError(
                    f"beta_{i + 1} = {b:.6g} outside segment {i + 1} (ladder drift)")
    return betas


def _chain_length(chain: SegmentChain) -> float:
    a, b = chain.segment(chain.k)
    return b - a


def product_formula_alpha_check(sequences: ControlSequences, chain: SegmentChain,
                                sigma: float, z_alpha: np.ndarray | None = None,
                                zeta_alpha0: complex | None = None,
                                zeta_2s: float | None = None) -> float:
    """Ratio of the two sides of the alpha product law (diagnostic).

    prod_r Z^2(alpha_r) against
    zeta(2s) * U / L * ln(T)^k / |zeta(sigma + i alpha_0)|^2, L the k-th
    iterate length.  Tends to 1 only asymptotically.
    """
    if z_alpha is None:
        z_alpha = zetacore.rs_z_points(sequences.alphas[1:], corrected=True)
    if zeta_alpha0 is None:
        zeta_alpha0 = zeta_euler_maclaurin_cached(sigma, float(sequences.alphas[0]))
    if zeta_2s is None:
        zeta_2s = zetacore.zeta_two_sigma(sigma)
    length = _chain_length(chain)
    ln_t = math.log(sequences.t_base)
    lhs = float(np.prod(z_alpha * z_alpha))
    rhs = zeta_2s * (chain.u / length) * ln_t ** sequences.k / abs(zeta_alpha0) ** 2
    return lhs / rhs


def product_formula_beta_check(sequences: ControlSequences, chain: SegmentChain,
                               z_beta: np.ndarray | None = None) -> float:
    """Ratio of the two sides of the beta product law (diagnostic)."""
    if z_beta is None:
        z_beta = zetacore.rs_z_points(sequences.betas, corrected=True)
    length = _chain_length(chain)
    ln_t = math.log(sequences.t_base)
    lhs = float(np.prod(z_beta * z_beta))
    rhs = (chain.u / length) * ln_t ** sequences.k
    return lhs / rhs


def zeta_euler_maclaurin_cached(sigma: float, t: float, cache=None) -> complex:
    """One-off zeta value, routed through the evaluation cache when given."""
    if cache is not None:
        hit = cache.zeta_get(sigma, t)
        if hit is not None:
            return hit
    val = zetacore.zeta_euler_maclaurin(sigma, t).value
    if cache is not None:
        cache.zeta_put(sigma, t, val)
    return val


def validate_sequences(sequences: ControlSequences, chain: SegmentChain,
                       z_alpha_all: np.ndarray, z_beta: np.ndarray,
                       zero_guard: float) -> dict:
    """Ordering, inclusion, zero-guard and spacing-law checks.

    Raises ChainConsistencyError on any hard violation; returns the
    diagnostics dict otherwise.
    """
    a, b = sequences.alphas, sequences.betas
    T = sequences.t_base
    if not (T < a[0] and np.all(np.diff(a) > 0)):
        raise ChainConsistencyError("alpha ordering violated")
    if not (T < b[0] and np.all(np.diff(b) > 0)):
        raise ChainConsistencyError("beta ordering violated")
    for r in range(sequences.k + 1):
        if not chain.contains(r, float(a[r])):
            raise ChainConsistencyError(f"alpha_{r} outside segment {r}")
    for r in range(1, sequences.k + 1):
        if not chain.contains(r, float(b[r - 1])):
            raise ChainConsistencyError(f"beta_{r} outside segment {r}")
    min_abs_z = float(min(np.min(np.abs(z_alpha_all)), np.min(np.abs(z_beta))))
    if min_abs_z <= zero_guard:
        raise ChainConsistencyError(
            f"control point too close to a zero of Z: |Z| = {min_abs_z:.3g}")
    lag = expected_lag(T)
    spacing = {}
    for name, seq in (("alpha", a), ("beta", b)):
        diffs = np.diff(seq) / lag
        spacing[name] = diffs.tolist()
        if len(diffs) and (np.min(diffs) < SPACING_BAND[0] or np.max(diffs) > SPACING_BAND[1]):
            raise ChainConsistencyError(
                f"{name} spacing ratios {diffs.tolist()} leave band {SPACING_BAND}")
    return {"zero_guard_min_z": min_abs_z, "spacing_ratios": spacing}


@contextmanager
def _stage(timings: dict, name: str):
    start = time.perf_counter()
    try:
        yield
    except Exception as exc:
        exc.args = (f"[stage {name}] {exc.args[0] if exc.args else ''}",) + exc.args[1:]
        raise
    finally:
        timings[name] = timings.get(name, 0.0) + time.perf_counter() - start


def run_metamorphosis(config: ExperimentConfig, cache=None,
                      table: LadderTable | None = None) -> MetamorphosisReport:
    """Execute the full pipeline for one parameter point.

    Builds (or reuses) the ladder, forms the reverse chain, finds d and e,
    extracts the control sequences, and evaluates the factorization with
    every internal consistency check recorded in ``diagnostics``.
    """
    config.validate()
    T, th, k, sigma = config.t_base, config.theta, config.k, config.sigma
    timings: dict[str, float] = {}
    diag: dict = {}

    with _stage(timings, "ladder"):
        u = u_of_t_theta(T, th)
        if table is None:
            table = _ladder_for(config, cache)
    with _stage(timings, "chain"):
        chain = None
        for attempt in range(3):
            try:
                chain = reverse_iterates(table, T, u, k)
                break
            except TableRangeError:
                if attempt == 2:
                    raise
                table = _ladder_for(config, cache,
                                    extension=1.25 ** (attempt + 1))
        diag["chain"] = validate_chain(chain, table)
        diag["gaps"] = chain.gaps.tolist()
        diag["gap_law_ratios"] = chain.gap_law_ratios().tolist()
        diag["u"] = u
        lnT = math.log(T)
        ln_dev = max(abs(math.log(x) / lnT - 1.0)
                     for seg in range(k + 1) for x in chain.segment(seg))
        diag["ln_stability"] = {
            "max_dev": ln_dev,
            "bound": k * 2.0 / lnT / (1.0 - zetacore.EULER_GAMMA),
        }

    with _stage(timings, "integrals"):
        window = _window_cached(sigma, chain.base[0] - 1.0,
                                chain.base[1] + 1.0, cache)
        composed_base = integrate_composed(chain, table, sigma=None,
                                           tol=config.quad_tol)
        composed_sigma = integrate_composed(chain, table, sigma=sigma,
                                            tol=config.quad_tol, window=window)
        zeta_2s = zetacore.zeta_two_sigma(sigma)
        diag["composed_base"] = composed_base.value
        diag["composed_base_minus_u"] = composed_base.value - u
        diag["composed_sigma"] = composed_sigma.value
        diag["mean_value_ratio"] = composed_sigma.value / (zeta_2s * u)

    with _stage(timings, "d_point"):
        d_point = find_d_point(chain, table, sigma, tol=config.root_tol,
                               integral=composed_sigma, window=window)
    with _stage(timings, "e_point"):
        e_point = find_e_point(chain, table, tol=config.root_tol)

    with _stage(timings, "sequences"):
        alphas = extract_alphas(d_point, chain)
        betas = extract_betas(e_point, chain)
        sequences = ControlSequences(alphas, betas, sigma, T, th, k,
                                     config.epsilon)
        z_alpha_all = zetacore.rs_z_points(alphas, corrected=True)
        z_beta = zetacore.rs_z_points(betas, corrected=True)
        diag.update(validate_sequences(sequences, chain, z_alpha_all, z_beta,
                                       config.zero_guard))

    with _stage(timings, "factorization"):
        lhs = q_system(alphas[1:], betas, zero_guard=config.zero_guard).value
        alpha0 = float(alphas[0])
        zeta_a0 = zeta_euler_maclaurin_cached(sigma, alpha0, cache)
        sieve = _sieve_cached(config.sieve_limit, cache)
        mob = zetacore.mobius_dirichlet(sigma, alpha0, sieve)
        rhs_zeta = math.sqrt(zeta_2s) / abs(zeta_a0)
        rhs = math.sqrt(zeta_2s) * abs(mob.value)
        if not (lhs > 0.0 and rhs > 0.0):
            raise ChainConsistencyError(
                f"degenerate quotient sides: lhs={lhs:g}, rhs={rhs:g}")
        ratio = lhs / rhs
        ratio_zeta = lhs / rhs_zeta
        if not math.isfinite(ratio):
            raise ChainConsistencyError(f"non-finite ratio {ratio}")
        r_alpha = product_formula_alpha_check(sequences, chain, sigma,
                                              z_alpha=z_alpha_all[1:],
                                              zeta_alpha0=zeta_a0,
                                              zeta_2s=zeta_2s)
        r_beta = product_formula_beta_check(sequences, chain, z_beta=z_beta)
        identity_err = abs(ratio_zeta - math.sqrt(r_alpha / r_beta))
        mob_err = abs(mob.value * zeta_a0 - 1.0)
        mob_bound = mob.tail_bound * abs(zeta_a0) + 1e-8
        rhs_gap = abs(rhs - rhs_zeta)
        rhs_gap_bound = math.sqrt(zeta_2s) * mob.tail_bound + 1e-8
        diag["alpha_check_ratio"] = r_alpha
        diag["beta_check_ratio"] = r_beta
        diag["identity_error"] = identity_err
        diag["mobius_identity"] = {"error": mob_err, "bound": mob_bound,
                                   "tail_bound": mob.tail_bound}
        diag["rhs_consistency"] = {"gap": rhs_gap, "bound": rhs_gap_bound}

    with _stage(timings, "audit"):
        audit = spectral.audit_window(T, T ** 0.25)
        diag["lemma_audit"] = {"x_r": audit.x_r, "h": audit.h,
                               "max_abs_error": audit.max_abs_error,
                               "bound": audit.bound}

    diag["checks"] = {
        "identity_ok": identity_err <= 1e-10 * max(1.0, ratio_zeta),
        "mobius_ok": mob_err <= mob_bound,
        "rhs_consistency_ok": rhs_gap <= rhs_gap_bound,
        "composed_base_ok": abs(composed_base.value - u)
                            <= max(config.quad_tol, 1e-4 * u),
        "lemma_ok": audit.max_abs_error <= audit.bound,
        "gap_band_ok": bool(np.all((chain.gap_law_ratios() > SPACING_BAND[0])
                                   & (chain.gap_law_ratios() < SPACING_BAND[1]))),
    }
    diag["stage_seconds"] = timings
    return MetamorphosisReport(sequences, lhs, rhs, rhs_zeta, ratio,
                               ratio_zeta, d_point, e_point, diag)


def _window_cached(sigma: float, t_from: float, t_to: float,
                   cache=None) -> ZetaSqWindow:
    if cache is None:
        return ZetaSqWindow(sigma, t_from, t_to)
    key = {"kind": "zeta_window", "sigma": sigma, "t_from": t_from,
           "t_to": t_to}
    hit = cache.grid_get(key)
    if hit is not None:
        return ZetaSqWindow.from_grid(sigma, hit[0], hit[1])
    window = ZetaSqWindow(sigma, t_from, t_to)
    cache.grid_put(key, window.grid[0], window.grid[1])
    return window


def _sieve_cached(limit: int, cache=None) -> zetacore.MobiusSieve:
    if cache is None:
        return zetacore.mobius_sieve(limit)
    values = cache.sieve_get(limit)
    if values is not None:
        return zetacore.MobiusSieve(limit, values)
    sieve = zetacore.mobius_sieve(limit)
    cache.sieve_put(limit, sieve.values)
    return sieve


def _ladder_for(config: ExperimentConfig, cache=None,
                extension: float = 1.0) -> LadderTable:
    """Build (or fetch from cache) the ladder spanning the whole chain."""
    T, th, k = config.t_base, config.theta, config.k
    u = u_of_t_theta(T, th)
    t_lo = T - 2.0
    t_hi = T + u + k * expected_lag(T) * 1.4 * extension + 50.0
    key = {"kind": "ladder", "t_lo": t_lo, "t_hi": t_hi,
           "tol": config.quad_tol, "spo": 64}
    if cache is not None:
        hit = cache.table_get(key)
        if hit is not None:
            return hit
    table = build_ladder(t_lo, t_hi, tol=config.quad_tol, samples_per_osc=64)
    if cache is not None:
        cache.table_put(key, table)
    return table
