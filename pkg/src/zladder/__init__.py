"""Critical-line oscillator quotients, Jacob's ladders, and their
metamorphosis into Mobius Dirichlet series.

The package computes the Hardy Z function through the Riemann-Siegel main
sum (with an Euler-Maclaurin oracle route kept fully independent), builds
a numerical Jacob's ladder surrogate from Ztilde^2 = Z^2 / ln t, reverse
iterates base segments through it, and verifies the factorization that
links products of critical-line quotients |Z(alpha_r)/Z(beta_r)| to
sqrt(zeta(2 sigma)) |sum mu(n) n^(-sigma - i alpha_0)| for sigma > 1.
"""

__version__ = "0.1.0"

from .config import DEFAULTS, ExperimentConfig, parse_config, serialize_config
from .errors import (AccuracyError, ChainConsistencyError, ConfigError,
                     DomainError, PoleError, ResolutionError,
                     SingularPointError, TableRangeError, WindowError)
from .ladder import (LadderTable, SegmentChain, build_ladder, expected_lag,
                     ladder_inverse, reverse_iterates, u_of_t_theta,
                     validate_chain, z_tilde_squared)
from .metamorphosis import (ControlSequences, MetamorphosisReport,
                            QSystemValue, extract_alphas, extract_betas,
                            product_formula_alpha_check,
                            product_formula_beta_check, q_system,
                            run_metamorphosis)
from .quadrature import (IntegralResult, Integrand, MeanValuePoint, PointKind,
                         ZetaSqWindow, adaptive_panels, find_d_point,
                         find_e_point, integrals_to_csv, integrate_composed,
                         integrate_zeta_sq, points_to_csv)
from .spectral import (LocalErrorAudit, LocalSpectrum, audit_window,
                       local_spectrum, local_z, phase_expansion_audit)
from .zetacore import (ComplexZetaValue, MobiusSieve, ThetaValue, ZEvaluation,
                       ZetaMethod, mobius_dirichlet, mobius_sieve,
                       riemann_siegel_z, rs_z_points, rs_z_uniform, tau,
                       theta, zeta_euler_maclaurin, zeta_two_sigma)

__all__ = [name for name in dir() if not name.startswith("_")]
