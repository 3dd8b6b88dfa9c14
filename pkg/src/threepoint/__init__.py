"""Direct and inverse spectral problem for a third-order operator with
eigenvalues fixed by Dirichlet conditions at x = 0, 1, 2 and 1-periodic
coefficients p, q."""

from .coeffs import CoefficientPair, TrigSeries, random_direction, random_in_ball
from .forwardmap import F_apply, F_inverse, SpectralData, forward, h_cn, h_sn
from .gradients import GradientPair, grad_delta, grad_hs, grad_mu, grad_mu_tilde
from .inverse import InversionReport, invert
from .monodromy import multipliers, tau3, traces
from .ode import Tolerances, fundamental_matrix
from .quadrature import QuadratureGrid, gauss_legendre
from .spectrum import delta, delta_dot, eigenvalue, transposed_eigenvalue

__version__ = "0.1.0"

__all__ = [
    "CoefficientPair", "TrigSeries", "random_direction", "random_in_ball",
    "F_apply", "F_inverse", "SpectralData", "forward", "h_cn", "h_sn",
    "GradientPair", "grad_delta", "grad_hs", "grad_mu", "grad_mu_tilde",
    "InversionReport", "invert",
    "multipliers", "tau3", "traces",
    "Tolerances", "fundamental_matrix",
    "QuadratureGrid", "gauss_legendre",
    "delta", "delta_dot", "eigenvalue", "transposed_eigenvalue",
]
