"""Gradients of Delta, mu_n, mu~_n and h_sn with respect to u = (p, q).

A gradient is a pair of functions on [0, 1] sampled on a quadrature grid,
meaning  d F(u)[v] = int_0^1 (d_p v_p + d_q v_q) dt.  Since admissible
directions have zero mean, gradients are only defined up to constants; use
`GradientPair.mean_free` before comparing samples pointwise.

Two routes are provided. The eigenfunction route writes the gradient of Delta
at an eigenvalue through phi, psi and the kernel chi, and stays accurate at
large |n|. The matrix route differentiates the monodromy matrix,

    dM/dp(t)_ij = -(G_i1 Phi_0j + G_i2 Phi_1j),   dM/dq(t)_ij = -G_i2 Phi_0j,

with G(t) = Phi(1) Phi(t)^{-1}; it works at any lam and supplies the pieces
of the norming constant (y3(1), y3~(1), tau_3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ode
from .coeffs import CoefficientPair
from .eigenfunctions import GridSweep, check_eigenvalue, period_ratio, phi_scale, psi_boundary_vector, psi_initial_vector
from .monodromy import MonodromyData, monodromy_data, tau3_dot_from_data, tau3_from_data
from .quadrature import DEFAULT_GRID, QuadratureGrid
from .spectrum import (
    DEFAULT_NEWTON,
    NewtonOptions,
    delta_dot_from_data,
    eigenvalue,
    transposed_eigenvalue,
)


@dataclass(frozen=True)
class GradientPair:
    grid: QuadratureGrid
    d_p: np.ndarray
    d_q: np.ndarray

    def __add__(self, other: "GradientPair") -> "GradientPair":
        return GradientPair(self.grid, self.d_p + other.d_p, self.d_q + other.d_q)

    def __sub__(self, other: "GradientPair") -> "GradientPair":
        return GradientPair(self.grid, self.d_p - other.d_p, self.d_q - other.d_q)

    def __neg__(self) -> "GradientPair":
        return GradientPair(self.grid, -self.d_p, -self.d_q)

    def scale(self, c) -> "GradientPair":
        return GradientPair(self.grid, c * self.d_p, c * self.d_q)

    def real(self) -> "GradientPair":
        return GradientPair(self.grid, np.real(self.d_p), np.real(self.d_q))

    def mean_free(self) -> "GradientPair":
        return GradientPair(self.grid, self.grid.mean_free(self.d_p), self.grid.mean_free(self.d_q))

    def directional(self, v: CoefficientPair) -> complex:
        t = self.grid.nodes
        return self.grid.integrate(self.d_p * v.p(t) + self.d_q * v.q(t))

    def coefficient_vector(self, N: int) -> np.ndarray:
        """Derivatives with respect to the entries of `CoefficientPair.to_vector()`."""
        t = self.grid.nodes
        k = 2 * np.pi * np.arange(1, N + 1)
        C, S = np.cos(np.outer(k, t)), np.sin(np.outer(k, t))
        out = [C @ (self.grid.weights * f) if j == 0 else S @ (self.grid.weights * f)
               for f in (self.d_p, self.d_q) for j in (0, 1)]
        return np.concatenate(out)

    def star_reflected(self, sign: float = 1.0) -> "GradientPair":
        """Gradient of u -> sign * F(u_*^-), given this gradient of F taken at u_*^-.

        Relies on the grid being symmetric about t = 1/2.
        """
        return GradientPair(self.grid, sign * self.d_p[::-1], -sign * self.d_q[::-1])

    def max_abs_difference(self, other: "GradientPair") -> float:
        a, b = self.mean_free(), other.mean_free()
        return float(max(np.abs(a.d_p - b.d_p).max(), np.abs(a.d_q - b.d_q).max()))

    def max_abs(self) -> float:
        a = self.mean_free()
        return float(max(np.abs(a.d_p).max(), np.abs(a.d_q).max()))


def _check_symmetric(grid: QuadratureGrid) -> None:
    if not np.allclose(grid.nodes + grid.nodes[::-1], 1.0, atol=1e-14):
        raise ValueError("grid must be symmetric about 1/2")


# matrix route


def matrix_gradient(G: np.ndarray, Phi: np.ndarray, i: int, j: int, transposed: bool = False):
    """(dM_ij/dp(t), dM_ij/dq(t)) from samples of G(t) and Phi(t).

    For the transposed operator q enters with the opposite sign.
    """
    dp = -(G[:, i, 1] * Phi[:, 0, j] + G[:, i, 2] * Phi[:, 1, j])
    dq = -G[:, i, 2] * Phi[:, 0, j]
    return dp, (-dq if transposed else dq)


def trace_gradient(G: np.ndarray, Phi: np.ndarray, transposed: bool = False):
    dp = -(np.einsum("mi,mi->m", G[:, :, 1], Phi[:, 0, :]) + np.einsum("mi,mi->m", G[:, :, 2], Phi[:, 1, :]))
    dq = -np.einsum("mi,mi->m", G[:, :, 2], Phi[:, 0, :])
    return dp, (-dq if transposed else dq)


class MatrixGradients:
    """Matrix-route gradients at one lam on a grid (up to four sweeps, on demand)."""

    def __init__(self, u: CoefficientPair, lam: complex, grid: QuadratureGrid = DEFAULT_GRID,
                 tol: ode.Tolerances = ode.DEFAULT_TOL, data: MonodromyData | None = None):
        self.grid = grid
        self.sweep = GridSweep(u, lam, grid.nodes, tol)
        self.data = data if data is not None else monodromy_data(u, lam, tol)

    def _pair(self, dp, dq) -> GradientPair:
        return GradientPair(self.grid, dp, dq)

    def entry(self, i: int, j: int) -> GradientPair:
        return self._pair(*matrix_gradient(self.sweep.G, self.sweep.Phi, i, j))

    def transposed_entry(self, i: int, j: int) -> GradientPair:
        return self._pair(*matrix_gradient(self.sweep.Gt, self.sweep.Phit, i, j, transposed=True))

    def y3(self) -> GradientPair:
        return self.entry(0, 2)

    def y3_transposed(self) -> GradientPair:
        return self.transposed_entry(0, 2)

    def traces(self) -> tuple[GradientPair, GradientPair]:
        s = self.sweep
        return self._pair(*trace_gradient(s.G, s.Phi)), self._pair(*trace_gradient(s.Gt, s.Phit, True))

    def tau3(self) -> GradientPair:
        tau = tau3_from_data(self.data)
        T, Tt = self.data.traces
        gT, gTt = self.traces()
        slope = -3 * tau**2 + 2 * T * tau - Tt
        return (gT.scale(tau**2) - gTt.scale(tau)).scale(-1.0 / slope)

    def delta(self) -> GradientPair:
        """Product rule on Delta = y2(1) y3~(1) + y3(1) y3~'(1)."""
        M, Mt = self.data.M, self.data.Mt
        return (self.entry(0, 1).scale(Mt[0, 2]) + self.transposed_entry(0, 2).scale(M[0, 1])
                + self.entry(0, 2).scale(Mt[1, 2]) + self.transposed_entry(1, 2).scale(M[0, 2]))


# eigenfunction route


@dataclass(frozen=True)
class EigenPieces:
    """phi, psi, chi and first derivatives on the grid t and shifted grid t + 1."""

    phi: np.ndarray
    dphi: np.ndarray
    psi_up: np.ndarray
    dpsi_up: np.ndarray
    chi: np.ndarray
    dchi: np.ndarray
    chi_up: np.ndarray
    dchi_up: np.ndarray


def eigen_pieces(sweep: GridSweep, data: MonodromyData) -> EigenPieces:
    if data.lam.real > 0:
        base = sweep.H() @ psi_boundary_vector(data)
    else:
        base = sweep.Phi @ psi_initial_vector(data)
    c, kappa = phi_scale(data), period_ratio(data)
    return EigenPieces(
        phi=c * base[:, 0], dphi=c * base[:, 1],
        psi_up=kappa * base[:, 0], dpsi_up=kappa * base[:, 1],
        chi=sweep.Phit[:, 0, 2], dchi=sweep.Phit[:, 1, 2],
        chi_up=sweep.G[:, 0, 2], dchi_up=-sweep.G[:, 0, 1],
    )


def delta_gradient_at_eigenvalue(u: CoefficientPair, mu: complex, grid: QuadratureGrid = DEFAULT_GRID,
                                 tol: ode.Tolerances = ode.DEFAULT_TOL,
                                 data: MonodromyData | None = None) -> GradientPair:
    """Gradient of Delta at an eigenvalue mu via ({phi, chi}, phi chi)(t) + ({psi, chi}, psi chi)(t + 1)."""
    if data is None:
        data = monodromy_data(u, mu, tol)
    check_eigenvalue(data)
    e = eigen_pieces(GridSweep(u, mu, grid.nodes, tol), data)
    dp = (e.dphi * e.chi - e.phi * e.dchi) + (e.dpsi_up * e.chi_up - e.psi_up * e.dchi_up)
    dq = e.phi * e.chi + e.psi_up * e.chi_up
    return GradientPair(grid, dp, dq)


def grad_delta(u: CoefficientPair, lam: complex, grid: QuadratureGrid = DEFAULT_GRID,
               tol: ode.Tolerances = ode.DEFAULT_TOL, route: str = "auto",
               data: MonodromyData | None = None) -> GradientPair:
    """Gradient of Delta(lam, u). `route` is "eigen", "matrix" or "auto"."""
    if data is None:
        data = monodromy_data(u, lam, tol)
    if route == "auto":
        try:
            check_eigenvalue(data)
            route = "eigen"
        except ValueError:
            route = "matrix"
    if route == "eigen":
        return delta_gradient_at_eigenvalue(u, lam, grid, tol, data)
    if route == "matrix":
        return MatrixGradients(u, lam, grid, tol, data).delta()
    raise ValueError(f"unknown route {route!r}")


def grad_mu(u: CoefficientPair, n: int, grid: QuadratureGrid = DEFAULT_GRID,
            tol: ode.Tolerances = ode.DEFAULT_TOL, newton: NewtonOptions = DEFAULT_NEWTON,
            route: str = "eigen") -> GradientPair:
    """Gradient of mu_n(u) = -grad Delta / Delta' at the eigenvalue."""
    rec = eigenvalue(u, n, tol, newton)
    data = monodromy_data(u, rec.mu, tol)
    g = grad_delta(u, rec.mu, grid, tol, route, data)
    dd = delta_dot_from_data(data)
    # Delta' grows like e^{3 nu |n|} / n^5; far below that the zero is not simple
    floor = 1e-8 * np.exp(3 * np.pi / np.sqrt(3) * abs(n)) / abs(n) ** 5
    if not np.isfinite(abs(dd)) or abs(dd) < max(floor, 1e-300):
        raise SimplicityLossError(f"|Delta'(mu_{n})| = {abs(dd):.3e} is below the simplicity floor")
    return _realify(g.scale(-1.0 / dd), f"mu_{n}")


def grad_mu_tilde(u: CoefficientPair, n: int, grid: QuadratureGrid = DEFAULT_GRID,
                  tol: ode.Tolerances = ode.DEFAULT_TOL, newton: NewtonOptions = DEFAULT_NEWTON,
                  route: str = "eigen") -> GradientPair:
    """Gradient of mu~_n(u) = -mu_{-n}(u_*); q enters u_* with a sign flip."""
    g = grad_mu(u.star(), -n, grid, tol, newton, route)
    return GradientPair(grid, -g.d_p, g.d_q)


def _norming_log_gradient(u, n, grid, tol, newton, route):
    """Gradient of the logarithm inside h_sn for n > 0, evaluated at mu~_n."""
    rec = transposed_eigenvalue(u, n, tol, newton)
    mt = rec.mu
    data = monodromy_data(u, mt, tol)
    mg = MatrixGradients(u, mt, grid, tol, data)
    tau = tau3_from_data(data)
    tau_dot = tau3_dot_from_data(data, tau)
    M, Mt, dM, dMt = data.M, data.Mt, data.dM, data.dMt
    scalar = dM[0, 2] / M[0, 2] - dMt[0, 2] / Mt[0, 2] - tau_dot / (2 * tau)
    profile = mg.y3().scale(1 / M[0, 2]) - mg.y3_transposed().scale(1 / Mt[0, 2]) - mg.tau3().scale(1 / (2 * tau))
    gmt = grad_mu_tilde(u, n, grid, tol, newton, route)
    return _realify(gmt.scale(scalar) + profile, f"h_s{n}"), scalar, profile


def grad_hs(u: CoefficientPair, n: int, grid: QuadratureGrid = DEFAULT_GRID,
            tol: ode.Tolerances = ode.DEFAULT_TOL, newton: NewtonOptions = DEFAULT_NEWTON,
            route: str = "eigen") -> GradientPair:
    """Gradient of the norming coordinate h_sn; n < 0 through h_sn(u) = -h_{s,-n}(u_*^-)."""
    if n == 0:
        raise ValueError("n must be nonzero")
    if n < 0:
        _check_symmetric(grid)
        return grad_hs(u.star_reflect(), -n, grid, tol, newton, route).star_reflected(-1.0)
    g, _, _ = _norming_log_gradient(u, n, grid, tol, newton, route)
    return g.scale(8 * (np.pi * n) ** 2)


def norming_parts(u: CoefficientPair, n: int, grid: QuadratureGrid = DEFAULT_GRID,
                  tol: ode.Tolerances = ode.DEFAULT_TOL, newton: NewtonOptions = DEFAULT_NEWTON):
    """The scalar A_n and profile B_n with grad h_sn = 8 (pi n)^2 (A_n grad mu~_n + B_n), n > 0."""
    if n <= 0:
        raise ValueError("defined here for n > 0")
    _, scalar, profile = _norming_log_gradient(u, n, grid, tol, newton, "eigen")
    return scalar, profile


class SimplicityLossError(RuntimeError):
    """Delta' at the eigenvalue is too small for the quotient defining grad mu."""


def _realify(g: GradientPair, what: str) -> GradientPair:
    scale = max(np.abs(g.d_p).max(), np.abs(g.d_q).max(), 1e-300)
    imag = max(np.abs(np.imag(g.d_p)).max(), np.abs(np.imag(g.d_q)).max())
    if imag > 1e-10 * scale:
        raise ArithmeticError(f"gradient of {what} has relative imaginary part {imag / scale:.2e}")
    return g.real()


def grad_traces(u: CoefficientPair, lam: complex, grid: QuadratureGrid = DEFAULT_GRID,
                tol: ode.Tolerances = ode.DEFAULT_TOL) -> tuple[GradientPair, GradientPair]:
    gT, gTt = MatrixGradients(u, lam, grid, tol).traces()
    if np.isreal(lam):
        return _realify(gT, "T"), _realify(gTt, "T~")
    return gT, gTt


def grad_tau3(u: CoefficientPair, lam: complex, grid: QuadratureGrid = DEFAULT_GRID,
              tol: ode.Tolerances = ode.DEFAULT_TOL) -> GradientPair:
    g = MatrixGradients(u, lam, grid, tol).tau3()
    return _realify(g, "tau3") if np.isreal(lam) and lam.real > 1 else g


def grad_y3_at_1(u: CoefficientPair, lam: complex, transposed: bool = False,
                 grid: QuadratureGrid = DEFAULT_GRID, tol: ode.Tolerances = ode.DEFAULT_TOL) -> GradientPair:
    mg = MatrixGradients(u, lam, grid, tol)
    g = mg.y3_transposed() if transposed else mg.y3()
    return _realify(g, "y3(1)") if np.isreal(lam) else g


def _scalar(quantity: str, n: int | None, lam: complex | None, tol: ode.Tolerances):
    """A callable u -> value for one of the named functionals."""
    from . import forwardmap
    from .monodromy import tau3 as tau3_value
    from .spectrum import delta

    def need(x, name):
        if x is None:
            raise ValueError(f"{quantity} needs {name}")
        return x

    table = {
        "delta": lambda w: delta(w, need(lam, "lam"), tol),
        "mu": lambda w: eigenvalue(w, need(n, "n"), tol).mu,
        "mu_tilde": lambda w: transposed_eigenvalue(w, need(n, "n"), tol).mu,
        "T": lambda w: monodromy_data(w, need(lam, "lam"), tol).traces[0],
        "T_tilde": lambda w: monodromy_data(w, need(lam, "lam"), tol).traces[1],
        "tau3": lambda w: tau3_value(w, need(lam, "lam"), tol),
        "y3": lambda w: monodromy_data(w, need(lam, "lam"), tol).M[0, 2],
        "y3_tilde": lambda w: monodromy_data(w, need(lam, "lam"), tol).Mt[0, 2],
        "h_s": lambda w: forwardmap.h_sn(w, need(n, "n"), tol),
        "h_c": lambda w: forwardmap.h_cn(w, need(n, "n"), tol),
    }
    try:
        return table[quantity]
    except KeyError:
        raise ValueError(f"unknown quantity {quantity!r}; choose from {sorted(table)}") from None


QUANTITIES = ("delta", "mu", "mu_tilde", "T", "T_tilde", "tau3", "y3", "y3_tilde", "h_s", "h_c")


def fd_directional(quantity, u: CoefficientPair, direction: CoefficientPair, step: float = 1e-5,
                   n: int | None = None, lam: complex | None = None, order: int = 2,
                   tol: ode.Tolerances = ode.DEFAULT_TOL) -> complex:
    """Central difference of a functional along `direction`.

    `quantity` is a name from QUANTITIES (with n or lam as needed) or any
    callable u -> scalar. order=2 is (F(u+s v) - F(u-s v)) / 2s; order=4 adds
    the Richardson correction with steps s and 2s.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    f = quantity if callable(quantity) else _scalar(quantity, n, lam, tol)

    def at(h):
        return f(u + h * direction)

    d1 = (at(step) - at(-step)) / (2 * step)
    if order == 2:
        return d1
    if order == 4:
        d2 = (at(2 * step) - at(-2 * step)) / (4 * step)
        return (4 * d1 - d2) / 3
    raise ValueError("order must be 2 or 4")


def analytic_gradient(quantity: str, u: CoefficientPair, n: int | None = None, lam: complex | None = None,
                      grid: QuadratureGrid = DEFAULT_GRID, tol: ode.Tolerances = ode.DEFAULT_TOL) -> GradientPair:
    """Gradient for a named functional, matching `fd_directional` names."""
    if quantity == "delta":
        return grad_delta(u, lam, grid, tol)
    if quantity == "mu":
        return grad_mu(u, n, grid, tol)
    if quantity == "mu_tilde":
        return grad_mu_tilde(u, n, grid, tol)
    if quantity in ("T", "T_tilde"):
        return grad_traces(u, lam, grid, tol)[quantity == "T_tilde"]
    if quantity == "tau3":
        return grad_tau3(u, lam, grid, tol)
    if quantity in ("y3", "y3_tilde"):
        return grad_y3_at_1(u, lam, quantity == "y3_tilde", grid, tol)
    if quantity == "h_s":
        return grad_hs(u, n, grid, tol)
    if quantity == "h_c":
        return grad_mu(u, n, grid, tol)
    raise ValueError(f"unknown quantity {quantity!r}")


def pointwise(g: GradientPair) -> tuple[np.ndarray, np.ndarray]:
    """Mean-free samples (d_p, d_q)."""
    m = g.mean_free()
    return m.d_p, m.d_q


__all__ = [
    "GradientPair", "MatrixGradients", "EigenPieces", "eigen_pieces", "grad_delta",
    "delta_gradient_at_eigenvalue", "grad_mu", "grad_mu_tilde", "grad_hs", "norming_parts",
    "grad_traces", "grad_tau3", "grad_y3_at_1", "fd_directional", "analytic_gradient",
    "QUANTITIES", "SimplicityLossError", "matrix_gradient", "trace_gradient", "pointwise",
]
