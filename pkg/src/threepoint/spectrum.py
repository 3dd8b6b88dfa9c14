"""Characteristic function of the three-point problem and eigenvalue localisation.

Delta(lam) = y2(1) y3(2) - y3(1) y2(2). Written as a determinant it loses about
e^{3 nu n} in relative accuracy near (2 nu n)^3, so it is evaluated via the
equivalent form

    Delta = y2(1) y3~(1) + y3(1) y3~'(1),

where ~ marks the transposed operator. Every product here has the size of
Delta's natural scale.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import ode
from .coeffs import CoefficientPair
from .monodromy import MonodromyData, monodromy_data
from .oracle import NU, SQRT3, mu0


DEFAULT_BALL_RADIUS = 0.1


class LocalizationError(RuntimeError):
    """Newton did not converge within the iteration budget."""


class DiscViolationError(RuntimeError):
    """The computed zero left the disc |z - 2 nu n| < 1."""


@dataclass(frozen=True)
class NewtonOptions:
    max_iters: int = 25
    residual_factor: float = 1e-12
    step_factor: float = 1e-13
    ball_radius: float = DEFAULT_BALL_RADIUS


DEFAULT_NEWTON = NewtonOptions()


def delta_from_data(data: MonodromyData) -> complex:
    M, Mt = data.M, data.Mt
    return M[0, 1] * Mt[0, 2] + M[0, 2] * Mt[1, 2]


def delta_dot_from_data(data: MonodromyData) -> complex:
    M, Mt, dM, dMt = data.M, data.Mt, data.dM, data.dMt
    return (
        dM[0, 1] * Mt[0, 2] + M[0, 1] * dMt[0, 2]
        + dM[0, 2] * Mt[1, 2] + M[0, 2] * dMt[1, 2]
    )


def delta(u: CoefficientPair, lam: complex, tol: ode.Tolerances = ode.DEFAULT_TOL) -> complex:
    return delta_from_data(monodromy_data(u, lam, tol))


def delta_dot(u: CoefficientPair, lam: complex, tol: ode.Tolerances = ode.DEFAULT_TOL) -> complex:
    return delta_dot_from_data(monodromy_data(u, lam, tol))


def delta_determinant(u: CoefficientPair, lam: complex, tol: ode.Tolerances = ode.DEFAULT_TOL) -> complex:
    """Literal 2x2 determinant of y2, y3 at x = 1, 2 (reference only; cancels at large lam)."""
    P = ode.fundamental_matrix(u, lam, [1.0, 2.0], tol=tol)
    return P[0, 0, 1] * P[1, 0, 2] - P[0, 0, 2] * P[1, 0, 1]


def real_cube_root(lam: float) -> float:
    return float(np.sign(lam) * abs(lam) ** (1.0 / 3.0))


def cube_root_near(lam: complex, centre: float) -> complex:
    """Real cube root for real lam, else the cube root closest to `centre`."""
    lam = complex(lam)
    if lam.imag == 0:
        return complex(real_cube_root(lam.real))
    r = abs(lam) ** (1.0 / 3.0) * np.exp(1j * np.angle(lam) / 3.0) * np.exp(2j * np.pi * np.arange(3) / 3)
    return complex(r[np.argmin(np.abs(r - centre))])


def linear_shift(u: CoefficientPair, n: int) -> float:
    """First order eigenvalue shift mu_n - (2 nu n)^3 linear in u."""
    dp = u.p.derivative()
    return -(
        dp.fourier_coeff(n, "sin") / SQRT3
        + u.q.fourier_coeff(n, "cos")
        - dp.fourier_coeff(n, "cos") / 3.0
        + u.q.fourier_coeff(n, "sin") / SQRT3
    )


@dataclass(frozen=True)
class EigenvalueRecord:
    n: int
    mu: float
    residual: float
    newton_iters: int
    disc_margin: float
    # monodromy data at the last Newton evaluation and the final correction,
    # kept so later stages can reuse M and M~ without another solve
    data: MonodromyData = field(repr=False, compare=False, default=None)
    offset: float = field(repr=False, compare=False, default=0.0)

    def data_at_mu(self) -> MonodromyData:
        """Monodromy data moved to mu by one Taylor step in lam."""
        d, h = self.data, self.offset
        return replace(d, lam=complex(self.mu), M=d.M + h * d.dM, Mt=d.Mt + h * d.dMt)

    def as_row(self) -> dict:
        return {
            "n": self.n,
            "mu": self.mu,
            "residual": self.residual,
            "newton_iters": self.newton_iters,
            "disc_margin": self.disc_margin,
        }


def _snap(mu: complex) -> complex:
    if abs(mu.imag) <= 1e-9 * (1 + abs(mu)):
        return complex(mu.real)
    return mu


def eigenvalue(u: CoefficientPair, n: int, tol: ode.Tolerances = ode.DEFAULT_TOL,
               newton: NewtonOptions = DEFAULT_NEWTON) -> EigenvalueRecord:
    """Zero of Delta in the disc around (2 nu n)^3 by Newton in z = lam^{1/3}."""
    if n == 0:
        raise ValueError("n must be nonzero")
    if u.norm1() > newton.ball_radius:
        warnings.warn(f"||u||_1 = {u.norm1():.3g} exceeds the ball radius {newton.ball_radius}",
                      stacklevel=2)
    centre = 2 * NU * n
    z = real_cube_root(mu0(n) + linear_shift(u, n))
    if abs(z - centre) >= 1.0:
        z = centre
    z = complex(z)
    for it in range(1, newton.max_iters + 1):
        lam = z**3
        data = monodromy_data(u, lam, tol)
        D = delta_from_data(data)
        Dd = delta_dot_from_data(data)
        step = D / (3 * z * z * Dd)
        z_new = z - step
        done = (abs(D) <= newton.residual_factor * abs(Dd) * (1 + abs(lam))
                or abs(step) < newton.step_factor * (1 + abs(z)))
        if done:
            mu = _snap(z_new**3)
            margin = 1.0 - abs(cube_root_near(mu, centre) - centre)
            if margin <= 0:
                raise DiscViolationError(f"zero for n={n} left its disc (|z - 2 nu n| = {1 - margin:.3f})")
            offset = mu - lam
            if mu.imag == 0 and abs(offset.imag) <= 1e-9 * (1 + abs(mu)):
                mu, offset = mu.real, offset.real
            return EigenvalueRecord(n, mu, float(abs(D)), it, float(margin), data, offset)
        z = z_new
        if abs(z - centre) > 2.0:
            raise DiscViolationError(f"Newton iterate for n={n} left the neighbourhood of its disc")
    raise LocalizationError(f"no convergence for n={n} within {newton.max_iters} iterations")


def transposed_eigenvalue(u: CoefficientPair, n: int, tol: ode.Tolerances = ode.DEFAULT_TOL,
                          newton: NewtonOptions = DEFAULT_NEWTON) -> EigenvalueRecord:
    """Eigenvalue mu~_n of the transposed problem, equal to -mu_{-n}(u_*)."""
    rec = eigenvalue(u.star(), -n, tol, newton)
    return EigenvalueRecord(n, -rec.mu, rec.residual, rec.newton_iters, rec.disc_margin,
                            rec.data.swapped(), -rec.offset)


def eigenvalue_sweep(u: CoefficientPair, N: int, tol: ode.Tolerances = ode.DEFAULT_TOL,
                     newton: NewtonOptions = DEFAULT_NEWTON, jobs: int = 1):
    """Records for 0 < |n| <= N sorted by n, and a {n: error message} map of failures."""
    if N < 1:
        raise ValueError("N must be at least 1")
    indices = [n for n in range(-N, N + 1) if n != 0]

    def one(n):
        try:
            return n, eigenvalue(u, n, tol, newton), None
        except (LocalizationError, DiscViolationError, ode.IntegrationError) as exc:
            return n, None, str(exc)

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(one, indices))
    else:
        results = [one(n) for n in indices]
    records = [r for _, r, _ in results if r is not None]
    failures = {n: e for n, _, e in results if e is not None}
    return records, failures


def winding_number(u: CoefficientPair, n: int, points: int = 64,
                   tol: ode.Tolerances = ode.DEFAULT_TOL) -> float:
    """Zeros of Delta inside the disc |z - 2 nu n| < 1, by the argument principle in z.

    Uses the logarithmic derivative 3 z^2 Delta'/Delta on a circle of radius 1
    in the z-plane (trapezoid rule, spectrally accurate on a circle).
    """
    centre = 2 * NU * n
    theta = 2 * np.pi * np.arange(points) / points
    total = 0j
    for th in theta:
        z = centre + np.exp(1j * th)
        data = monodromy_data(u, z**3, tol)
        g = 3 * z * z * delta_dot_from_data(data) / delta_from_data(data)
        total += g * np.exp(1j * th)
    # (1 / 2 pi i) * contour integral, dz = i e^{i theta} d theta
    return float((total / points).real)
