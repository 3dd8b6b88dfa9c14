"""Eigenfunctions phi, psi of the three-point problem and the kernel chi.

All values come from up to four sweeps over t in [0, 1] at fixed lam:

    Phi(t)                      forward, operator
    Phi~(t)                     forward, transposed operator
    G(t)  = Phi(1) Phi(t)^{-1}  backward from t = 1, operator
    G~(t) = Phi~(1) Phi~(t)^{-1} backward from t = 1, transposed operator

Each object is integrated in the direction where it is dominated by growing
modes, so no sample depends on a cancelling difference. Periodicity gives the
interval [1, 2] from [0, 1]: Phi(t + 1) = Phi(t) Phi(1).

psi(x) = Phi(x) c with c = (0, y3(1), -y2(1)). Which direction is stable on
[0, 1] depends on the sign of lam. For lam > 0 the eigenfunction decays like
e^{-nu n x} and is propagated backwards from x = 1 by H(t) = Phi(t) M^{-1} =
J G~(t)^T J applied to -(0, y3~(1), y3~'(1)). For lam < 0 it is dominant and
Phi(t) c is used.

At an eigenvalue psi(1 + t) solves the same periodic equation and vanishes at
t = 0 and t = 1, so it is a multiple of psi(t): psi(1 + t) = kappa psi(t) with
kappa = psi'(1) / psi'(0) = -y3~(1) / y3(1). Nothing is integrated over [1, 2].
phi itself is the multiple y3(1) psi / y3~(1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import ode
from .coeffs import CoefficientPair
from .monodromy import MonodromyData, monodromy_data, two_point_minor
from .spectrum import delta_dot_from_data, delta_from_data


class NotAnEigenvalueError(ValueError):
    pass


class DegenerateEigenfunctionError(RuntimeError):
    """y2(1, mu) or y3(1, mu) vanishes, outside the small-coefficient regime."""


@dataclass(frozen=True)
class SampledFunction:
    grid: np.ndarray
    values: np.ndarray
    derivative_values: np.ndarray
    # one-sided values at seams where the definition changes branch
    seams: dict = field(default_factory=dict, compare=False)


def bracket(f: SampledFunction, g: SampledFunction) -> SampledFunction:
    """{f, g} = f' g - f g' (derivative slot left empty)."""
    if f.grid.shape != g.grid.shape or not np.array_equal(f.grid, g.grid):
        raise ValueError("bracket needs identical grids")
    vals = f.derivative_values * g.values - f.values * g.derivative_values
    return SampledFunction(f.grid, vals, np.full_like(vals, np.nan))


class GridSweep:
    """Propagators at sweep points t in [0, 1], integrated on first use."""

    def __init__(self, u: CoefficientPair, lam: complex, t, tol: ode.Tolerances = ode.DEFAULT_TOL):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > 1) or np.any(np.diff(t) < 0):
            raise ValueError("sweep points must be sorted inside [0, 1]")
        self.u, self.lam, self.t, self.tol = u, complex(lam), t, tol

    @cached_property
    def Phi(self) -> np.ndarray:
        return ode.fundamental_matrix(self.u, self.lam, self.t, tol=self.tol)

    @cached_property
    def Phit(self) -> np.ndarray:
        return ode.transposed_fundamental_matrix(self.u, self.lam, self.t, tol=self.tol)

    @cached_property
    def G(self) -> np.ndarray:
        return ode.backward_propagator(self.u, self.lam, self.t, self.tol)

    @cached_property
    def Gt(self) -> np.ndarray:
        return ode.backward_propagator(self.u.star(), -self.lam, self.t, self.tol)

    def H(self) -> np.ndarray:
        """Phi(t) Phi(1)^{-1} = J G~(t)^T J."""
        return ode.JFLIP @ np.swapaxes(self.Gt, -1, -2) @ ode.JFLIP


def grid_sweep(u: CoefficientPair, lam: complex, t, tol: ode.Tolerances = ode.DEFAULT_TOL) -> GridSweep:
    return GridSweep(u, lam, t, tol)


def check_eigenvalue(data: MonodromyData, rel: float = 1e-8) -> None:
    D, Dd = delta_from_data(data), delta_dot_from_data(data)
    if abs(D) > rel * abs(Dd) * (1 + abs(data.lam)):
        raise NotAnEigenvalueError(f"lam = {data.lam} is not an eigenvalue (|Delta| = {abs(D):.3e})")


def psi_boundary_vector(data: MonodromyData) -> np.ndarray:
    """(psi, psi', psi^[2]) at x = 1."""
    return -np.array([0.0, data.Mt[0, 2], data.Mt[1, 2]])


def psi_initial_vector(data: MonodromyData) -> np.ndarray:
    """(psi, psi', psi^[2]) at x = 0."""
    return np.array([0.0, data.M[0, 2], -data.M[0, 1]])


def period_ratio(data: MonodromyData) -> complex:
    """kappa with psi(x + 1) = kappa psi(x)."""
    return -data.Mt[0, 2] / data.M[0, 2]


def phi_scale(data: MonodromyData) -> complex:
    """Factor c with phi = c psi.

    Expanding phi'(2) through Phi(2)^{-1} gives phi'(2) = -y3~(1), while
    psi'(2) = kappa psi'(1); hence c = y3(1) / y3~(1) = -1 / kappa. The textbook
    route -phi^[2](0) / y2(1) cancels badly for lam < 0 and is kept only in
    `phi_scale_from_minor` for cross-checks.
    """
    if data.M[0, 1] == 0 or data.M[0, 2] == 0 or data.Mt[0, 2] == 0:
        raise DegenerateEigenfunctionError("y2(1), y3(1) or y3~(1) vanishes at the eigenvalue")
    return data.M[0, 2] / data.Mt[0, 2]


def phi_scale_from_minor(data: MonodromyData) -> complex:
    """-phi^[2](0) / y2(1) with phi^[2](0) = y1(1) y2(2) - y2(1) y1(2)."""
    return -two_point_minor(data, 0, 1) / data.M[0, 1]


def _split(grid):
    """Base points in [0, 1] for a grid on [0, 2] and the branch of each point."""
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < 0) or np.any(grid > 2) or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing inside [0, 2]")
    upper = grid > 1.0
    base = np.where(upper, grid - 1.0, grid)
    uniq, inv = np.unique(base, return_inverse=True)
    return grid, upper, uniq, inv


def _psi_vectors(sweep: GridSweep, data: MonodromyData, upper, inv):
    if data.lam.real > 0:
        base = sweep.H() @ psi_boundary_vector(data)
    else:
        base = sweep.Phi @ psi_initial_vector(data)
    vals = base[inv]
    vals[upper] *= period_ratio(data)
    return vals


def _prepare(u, mu, grid, tol, data):
    if data is None:
        data = monodromy_data(u, mu, tol)
    check_eigenvalue(data)
    grid, upper, base, inv = _split(grid)
    sweep = grid_sweep(u, mu, base, tol)
    return data, grid, upper, inv, sweep


def psi(u: CoefficientPair, mu: float, grid, tol: ode.Tolerances = ode.DEFAULT_TOL,
        data: MonodromyData | None = None) -> SampledFunction:
    """psi(x) = det [[y2(x), y3(x)], [y2(1), y3(1)]] on a grid inside [0, 2]."""
    data, grid, upper, inv, sweep = _prepare(u, mu, grid, tol, data)
    phi_scale(data)
    vec = _psi_vectors(sweep, data, upper, inv)
    return SampledFunction(grid, vec[:, 0], vec[:, 1])


def phi(u: CoefficientPair, mu: float, grid, tol: ode.Tolerances = ode.DEFAULT_TOL,
        data: MonodromyData | None = None) -> SampledFunction:
    """The determinant eigenfunction phi(x) = det [[y1(x), y2(x), y3(x)], [.. x=1 ..], [.. x=2 ..]]."""
    data, grid, upper, inv, sweep = _prepare(u, mu, grid, tol, data)
    c = phi_scale(data)
    vec = c * _psi_vectors(sweep, data, upper, inv)
    return SampledFunction(grid, vec[:, 0], vec[:, 1])


def phi_determinant(u: CoefficientPair, mu: float, grid, tol: ode.Tolerances = ode.DEFAULT_TOL) -> np.ndarray:
    """Literal 3x3 determinant form of phi (reference for small |mu| only)."""
    grid = np.asarray(grid, dtype=float)
    pts = np.unique(np.concatenate([grid, [1.0, 2.0]]))
    P = ode.fundamental_matrix(u, mu, pts, tol=tol)[:, 0, :]
    r1 = P[np.searchsorted(pts, 1.0)]
    r2 = P[np.searchsorted(pts, 2.0)]
    rows = P[np.searchsorted(pts, grid)]
    return np.array([np.linalg.det(np.array([r, r1, r2])) for r in rows])


def chi(u: CoefficientPair, mu: float, grid, tol: ode.Tolerances = ode.DEFAULT_TOL,
        data: MonodromyData | None = None) -> SampledFunction:
    """chi = y3~(t) on [0, 1] and y3~(t - 2) = y3(2 - t, t) on (1, 2].

    On (1, 2] the value and derivative are read off the first row of
    G(t - 1) = Phi(2 - t, t - 1). At t = 1 the left branch is returned and the
    right-hand limit is stored in `seams`.
    """
    data, grid, upper, inv, sweep = _prepare(u, mu, grid, tol, data)
    lower_v = sweep.Phit[:, 0, 2]
    lower_d = sweep.Phit[:, 1, 2]
    upper_v = sweep.G[:, 0, 2]
    upper_d = -sweep.G[:, 0, 1]
    vals = np.where(upper, upper_v[inv], lower_v[inv])
    ders = np.where(upper, upper_d[inv], lower_d[inv])
    seams = {}
    if np.any(grid == 1.0):
        seams[1.0] = {"left": (data.Mt[0, 2], data.Mt[1, 2]), "right": (data.M[0, 2], -data.M[0, 1])}
    return SampledFunction(grid, vals, ders, seams)
