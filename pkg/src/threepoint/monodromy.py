"""Monodromy matrices, traces and the multiplier cubic.

Both M = Phi(1, lam) and the transposed M~ = Phi~(1, lam) are integrated
directly. Since M^{-1} = J M~^T J, every 2x2 minor of M is an entry of M~ up to
sign; this lets quantities that would otherwise cancel catastrophically at large
lam (the characteristic function among them) be written as short sums of
products of well-scaled numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ode
from .coeffs import CoefficientPair
from .oracle import NU, OMEGA, cube_root


class DomainError(ValueError):
    """lam lies in one of the excluded discs around -(2 nu n)^3, n >= 0."""


class BranchAmbiguityError(RuntimeError):
    """Two multipliers are equally close to e^z; the small-coefficient regime was left."""


class DegenerateMultiplierError(RuntimeError):
    pass


@dataclass(frozen=True)
class MonodromyData:
    """M, M~ and their lam-derivatives at one spectral point."""

    lam: complex
    M: np.ndarray
    dM: np.ndarray
    Mt: np.ndarray
    dMt: np.ndarray

    @property
    def z(self) -> complex:
        return cube_root(self.lam)

    @property
    def traces(self) -> tuple[complex, complex]:
        return np.trace(self.M), np.trace(self.Mt)

    @property
    def trace_derivatives(self) -> tuple[complex, complex]:
        return np.trace(self.dM), np.trace(self.dMt)

    def inverse(self) -> np.ndarray:
        """M^{-1} = J M~^T J, free of cancellation."""
        return ode.JFLIP @ self.Mt.T @ ode.JFLIP

    def swapped(self) -> "MonodromyData":
        """The same data seen from the transposed operator at -lam."""
        return MonodromyData(-self.lam, self.Mt, -self.dMt, self.M, -self.dM)


def monodromy_data(u: CoefficientPair, lam: complex, tol: ode.Tolerances = ode.DEFAULT_TOL) -> MonodromyData:
    M, dM = ode.fundamental_matrix(u, lam, [1.0], True, tol)
    Mt, dMt = ode.transposed_fundamental_matrix(u, lam, [1.0], True, tol)
    return MonodromyData(complex(lam), M[0], dM[0], Mt[0], dMt[0])


def monodromy(u: CoefficientPair, lam: complex, tol: ode.Tolerances = ode.DEFAULT_TOL) -> np.ndarray:
    return ode.fundamental_matrix(u, lam, [1.0], tol=tol)[0]


def traces(u: CoefficientPair, lam: complex, tol: ode.Tolerances = ode.DEFAULT_TOL) -> tuple[complex, complex]:
    return monodromy_data(u, lam, tol).traces


# domain of the branch tau_3


def excluded_disc(lam: complex) -> int | None:
    """Index n >= 0 of the closed excluded disc containing lam, or None."""
    if abs(cube_root(lam)) <= 1.0:
        return 0
    w = cube_root(-complex(lam))
    n = max(1, int(round(w.real / (2 * NU))))
    if abs(w - 2 * NU * n) <= 1.0:
        return n
    return None


def in_domain(lam: complex) -> bool:
    return excluded_disc(lam) is None


@dataclass(frozen=True)
class MultiplierTriple:
    tau1: complex
    tau2: complex
    tau3: complex
    lam: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.tau1, self.tau2, self.tau3])


def _cubic(tau, T, Tt):
    # monic form of D(tau) = -tau^3 + T tau^2 - Tt tau + 1
    return tau**3 - T * tau**2 + Tt * tau - 1.0


def _cubic_prime(tau, T, Tt):
    return 3 * tau**2 - 2 * T * tau + Tt


def cardano_roots(T: complex, Tt: complex) -> np.ndarray:
    """Closed-form roots of tau^3 - T tau^2 + Tt tau - 1."""
    shift = T / 3.0
    P = Tt - T * T / 3.0
    Q = -2.0 * T**3 / 27.0 + T * Tt / 3.0 - 1.0
    disc = np.sqrt(complex(Q * Q / 4.0 + P**3 / 27.0))
    w = -Q / 2.0 + disc if abs(-Q / 2.0 + disc) >= abs(-Q / 2.0 - disc) else -Q / 2.0 - disc
    if w == 0:
        return np.full(3, shift, dtype=complex)
    C = cube_root(w)
    roots = []
    for k in range(3):
        Ck = C * OMEGA**k
        roots.append(Ck - P / (3.0 * Ck) + shift)
    return np.array(roots, dtype=complex)


def _polish(tau, T, Tt, steps=3):
    for _ in range(steps):
        d = _cubic_prime(tau, T, Tt)
        if d == 0:
            break
        step = _cubic(tau, T, Tt) / d
        tau = tau - step
        if abs(step) <= 1e-16 * abs(tau):
            break
    return tau


def _pick_tau3(roots, z):
    ez = np.exp(z)
    dist = np.abs(roots - ez) / abs(ez)
    order = np.argsort(dist)
    if abs(dist[order[1]] - dist[order[0]]) <= 1e-9 * max(1.0, dist[order[0]]):
        raise BranchAmbiguityError(f"two multipliers equidistant from e^z at lam={complex(np.power(z, 3)):.6g}")
    return order[0]


def multipliers_from_traces(T: complex, Tt: complex, lam: complex) -> MultiplierTriple:
    z = cube_root(lam)
    roots = cardano_roots(T, Tt)
    k = _pick_tau3(roots, z)
    tau3 = _polish(roots[k], T, Tt)
    # remaining pair from Vieta; the pairwise-product form avoids subtracting
    # nearly equal numbers when |tau3| dominates
    prod = 1.0 / tau3
    total = (Tt - prod) / tau3 if abs(tau3) >= 1.0 else T - tau3
    root = np.sqrt(complex(total * total - 4.0 * prod))
    big = (total + root) / 2.0 if abs(total + root) >= abs(total - root) else (total - root) / 2.0
    small = prod / big if big != 0 else 0j
    e1, e2 = np.exp(OMEGA * z), np.exp(OMEGA**2 * z)
    # tau1 follows e^{omega z}, tau2 follows e^{omega^2 z}
    keep = abs(big - e1) + abs(small - e2) <= abs(big - e2) + abs(small - e1)
    t1, t2 = (big, small) if keep else (small, big)
    return MultiplierTriple(complex(t1), complex(t2), complex(tau3), complex(lam))


def multipliers(u: CoefficientPair, lam: complex, tol: ode.Tolerances = ode.DEFAULT_TOL) -> MultiplierTriple:
    T, Tt = traces(u, lam, tol)
    return multipliers_from_traces(T, Tt, lam)


def _require_domain(lam):
    n = excluded_disc(lam)
    if n is not None:
        raise DomainError(f"lam = {lam} lies in the excluded disc of index -{n}")


def tau3_from_data(data: MonodromyData) -> complex:
    _require_domain(data.lam)
    T, Tt = data.traces
    tau = multipliers_from_traces(T, Tt, data.lam).tau3
    if np.isreal(data.lam) and data.lam.real > 1 and abs(tau.imag) <= 1e-12 * abs(tau):
        tau = complex(tau.real)
    return tau


def tau3(u: CoefficientPair, lam: complex, tol: ode.Tolerances = ode.DEFAULT_TOL) -> complex:
    _require_domain(lam)
    return tau3_from_data(monodromy_data(u, lam, tol))


def cubic_slope(tau: complex, T: complex, Tt: complex) -> complex:
    """dD/dtau = -3 tau^2 + 2 T tau - Tt."""
    return -_cubic_prime(tau, T, Tt)


def tau3_dot_from_data(data: MonodromyData, tau: complex | None = None) -> complex:
    if tau is None:
        tau = tau3_from_data(data)
    T, Tt = data.traces
    dT, dTt = data.trace_derivatives
    denom = _cubic_prime(tau, T, Tt)
    if abs(denom) < 1e-12 * abs(tau) ** 2:
        raise DegenerateMultiplierError("dD/dtau vanishes at tau_3")
    return (dT * tau**2 - dTt * tau) / denom


def tau3_lambda_derivative(u: CoefficientPair, lam: complex, tol: ode.Tolerances = ode.DEFAULT_TOL) -> complex:
    _require_domain(lam)
    return tau3_dot_from_data(monodromy_data(u, lam, tol))


def two_point_minor(data: MonodromyData, a: int, b: int) -> complex:
    """det [[y_a(1), y_b(1)], [y_a(2), y_b(2)]] (0-based column indices).

    With Phi(2) = M^2 the determinant expands as sum_k M_{0k} m_k where m_k is
    a 2x2 minor of M, and each minor is an entry of M^{-1}.
    """
    M, Minv = data.M, data.inverse()
    total = 0j
    for k in (1, 2):
        # rows {0, k} and columns {a, b} of M; complement indices
        rest_row = 3 - k
        rest_col = 3 - a - b
        sign = (-1) ** (rest_row + rest_col)
        minor = sign * Minv[rest_col, rest_row]
        total += M[0, k] * minor
    # the k = 0 row pairs with itself and contributes nothing
    return total
