"""Fundamental matrices of the first order system behind the third order operator.

State rows are (y, y', y'' + p y). With A(x, lam) = [[0, 1, 0], [-p, 0, 1],
[lam - q, -p, 0]] the fundamental matrix solves Phi' = A Phi, Phi(0) = I, and
its lam-derivative solves the variational system Phidot' = A Phidot + E31 Phi.

Integration happens in the balanced frame S^{-1} Phi S, S = diag(1, s, s^2)
with s = max(1, |lam|^{1/3}), where all entries grow at the same exponential
rate. The stepper is an adaptive Dormand-Prince 8(5,3) scheme compiled with
numba; outputs are hit exactly by shortening steps, so no interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np
from scipy.integrate._ivp import dop853_coefficients as _dop

from .coeffs import CoefficientPair

# flip matrix relating Phi-tilde and the inverse transpose of Phi
JFLIP = np.array([[0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]])
J_P = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
J_Q = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])

_NS = _dop.N_STAGES
_A = np.ascontiguousarray(_dop.A[:_NS, :_NS])
_B = np.ascontiguousarray(_dop.B)
_C = np.ascontiguousarray(_dop.C[:_NS])
_E3 = np.ascontiguousarray(_dop.E3)
_E5 = np.ascontiguousarray(_dop.E5)


@dataclass(frozen=True)
class Tolerances:
    rtol: float = 1e-13
    atol: float = 1e-15
    # below the controller's own choice for |lam| up to ~3e4, so the mesh is
    # fixed and the integration error is a smooth function of u (finite
    # differences and Newton on the forward map both rely on that)
    max_step: float = 0.003
    max_steps: int = 200_000


DEFAULT_TOL = Tolerances()


class IntegrationError(RuntimeError):
    def __init__(self, msg, worst_error=float("nan")):
        super().__init__(f"{msg} (worst local error estimate {worst_error:.3e})")
        self.worst_error = worst_error


@nb.njit(cache=True, nogil=True)
def _coeff_values(x, pc, ps, qc, qs):
    w1 = np.exp(2j * np.pi * x)
    w = w1
    p = 0.0
    q = 0.0
    for k in range(pc.size):
        p += pc[k] * w.real + ps[k] * w.imag
        q += qc[k] * w.real + qs[k] * w.imag
        w = w * w1
    return p, q


@nb.njit(cache=True, nogil=True)
def _rhs(x, y, out, pc, ps, qc, qs, lam, s, left, with_dot):
    """Balanced-frame right-hand side; y holds Phi (9) then Phidot (9), row major."""
    p, q = _coeff_values(x, pc, ps, qc, qs)
    a12 = s
    a21 = -p / s
    a23 = s
    a31 = (lam - q) / (s * s)
    a32 = -p / s
    if not left:
        # Y' = A Y
        for j in range(3):
            y0 = y[j]
            y1 = y[3 + j]
            y2 = y[6 + j]
            out[j] = a12 * y1
            out[3 + j] = a21 * y0 + a23 * y2
            out[6 + j] = a31 * y0 + a32 * y1
        if with_dot:
            e = 1.0 / (s * s)
            for j in range(3):
                d0 = y[9 + j]
                d1 = y[12 + j]
                d2 = y[15 + j]
                out[9 + j] = a12 * d1
                out[12 + j] = a21 * d0 + a23 * d2
                out[15 + j] = a31 * d0 + a32 * d1 + e * y[j]
    else:
        # Y' = -Y A, rows of Y are propagated
        for i in range(3):
            r0 = y[3 * i]
            r1 = y[3 * i + 1]
            r2 = y[3 * i + 2]
            out[3 * i] = -(r1 * a21 + r2 * a31)
            out[3 * i + 1] = -(r0 * a12 + r2 * a32)
            out[3 * i + 2] = -(r1 * a23)


@nb.njit(cache=True, nogil=True)
def _block_scale(y, y_new, lo, hi, rtol, atol):
    m = 0.0
    for i in range(lo, hi):
        a = abs(y[i])
        b = abs(y_new[i])
        if a > m:
            m = a
        if b > m:
            m = b
    return atol + rtol * m


@nb.njit(cache=True, nogil=True)
def _integrate(y0, x0, x_out, pc, ps, qc, qs, lam, s, left, with_dot,
               rtol, atol, hmax, max_steps, A, B, C, E3, E5):
    """Integrate from x0 through the points x_out (monotone in travel order).

    Returns (outputs, status, steps, worst_error): status 0 on success,
    1 when the step count budget ran out, 2 when the step size underflowed.
    """
    n = y0.size
    nout = x_out.size
    outs = np.empty((nout, n), dtype=np.complex128)
    ns = B.size
    K = np.empty((ns + 1, n), dtype=np.complex128)
    y = y0.copy()
    y_new = np.empty(n, dtype=np.complex128)
    tmp = np.empty(n, dtype=np.complex128)
    x = x0
    direction = 1.0
    if nout > 0 and x_out[nout - 1] < x0:
        direction = -1.0
    _rhs(x, y, K[0], pc, ps, qc, qs, lam, s, left, with_dot)
    h = min(hmax, 0.01)
    steps = 0
    worst = 0.0
    iout = 0
    while iout < nout and abs(x_out[iout] - x) == 0.0:
        outs[iout] = y
        iout += 1
    while iout < nout:
        target = x_out[iout]
        remaining = abs(target - x)
        last = False
        h_prop = h
        if h >= remaining:
            h = remaining
            last = True
        # a tiny clipped step onto a close output node is harmless
        if not last and h < 1e-14 * max(1.0, abs(x)):
            return outs, 2, steps, worst
        hs = direction * h
        for st in range(1, ns):
            for k in range(n):
                acc = 0.0j
                for j in range(st):
                    acc += A[st, j] * K[j, k]
                tmp[k] = y[k] + hs * acc
            _rhs(x + C[st] * hs, tmp, K[st], pc, ps, qc, qs, lam, s, left, with_dot)
        for k in range(n):
            acc = 0.0j
            for j in range(ns):
                acc += B[j] * K[j, k]
            y_new[k] = y[k] + hs * acc
        _rhs(x + hs, y_new, K[ns], pc, ps, qc, qs, lam, s, left, with_dot)
        # error estimate with separate scales for Phi and Phidot blocks
        sc0 = _block_scale(y, y_new, 0, 9, rtol, atol)
        sc1 = sc0
        if n > 9:
            sc1 = _block_scale(y, y_new, 9, n, rtol, atol)
        e5 = 0.0
        e3 = 0.0
        for k in range(n):
            a5 = 0.0j
            a3 = 0.0j
            for j in range(ns + 1):
                a5 += E5[j] * K[j, k]
                a3 += E3[j] * K[j, k]
            sc = sc0 if k < 9 else sc1
            e5 += (abs(a5) / sc) ** 2
            e3 += (abs(a3) / sc) ** 2
        if e5 == 0.0 and e3 == 0.0:
            err = 0.0
        else:
            err = h * e5 / np.sqrt((e5 + 0.01 * e3) * n)
        steps += 1
        if steps > max_steps:
            return outs, 1, steps, worst
        if err <= 1.0:
            if err > worst:
                worst = err
            x = target if last else x + hs
            for k in range(n):
                y[k] = y_new[k]
                K[0, k] = K[ns, k]
            if last:
                outs[iout] = y
                iout += 1
                while iout < nout and x_out[iout] == x:
                    outs[iout] = y
                    iout += 1
            fac = 10.0 if err == 0.0 else min(10.0, 0.9 * err ** (-1.0 / 8.0))
            # a step clipped to land on an output says little about the scale
            h = min(hmax, max(h_prop, h * fac)) if last else min(hmax, h * fac)
        else:
            h = h * max(0.2, 0.9 * err ** (-1.0 / 8.0))
    return outs, 0, steps, worst


def spectral_scale(lam: complex) -> float:
    return max(1.0, abs(lam) ** (1.0 / 3.0))


def _balance(s: float) -> tuple[np.ndarray, np.ndarray]:
    S = np.array([1.0, s, s * s])
    return S, 1.0 / S


def _run(u: CoefficientPair, lam: complex, y0: np.ndarray, x0: float, x_out, left: bool,
         with_dot: bool, tol: Tolerances) -> tuple[np.ndarray, float]:
    s = spectral_scale(lam)
    x_out = np.ascontiguousarray(np.asarray(x_out, dtype=float))
    hmax = min(tol.max_step, 1.0 / s)
    outs, status, steps, worst = _integrate(
        np.ascontiguousarray(y0, dtype=np.complex128), float(x0), x_out,
        u.p.cos, u.p.sin, u.q.cos, u.q.sin, complex(lam), s, left, with_dot,
        tol.rtol, tol.atol, hmax, tol.max_steps, _A, _B, _C, _E3, _E5,
    )
    if status != 0:
        reason = "step budget exhausted" if status == 1 else "step size underflow"
        raise IntegrationError(f"integration failed: {reason} after {steps} steps", worst)
    return outs, s


def _check_points(x_points, lo=0.0, hi=2.0) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x_points, dtype=float))
    if np.any(x < lo) or np.any(x > hi):
        raise ValueError(f"points must lie in [{lo}, {hi}]")
    if np.any(np.diff(x) < 0):
        raise ValueError("points must be sorted")
    return x


def fundamental_matrix(u: CoefficientPair, lam: complex, x_points, with_lambda_derivative=False,
                       tol: Tolerances = DEFAULT_TOL):
    """Phi(x, lam) at the sorted points, optionally with dPhi/dlam.

    Returns an array of shape (m, 3, 3), or a pair of such arrays when the
    lam-derivative is requested.
    """
    x = _check_points(x_points)
    n = 18 if with_lambda_derivative else 9
    y0 = np.zeros(n, dtype=complex)
    y0[[0, 4, 8]] = 1.0
    outs, s = _run(u, lam, y0, 0.0, x, False, with_lambda_derivative, tol)
    S, Si = _balance(s)
    phi = S[None, :, None] * outs[:, :9].reshape(-1, 3, 3) * Si[None, None, :]
    if not with_lambda_derivative:
        return phi
    dphi = S[None, :, None] * outs[:, 9:].reshape(-1, 3, 3) * Si[None, None, :]
    return phi, dphi


def transposed_fundamental_matrix(u: CoefficientPair, lam: complex, x_points,
                                  with_lambda_derivative=False, tol: Tolerances = DEFAULT_TOL):
    """Phi-tilde(x, lam) = Phi(x, -lam, u_*), the transposed-operator fundamental matrix."""
    res = fundamental_matrix(u.star(), -lam, x_points, with_lambda_derivative, tol)
    if not with_lambda_derivative:
        return res
    phi, dphi = res
    return phi, -dphi


def backward_propagator(u: CoefficientPair, lam: complex, t_points, tol: Tolerances = DEFAULT_TOL):
    """G(t) = Phi(1) Phi(t)^{-1} = Phi(1 - t, t) for t in [0, 1], by integrating rows from t = 1 down.

    This avoids forming Phi(t)^{-1}, whose entries would cancel badly when
    lam is large.
    """
    t = _check_points(t_points, 0.0, 1.0)
    order = np.argsort(-t, kind="stable")
    y0 = np.zeros(9, dtype=complex)
    y0[[0, 4, 8]] = 1.0
    outs, s = _run(u, lam, y0, 1.0, t[order], True, False, tol)
    S, Si = _balance(s)
    G = np.empty((t.size, 3, 3), dtype=complex)
    G[order] = S[None, :, None] * outs.reshape(-1, 3, 3) * Si[None, None, :]
    return G


def shifted_fundamental_matrix(u: CoefficientPair, lam: complex, x: float, t: float,
                               tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Phi(x, t, lam): fundamental matrix of the equation with coefficients shifted by t.

    Computed directly from the shifted coefficients, which equals
    Phi(x + t) Phi(t)^{-1}.
    """
    if not (0.0 <= x <= 2.0 and 0.0 <= t <= 2.0 and x + t <= 2.0):
        raise ValueError("need x, t and x + t inside [0, 2]")
    return fundamental_matrix(shift(u, t), lam, [x], tol=tol)[0]


def shift(u: CoefficientPair, t: float) -> CoefficientPair:
    """Coefficients x -> u(x + t)."""
    k = 2.0 * np.pi * np.arange(1, u.N + 1) * t
    c, s = np.cos(k), np.sin(k)

    def sh(f):
        return type(f)(f.cos * c + f.sin * s, f.sin * c - f.cos * s)

    return CoefficientPair(sh(u.p), sh(u.q))


def flip_inverse_transpose(phi: np.ndarray) -> np.ndarray:
    """J (Phi^T)^{-1} J, the algebraic counterpart of Phi-tilde (for checks only)."""
    return JFLIP @ np.linalg.inv(np.swapaxes(phi, -1, -2)) @ JFLIP
