"""Closed forms for the unperturbed operator y''' = lam y (p = q = 0).

Nothing here touches the ODE engine; these functions are the reference
values the numerical pipeline is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT3 = np.sqrt(3.0)
NU = np.pi / SQRT3
OMEGA = np.exp(2j * np.pi / 3)


def cube_root(lam) -> complex:
    """Principal cube root, arg in (-pi/3, pi/3]."""
    lam = complex(lam)
    if lam == 0:
        return 0j
    return abs(lam) ** (1.0 / 3.0) * np.exp(1j * np.angle(lam) / 3.0)


def mu0(n: int) -> float:
    """Unperturbed three-point eigenvalue (2 nu n)^3."""
    if n == 0:
        raise ValueError("n must be nonzero")
    return (2.0 * NU * n) ** 3


def zeta(n: int) -> float:
    return 1.0 - (-1.0) ** n * np.exp(-3.0 * NU * n)


def delta0(lam) -> complex:
    if lam == 0:
        raise ValueError("lam = 0 is excluded")
    z = cube_root(lam)
    h = SQRT3 / 2.0
    return (8.0 / (3.0 * SQRT3 * lam)) * np.sin(h * z) * np.sin(h * OMEGA * z) * np.sin(h * OMEGA**2 * z)


def delta0_dot_at(n: int) -> float:
    """d/dlam of the unperturbed characteristic function at (2 nu n)^3, n >= 1."""
    return (-1.0) ** n * SQRT3 * np.exp(3 * NU * n) * zeta(n) ** 2 / (2 * np.pi * n) ** 5


@dataclass(frozen=True)
class TrigHelpers:
    a: float
    b: float
    c: float
    s: float


def trig_helpers(n: int, x) -> TrigHelpers:
    c = np.cos(np.pi * n * np.asarray(x, dtype=float))
    s = np.sin(np.pi * n * np.asarray(x, dtype=float))
    return TrigHelpers(a=SQRT3 * s - c, b=SQRT3 * c + s, c=c, s=s)


def v_vector(n: int) -> np.ndarray:
    return (2 * np.pi * n / 3.0) * np.array([1.0, -SQRT3 / (2 * np.pi * n)])


def grad_mu0(n: int, t):
    """(d mu_n / dp(t), d mu_n / dq(t)) at u = 0; valid for either sign of n."""
    if n == 0:
        raise ValueError("n must be nonzero")
    b = trig_helpers(2 * n, t).b
    return (2 * np.pi * n / 3.0) * b, -b / SQRT3


def grad_mu_tilde0(n: int, t):
    b = trig_helpers(-2 * n, t).b
    return (2 * np.pi * n / 3.0) * b, -b / SQRT3


def grad_hs0(n: int, t):
    """(d h_sn / dp(t), d h_sn / dq(t)) at u = 0; the same expression covers n < 0."""
    if n == 0:
        raise ValueError("n must be nonzero")
    a = trig_helpers(-2 * n, t).a
    return (2 * np.pi * n / SQRT3) * a, -a


def grad_delta0(n: int, t):
    """Gradient of the characteristic function at (2 nu n)^3, u = 0, n >= 1."""
    g = -delta0_dot_at(n)
    b = trig_helpers(2 * n, t).b
    v = v_vector(n)
    return g * b * v[0], g * b * v[1]


def phi0(x, lam) -> np.ndarray:
    """Unperturbed fundamental matrix, entries (1/3) sum_m r_m^(k-j) e^(r_m x), r_m^3 = lam."""
    z = cube_root(lam)
    if z == 0:
        raise ValueError("lam = 0 is excluded")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = z * OMEGA ** np.arange(3)
    k = np.arange(3)
    powers = r[None, None, :] ** (k[:, None, None] - k[None, :, None])
    ex = np.exp(np.multiply.outer(x, r))
    return np.einsum("kjm,xm->xkj", powers, ex) / 3.0


def phi0_tilde(x, lam) -> np.ndarray:
    return phi0(x, -lam)


def multipliers0(lam):
    z = cube_root(lam)
    return np.exp(OMEGA * z), np.exp(OMEGA**2 * z), np.exp(z)


def tau3_0(n: int) -> float:
    return np.exp(2 * NU * n)


def tau3_dot0(n: int) -> float:
    return np.exp(2 * NU * n) / (2 * np.pi * n) ** 2


# fundamental solutions at x = 1, lam = (2 nu n)^3, n >= 1


def y2_at1(n):
    return zeta(n) * np.exp(2 * NU * n) / (2 * SQRT3 * np.pi * n)


def y3_at1(n):
    return zeta(n) * np.exp(2 * NU * n) / (2 * np.pi * n) ** 2


def y2t_at1(n):
    return (-1.0) ** n * np.exp(NU * n) * zeta(n) / (2 * SQRT3 * np.pi * n)


def y3t_at1(n):
    return (-1.0) ** (n + 1) * np.exp(NU * n) * zeta(n) / (2 * np.pi * n) ** 2


def y3dot_at1(n):
    return np.exp(2 * NU * n) * zeta(n) / (2 * np.pi * n) ** 4 * (1 - SQRT3 / (np.pi * n))


def y3tdot_at1(n):
    return (-1.0) ** n * np.exp(NU * n) * zeta(n) / (2 * np.pi * n) ** 4 * (1 + SQRT3 / (np.pi * n))


def fundamental_solutions(n: int, x):
    """(y1, y2, y3) of y''' = lam y at lam = (2 nu n)^3 in the trigonometric form."""
    x = np.asarray(x, dtype=float)
    h = trig_helpers(n, x)
    hm = trig_helpers(-n, x)
    e = np.exp(2 * NU * n * x)
    d = np.exp(-3 * NU * n * x)
    return (
        e / 3 * (1 + 2 * d * h.c),
        e / (2 * SQRT3 * np.pi * n) * (1 + h.a * d),
        e / (2 * np.pi * n) ** 2 * (1 + hm.a * d),
    )


def transposed_fundamental_solutions(n: int, x):
    x = np.asarray(x, dtype=float)
    h = trig_helpers(n, x)
    hm = trig_helpers(-n, x)
    e = np.exp(NU * n * x)
    d = np.exp(-3 * NU * n * x)
    return (
        e / 3 * (2 * h.c + d),
        -e / (2 * SQRT3 * np.pi * n) * (hm.a + d),
        e / (2 * np.pi * n) ** 2 * (h.a + d),
    )


def eigenfunction0(n: int, x):
    """(phi, phi', phi'') of the unperturbed determinant eigenfunction at (2 nu n)^3."""
    x = np.asarray(x, dtype=float)
    kappa = (-1.0) ** (n + 1) * zeta(n) * np.exp((3 - x) * NU * n)
    return (
        kappa * trig_helpers(n, x).s / (4 * (np.pi * n) ** 3),
        kappa * trig_helpers(-n, x).b / (SQRT3 * (2 * np.pi * n) ** 2),
        -kappa * trig_helpers(n, x).b / (6 * np.pi * n),
    )


def psi0(n: int, x):
    return tuple((-1.0) ** (n + 1) * np.exp(-NU * n) * f for f in eigenfunction0(n, x))


def norming_scalar0(n: int):
    """The scalar coefficient A_n at u = 0."""
    return 3.0 / (8 * (np.pi * n) ** 2)


def norming_profile0(n: int, t):
    v = v_vector(n)
    c = trig_helpers(2 * n, t).c
    f = -SQRT3 * c / (2 * (np.pi * n) ** 2)
    return f * v[0], f * v[1]


def _alpha_beta(n, t):
    t = np.asarray(t, dtype=float)
    c = trig_helpers(n, t).c
    e0 = np.exp(-3 * NU * n * t)
    e1 = np.exp(-3 * NU * n * (1 - t))
    sgn = (-1.0) ** n
    alpha = -c * (e0 + sgn * e1)
    beta = trig_helpers(-n, t).a * e0 + sgn * trig_helpers(n, t).a * e1
    return alpha, beta


def grad_y3_at1_0(n: int, t):
    """Gradient of y3(1, (2 nu n)^3) at u = 0, up to additive constants in each slot."""
    alpha, beta = _alpha_beta(n, t)
    c2 = trig_helpers(2 * n, t).c
    sgn = (-1.0) ** n
    e = np.exp(-3 * NU * n)
    pre = -np.exp(2 * NU * n) / (4 * SQRT3 * (np.pi * n) ** 3)
    return pre * (alpha - sgn * c2 * e), pre * SQRT3 / (4 * np.pi * n) * (beta + 2 * sgn * c2 * e)


def grad_y3t_at1_0(n: int, t):
    """Gradient of the transposed y3(1, (2 nu n)^3) at u = 0, up to additive constants."""
    alpha, beta = _alpha_beta(n, t)
    c2 = trig_helpers(2 * n, t).c
    pre = (-1.0) ** n * np.exp(NU * n) / (4 * SQRT3 * (np.pi * n) ** 3)
    return pre * (alpha - c2), pre * SQRT3 / (4 * np.pi * n) * (beta + 2 * c2)
