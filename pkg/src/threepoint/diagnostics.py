"""Checks shared by the command line and the test suite.

Each function returns plain data (dicts and lists of rows) so callers decide
thresholds and presentation.
"""

from __future__ import annotations

import numpy as np

from . import forwardmap as fm
from . import gradients as gr
from . import monodromy as mo
from . import ode, oracle
from .coeffs import CoefficientPair, random_direction
from .eigenfunctions import chi, phi, psi
from .quadrature import DEFAULT_GRID, QuadratureGrid
from .spectrum import delta, delta_dot, eigenvalue, transposed_eigenvalue


def rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def delta_test_points(seed: int = 0, real: int = 150, complex_: int = 50) -> np.ndarray:
    """Real points in [-500, 500] without 0 and complex points with |lam| <= 500."""
    rng = np.random.default_rng(seed)
    xs = np.linspace(-500.0, 500.0, real + 1)
    xs = xs[xs != 0.0]
    xs = xs[:real] + 0.37
    r = 500.0 * np.sqrt(rng.uniform(0.01, 1.0, complex_))
    th = rng.uniform(-np.pi, np.pi, complex_)
    return np.concatenate([xs.astype(complex), r * np.exp(1j * th)])


def unperturbed_delta_errors(points, N: int = 2, tol: ode.Tolerances = ode.DEFAULT_TOL) -> np.ndarray:
    u = CoefficientPair.zero(N)
    return np.array([abs(delta(u, lam, tol) - oracle.delta0(lam)) / abs(oracle.delta0(lam)) for lam in points])


LIOUVILLE_POINTS = (0.5, 1.0, 2.0)


def liouville_and_multiplier_defects(u: CoefficientPair, points, x=LIOUVILLE_POINTS,
                                     tol: ode.Tolerances = ode.DEFAULT_TOL) -> tuple[dict[float, float], float]:
    """Max |det Phi(x) - 1| per x, and max |tau1 tau2 tau3 - 1| from three independently polished roots."""
    det_worst = dict.fromkeys(x, 0.0)
    prod_worst = 0.0
    for lam in points:
        d = np.abs(np.linalg.det(ode.fundamental_matrix(u, lam, list(x), tol=tol)) - 1)
        for xi, di in zip(x, d):
            det_worst[xi] = max(det_worst[xi], float(di))
        T, Tt = mo.traces(u, lam, tol)
        roots = [mo._polish(r, T, Tt) for r in mo.cardano_roots(T, Tt)]
        prod_worst = max(prod_worst, abs(np.prod(roots) - 1))
    return det_worst, prod_worst


def determinant_rounding_floor(points, x=LIOUVILLE_POINTS) -> dict[float, float]:
    """Max |det - 1| of the exact unperturbed Phi(x) after rounding to float64.

    No float64 representation of Phi does better: for large |lam| the columns
    are nearly parallel and the determinant is lost to cancellation.
    """
    out = dict.fromkeys(x, 0.0)
    for lam in points:
        d = np.abs(np.linalg.det(oracle.phi0(list(x), lam)) - 1)
        for xi, di in zip(x, d):
            out[xi] = max(out[xi], float(di))
    return out


def oracle_deviations(N: int = 6, grid: QuadratureGrid = DEFAULT_GRID,
                      tol: ode.Tolerances = ode.DEFAULT_TOL) -> dict[str, float]:
    """Largest relative deviation of each closed form at u = 0 for 1 <= n <= N."""
    u = CoefficientPair.zero(max(N, 1))
    t = grid.nodes
    x = np.linspace(0.02, 1.98, 50)
    worst: dict[str, float] = {}

    def note(name, err):
        worst[name] = max(worst.get(name, 0.0), float(err))

    pts = delta_test_points()
    note("delta", np.max(unperturbed_delta_errors(pts[::5], N, tol)))
    for n in range(1, N + 1):
        iota = oracle.mu0(n)
        for m in (n, -n):
            note("mu", abs(eigenvalue(u, m, tol).mu - oracle.mu0(m)) / oracle.mu0(n))
        data = mo.monodromy_data(u, iota, tol)
        note("delta_dot", abs(delta_dot(u, iota, tol) - oracle.delta0_dot_at(n)) / abs(oracle.delta0_dot_at(n)))
        note("tau3", abs(mo.tau3_from_data(data) - oracle.tau3_0(n)) / oracle.tau3_0(n))
        note("tau3_dot", abs(mo.tau3_dot_from_data(data) - oracle.tau3_dot0(n)) / oracle.tau3_dot0(n))
        for name, got, want in [
            ("y2(1)", data.M[0, 1], oracle.y2_at1(n)), ("y3(1)", data.M[0, 2], oracle.y3_at1(n)),
            ("y2~(1)", data.Mt[0, 1], oracle.y2t_at1(n)), ("y3~(1)", data.Mt[0, 2], oracle.y3t_at1(n)),
            ("y3_dot(1)", data.dM[0, 2], oracle.y3dot_at1(n)), ("y3~_dot(1)", data.dMt[0, 2], oracle.y3tdot_at1(n)),
        ]:
            note(name, abs(got - want) / abs(want))
        note("fundamental", rel(ode.fundamental_matrix(u, iota, x, tol=tol), oracle.phi0(x, iota)))
        f = phi(u, iota, x, tol)
        ref = oracle.eigenfunction0(n, x)
        note("phi", rel(f.values, ref[0]))
        note("phi'", rel(f.derivative_values, ref[1]))
        note("psi", rel(psi(u, iota, x, tol).values, oracle.psi0(n, x)[0]))
        c = chi(u, iota, x, tol)
        lo = x < 1
        note("chi", rel(c.values[lo], oracle.transposed_fundamental_solutions(n, x[lo])[2]))
        note("chi'", rel(c.derivative_values[lo], oracle.transposed_fundamental_solutions(n, x[lo])[1]))
        note("chi' (1,2)", rel(c.derivative_values[~lo], -oracle.fundamental_solutions(n, 2 - x[~lo])[1]))
        for name, got, want in [
            ("grad_delta", gr.grad_delta(u, iota, grid, tol), oracle.grad_delta0(n, t)),
            ("grad_mu", gr.grad_mu(u, n, grid, tol), oracle.grad_mu0(n, t)),
            ("grad_mu(-n)", gr.grad_mu(u, -n, grid, tol), oracle.grad_mu0(-n, t)),
            ("grad_mu_tilde", gr.grad_mu_tilde(u, n, grid, tol), oracle.grad_mu_tilde0(n, t)),
            ("grad_hs", gr.grad_hs(u, n, grid, tol), oracle.grad_hs0(n, t)),
            ("grad_hs(-n)", gr.grad_hs(u, -n, grid, tol), oracle.grad_hs0(-n, t)),
            ("grad_y3(1)", gr.grad_y3_at_1(u, iota, False, grid, tol), oracle.grad_y3_at1_0(n, t)),
            ("grad_y3~(1)", gr.grad_y3_at_1(u, iota, True, grid, tol), oracle.grad_y3t_at1_0(n, t)),
        ]:
            ref = gr.GradientPair(grid, *want)
            note(name, got.max_abs_difference(ref) / ref.max_abs())
        scalar, profile = gr.norming_parts(u, n, grid, tol)
        note("norming_scalar", abs(scalar - oracle.norming_scalar0(n)) / oracle.norming_scalar0(n))
        ref = gr.GradientPair(grid, *oracle.norming_profile0(n, t))
        note("norming_profile", profile.real().max_abs_difference(ref) / ref.max_abs())
        for name, g in [("grad_tau3", gr.grad_tau3(u, iota, grid, tol)),
                        ("grad_T", gr.grad_traces(u, iota, grid, tol)[0])]:
            scale = abs(oracle.tau3_0(n))
            note(name + " (mean-free)", g.max_abs() / scale)
    return worst


# gradient verification


def lambda_for(quantity: str, u: CoefficientPair, n: int, tol: ode.Tolerances = ode.DEFAULT_TOL):
    """Spectral point at which a lam-dependent quantity is checked for mode n.

    tau3 is taken at mu~_|n| (inside its domain); the other matrix quantities at mu_n.
    """
    if quantity == "tau3":
        return transposed_eigenvalue(u, abs(n), tol).mu
    if quantity in ("delta", "T", "T_tilde", "y3", "y3_tilde"):
        return eigenvalue(u, n, tol).mu
    return None


def gradient_check(u: CoefficientPair, modes, directions, quantities=gr.QUANTITIES,
                   step: float = 1e-2, order: int = 4, grid: QuadratureGrid = DEFAULT_GRID,
                   tol: ode.Tolerances = ode.DEFAULT_TOL) -> list[dict]:
    """Analytic pairing vs central difference for every quantity, mode and direction."""
    rows = []
    for n in modes:
        for q in quantities:
            lam = lambda_for(q, u, n, tol)
            g = gr.analytic_gradient(q, u, n=n, lam=lam, grid=grid, tol=tol)
            for k, v in enumerate(directions):
                a = complex(g.directional(v))
                f = complex(gr.fd_directional(q, u, v, step, n=n, lam=lam, order=order, tol=tol))
                err = abs(a - f) / max(abs(f), 1e-300)
                rows.append({"quantity": q, "n": n, "direction": k, "analytic": a.real, "fd": f.real,
                             "rel_error": err})
    return rows


def random_directions(N: int, count: int, seed: int) -> list[CoefficientPair]:
    return [random_direction(N, seed + k) for k in range(count)]


# asymptotics


def epsilon_sweep(u0: CoefficientPair, N: int, eps=(0.0125, 0.025, 0.05, 0.1), **kw) -> list[dict]:
    rows = []
    for e in eps:
        r = fm.linear_residual(e * u0, N, **kw)
        rows.append({"eps": e, "residual": r.total, "ratio": r.total / (e * e * u0.norm1() ** 2)})
    return rows


def decay_constant(u: CoefficientPair, N: int, **kw) -> tuple[float, dict[int, float]]:
    """Smallest C with |n| |h_n - F_n u| <= C ||u||_1^2 for 0 < |n| <= N."""
    r = fm.linear_residual(u, N, **kw)
    scaled = {n: w / u.norm1() ** 2 for n, w in r.weighted().items()}
    return max(scaled.values()), scaled


def gradient_asymptotic_constants(u: CoefficientPair, N: int, grid: QuadratureGrid = DEFAULT_GRID,
                                  tol: ode.Tolerances = ode.DEFAULT_TOL) -> dict[str, float]:
    """Fitted constants in sup_t |d mu_n/dp - (2 pi n/3) b_2n| <= C ||u||_1 / |n| and the h_sn analogue."""
    t = grid.nodes
    c_mu = c_hs = 0.0
    for n in [m for m in range(-N, N + 1) if m != 0]:
        gm = gr.grad_mu(u, n, grid, tol).mean_free()
        gh = gr.grad_hs(u, n, grid, tol).mean_free()
        c_mu = max(c_mu, np.max(np.abs(gm.d_p - oracle.grad_mu0(n, t)[0])) * abs(n) / u.norm1())
        c_hs = max(c_hs, np.max(np.abs(gh.d_p - oracle.grad_hs0(n, t)[0])) * abs(n) / u.norm1())
    return {"grad_mu": float(c_mu), "grad_hs": float(c_hs)}
