"""Recover (p, q) from truncated spectral data.

The quasi-Newton mode iterates u <- u - F^{-1}(h(u) - data), starting from
F^{-1}(data); h - F is quadratically small near zero, so this contracts in a
small ball. The full mode replaces F by the Jacobian of h at the current
iterate, assembled from the analytic gradients.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from . import ode
from .coeffs import CoefficientPair
from .forwardmap import F_inverse, RegimeError, SpectralData, forward
from .gradients import grad_hs, grad_mu
from .monodromy import BranchAmbiguityError, DomainError
from .quadrature import DEFAULT_GRID, QuadratureGrid
from .spectrum import DEFAULT_BALL_RADIUS, DiscViolationError, LocalizationError, NewtonOptions

log = logging.getLogger(__name__)

_FORWARD_FAILURES = (LocalizationError, DiscViolationError, RegimeError, DomainError, BranchAmbiguityError,
                     ode.IntegrationError)


@dataclass
class InversionReport:
    converged: bool
    iterations: int
    residual_history: np.ndarray
    final_u: CoefficientPair
    ball_violations: int
    mode: str = "quasi"
    message: str = ""
    step_norms: list[float] = field(default_factory=list)

    def contraction_ratios(self) -> np.ndarray:
        r = np.asarray(self.residual_history)
        return r[1:] / r[:-1] if r.size > 1 else np.array([])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "residual", "step_norm"])
            steps = [float("nan")] + list(self.step_norms)
            for k, r in enumerate(self.residual_history):
                s = steps[k] if k < len(steps) else float("nan")
                w.writerow([k, f"{r:.17g}", f"{s:.17g}"])


def jacobian(u: CoefficientPair, N: int, grid: QuadratureGrid = DEFAULT_GRID,
             tol: ode.Tolerances = ode.DEFAULT_TOL) -> np.ndarray:
    """d h / d (coefficient vector), rows in `SpectralData.to_vector()` order."""
    u = u.padded(N) if u.N < N else u
    if u.N > N:
        raise ValueError("u has modes above N")
    rows = []
    for n in range(1, N + 1):
        for m in (n, -n):
            rows.append(grad_mu(u, m, grid, tol).coefficient_vector(N))
            rows.append(grad_hs(u, m, grid, tol).coefficient_vector(N))
    return np.array(rows)


def _step(mode, u, residual: SpectralData, N, grid, tol):
    if mode == "quasi":
        return F_inverse(residual)
    J = jacobian(u, N, grid, tol)
    return CoefficientPair.from_vector(np.linalg.solve(J, residual.to_vector()), N)


def invert(data: SpectralData, mode: str = "quasi", tol: float = 1e-10, max_iters: int = 50,
           ball_radius: float = DEFAULT_BALL_RADIUS, damping: float = 0.5,
           ode_tol: ode.Tolerances = ode.DEFAULT_TOL, grid: QuadratureGrid = DEFAULT_GRID,
           jobs: int = 1) -> InversionReport:
    """Solve h(u) = data for u with modes <= data.N."""
    if mode not in ("quasi", "full"):
        raise ValueError("mode is 'quasi' or 'full'")
    N = data.N
    newton = NewtonOptions(ball_radius=ball_radius)
    u = F_inverse(data)
    history: list[float] = []
    steps: list[float] = []
    violations = 0
    growth = 0
    message = ""
    converged = False
    for it in range(max_iters + 1):
        try:
            h = forward(u, N, ode_tol, newton, jobs)
        except _FORWARD_FAILURES as exc:
            message = f"forward map failed at iteration {it}: {exc}"
            break
        res = h - data
        r = res.norm()
        history.append(r)
        log.info("iteration %d residual %.3e", it, r)
        if r <= tol:
            converged = True
            break
        if len(history) > 1 and r > history[-2]:
            growth += 1
            if growth >= 3:
                message = "residual grew for 3 consecutive steps"
                break
        else:
            growth = 0
        if it == max_iters:
            message = f"no convergence within {max_iters} iterations"
            break
        try:
            delta = _step(mode, u, res, N, grid, ode_tol)
        except (*_FORWARD_FAILURES, np.linalg.LinAlgError) as exc:
            message = f"step computation failed at iteration {it}: {exc}"
            break
        new = u - delta
        if new.norm1() > ball_radius:
            violations += 1
            new = u - damping * delta
        steps.append(float(np.linalg.norm(delta.to_vector())))
        u = new
    hist = np.array(history)
    if converged and hist.size > 3 and np.any(np.diff(hist[2:]) >= 0):
        converged = False
        message = "residuals not strictly decreasing after iteration 2"
    return InversionReport(converged, max(len(history) - 1, 0), hist, u, violations, mode, message, steps)


def coefficient_error(u: CoefficientPair, truth: CoefficientPair) -> float:
    """Relative l2 error of Fourier coefficients, over the common modes."""
    N = max(u.N, truth.N)
    a, b = u.padded(N).to_vector(), truth.padded(N).to_vector()
    return float(np.linalg.norm(a - b) / np.linalg.norm(b)) if np.any(b) else float(np.linalg.norm(a))
