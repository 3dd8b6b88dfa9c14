"""Spectral coordinates h_n = (h_cn, h_sn) and their linearisation F at u = 0."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import ode
from .coeffs import CoefficientPair
from .monodromy import tau3_from_data
from .oracle import SQRT3, mu0
from .spectrum import DEFAULT_NEWTON, EigenvalueRecord, NewtonOptions, eigenvalue, transposed_eigenvalue


class RegimeError(RuntimeError):
    """The norming-constant logarithm has a non-positive argument."""


def h_cn(u: CoefficientPair, n: int, tol: ode.Tolerances = ode.DEFAULT_TOL,
         newton: NewtonOptions = DEFAULT_NEWTON) -> float:
    return eigenvalue(u, n, tol, newton).mu - mu0(n)


def _norming_argument(rec: EigenvalueRecord) -> complex:
    data = rec.data_at_mu()
    n = rec.n
    tau = tau3_from_data(data)
    return (-1) ** (n + 1) * data.M[0, 2] / data.Mt[0, 2] / np.sqrt(tau)


def _h_sn_positive(u, n, tol, newton) -> tuple[float, EigenvalueRecord]:
    rec = transposed_eigenvalue(u, n, tol, newton)
    arg = _norming_argument(rec)
    if abs(arg.imag) > 1e-8 * abs(arg) or arg.real <= 0:
        raise RegimeError(f"norming argument {arg} for n={n} is not positive; u is outside the validated ball")
    return 8 * (np.pi * n) ** 2 * np.log(arg.real), rec


def h_sn(u: CoefficientPair, n: int, tol: ode.Tolerances = ode.DEFAULT_TOL,
         newton: NewtonOptions = DEFAULT_NEWTON) -> float:
    """Norming coordinate; for n < 0 it is -h_{s,|n|} of the star-reflected pair."""
    if n == 0:
        raise ValueError("n must be nonzero")
    if n > 0:
        return _h_sn_positive(u, n, tol, newton)[0]
    return -_h_sn_positive(u.star_reflect(), -n, tol, newton)[0]


@dataclass
class SpectralData:
    N: int
    entries: dict[int, tuple[float, float]]
    provenance: str = "computed"
    records: dict[int, EigenvalueRecord] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be at least 1")
        want = set(indices(self.N))
        if set(self.entries) != want:
            raise ValueError(f"entries must cover exactly n = +-1..+-{self.N}")
        for n, (hc, hs) in self.entries.items():
            if not (np.isfinite(hc) and np.isfinite(hs)):
                raise ValueError(f"non-finite entry at n={n}")
        if self.provenance not in ("computed", "loaded"):
            raise ValueError("provenance is 'computed' or 'loaded'")

    @classmethod
    def zeros(cls, N: int) -> "SpectralData":
        return cls(N, {n: (0.0, 0.0) for n in indices(N)})

    def to_vector(self) -> np.ndarray:
        """Blocks (h_c,n, h_s,n, h_c,-n, h_s,-n) for n = 1..N."""
        out = []
        for n in range(1, self.N + 1):
            out.extend(self.entries[n])
            out.extend(self.entries[-n])
        return np.array(out, dtype=float)

    @classmethod
    def from_vector(cls, v, N: int, provenance: str = "computed") -> "SpectralData":
        v = np.asarray(v, dtype=float)
        if v.shape != (4 * N,):
            raise ValueError(f"expected a vector of length {4 * N}")
        entries = {}
        for n in range(1, N + 1):
            b = v[4 * (n - 1): 4 * n]
            entries[n] = (float(b[0]), float(b[1]))
            entries[-n] = (float(b[2]), float(b[3]))
        return cls(N, entries, provenance)

    def __sub__(self, other: "SpectralData") -> "SpectralData":
        if self.N != other.N:
            raise ValueError("mode counts differ")
        return SpectralData.from_vector(self.to_vector() - other.to_vector(), self.N)

    def norm(self) -> float:
        return float(np.linalg.norm(self.to_vector()))

    def truncated(self, N: int) -> "SpectralData":
        if N > self.N:
            raise ValueError("cannot extend spectral data")
        return SpectralData(N, {n: self.entries[n] for n in indices(N)}, self.provenance)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "entries": [{"n": n, "h_c": self.entries[n][0], "h_s": self.entries[n][1]} for n in indices(self.N)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpectralData":
        try:
            N = int(obj["N"])
            entries = {int(e["n"]): (float(e["h_c"]), float(e["h_s"])) for e in obj["entries"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed spectral data: {exc}") from None
        return cls(N, entries, "loaded")

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "SpectralData":
        return cls.from_json(json.loads(Path(path).read_text()))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "h_c", "h_s"])
            for n in indices(self.N):
                hc, hs = self.entries[n]
                w.writerow([n, f"{hc:.17g}", f"{hs:.17g}"])

    def write_eigenvalue_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "mu", "mu0", "residual", "newton_iters", "disc_margin"])
            for n in sorted(self.records):
                r = self.records[n]
                w.writerow([n, f"{r.mu:.17g}", f"{mu0(n):.17g}", f"{r.residual:.17g}", r.newton_iters,
                            f"{r.disc_margin:.17g}"])


def indices(N: int) -> list[int]:
    return [n for n in range(-N, N + 1) if n != 0]


def _one_mode(u, n, tol, newton):
    rec = eigenvalue(u, n, tol, newton)
    return rec, (rec.mu - mu0(n), h_sn(u, n, tol, newton))


def forward(u: CoefficientPair, N: int, tol: ode.Tolerances = ode.DEFAULT_TOL,
            newton: NewtonOptions = DEFAULT_NEWTON, jobs: int = 1) -> SpectralData:
    """h(u) for 0 < |n| <= N; modes are independent and may run in threads."""
    if N < 1:
        raise ValueError("N must be at least 1")
    idx = indices(N)
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(lambda n: _one_mode(u, n, tol, newton), idx))
    else:
        results = [_one_mode(u, n, tol, newton) for n in idx]
    entries = {n: (float(e[0]), float(e[1])) for n, (_, e) in zip(idx, results)}
    records = {n: r for n, (r, _) in zip(idx, results)}
    return SpectralData(N, entries, "computed", records)


# the linear map F


_LEFT = np.array([[-1.0, 1.0 / SQRT3], [1.0, -SQRT3]])
_RIGHT = np.array([[0.0, 1.0], [1.0 / SQRT3, 0.0]])


def _rotation(fc: np.ndarray, fs: np.ndarray) -> np.ndarray:
    # acts on a stacked pair of functions, each given by its (cos, sin) transforms
    return np.array([[fc, fs], [-fs, fc]])


def F_mode(u: CoefficientPair, n: int) -> np.ndarray:
    """F_n u as (h_c, h_s): left factor * Fourier rotation * right factor applied to (p', q)."""
    dp = u.p.derivative()
    funcs = _RIGHT @ np.array([[dp.fourier_coeff(n, "cos"), dp.fourier_coeff(n, "sin")],
                               [u.q.fourier_coeff(n, "cos"), u.q.fourier_coeff(n, "sin")]])
    # row k of `funcs` holds (cos, sin) transforms of the k-th function after the right factor
    middle = np.array([funcs[0, 0] + funcs[1, 1], -funcs[0, 1] + funcs[1, 0]])
    return _LEFT @ middle


def F_apply(u: CoefficientPair, N: int) -> SpectralData:
    return SpectralData(N, {n: tuple(float(x) for x in F_mode(u, n)) for n in indices(N)})


def F_matrix(N: int) -> np.ndarray:
    """Matrix of F from `CoefficientPair.to_vector()` to `SpectralData.to_vector()`."""
    cols = []
    for j in range(4 * N):
        e = np.zeros(4 * N)
        e[j] = 1.0
        cols.append(F_apply(CoefficientPair.from_vector(e, N), N).to_vector())
    return np.array(cols).T


def _mode_block(n: int) -> np.ndarray:
    """4x4 map from (p_cos_n, p_sin_n, q_cos_n, q_sin_n) to (h_c,n, h_s,n, h_c,-n, h_s,-n)."""
    cols = []
    for j in range(4):
        e = np.zeros(4 * n)
        e[[n - 1, 2 * n - 1, 3 * n - 1, 4 * n - 1][j]] = 1.0
        u = CoefficientPair.from_vector(e, n)
        cols.append(np.concatenate([F_mode(u, n), F_mode(u, -n)]))
    return np.array(cols).T


def F_inverse(data: SpectralData) -> CoefficientPair:
    N = data.N
    coeffs = np.zeros((4, N))
    for n in range(1, N + 1):
        B = _mode_block(n)
        det = np.linalg.det(B)
        assert abs(det) > 1e-12 * np.abs(B).max() ** 4, "singular mode block"
        rhs = np.array([*data.entries[n], *data.entries[-n]])
        coeffs[:, n - 1] = np.linalg.solve(B, rhs)
    return CoefficientPair.from_vector(coeffs.ravel(), N)


# residual diagnostics


@dataclass(frozen=True)
class LinearResidual:
    total: float
    per_mode: dict[int, float]

    def weighted(self) -> dict[int, float]:
        """|n| |h_n - F_n u|."""
        return {n: abs(n) * r for n, r in self.per_mode.items()}


def linear_residual(u: CoefficientPair, N: int, data: SpectralData | None = None, **kw) -> LinearResidual:
    """||h(u) - F u|| and its per-mode pieces."""
    if data is None:
        data = forward(u, N, **kw)
    lin = F_apply(u, N)
    per = {n: float(np.hypot(data.entries[n][0] - lin.entries[n][0], data.entries[n][1] - lin.entries[n][1]))
           for n in indices(N)}
    return LinearResidual(float(np.sqrt(sum(r * r for r in per.values()))), per)


def symmetry_defects(u: CoefficientPair, N: int, **kw) -> dict[int, tuple[float, float]]:
    """mu_{-n}(u) + mu_n(u_*^-) and h_{s,-n}(u) + h_{s,n}(u_*^-) for n = 1..N."""
    ur = u.star_reflect()
    out = {}
    for n in range(1, N + 1):
        dm = eigenvalue(u, -n, **kw).mu + eigenvalue(ur, n, **kw).mu
        dh = h_sn(u, -n, **kw) + h_sn(ur, n, **kw)
        out[n] = (float(dm), float(dh))
    return out
