"""Zero-mean 1-periodic trigonometric polynomials and coefficient pairs (p, q).

A series of order N is stored through its cosine and sine amplitudes,

    f(x) = sum_{n=1..N} a_n cos(2 pi n x) + b_n sin(2 pi n x),

so the Fourier transforms f_cn = int_0^1 f cos(2 pi n x) dx equal a_n / 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TWO_PI = 2.0 * np.pi


def _as_modes(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    return arr


@dataclass(frozen=True)
class TrigSeries:
    """Real trig polynomial without constant term."""

    cos: np.ndarray
    sin: np.ndarray

    def __post_init__(self):
        c = _as_modes(self.cos)
        s = _as_modes(self.sin)
        n = max(c.size, s.size)
        object.__setattr__(self, "cos", np.pad(c, (0, n - c.size)))
        object.__setattr__(self, "sin", np.pad(s, (0, n - s.size)))
        self.cos.setflags(write=False)
        self.sin.setflags(write=False)

    @classmethod
    def zero(cls, N: int = 0) -> "TrigSeries":
        return cls(np.zeros(N), np.zeros(N))

    @property
    def N(self) -> int:
        return self.cos.size

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.N == 0:
            return np.zeros_like(x)
        k = np.arange(1, self.N + 1)
        arg = TWO_PI * np.multiply.outer(np.mod(x, 1.0), k)
        return np.cos(arg) @ self.cos + np.sin(arg) @ self.sin

    def derivative(self) -> "TrigSeries":
        k = TWO_PI * np.arange(1, self.N + 1)
        return TrigSeries(k * self.sin, -k * self.cos)

    def fourier_coeff(self, n: int, kind: str) -> float:
        """Plain integral of f against cos/sin(2 pi n x); odd extension in n for sin."""
        if n == 0:
            raise ValueError("mode index n = 0 has no transform")
        if kind not in ("cos", "sin"):
            raise ValueError(f"unknown kind {kind!r}")
        m = abs(n)
        if m > self.N:
            return 0.0
        if kind == "cos":
            return 0.5 * self.cos[m - 1]
        return 0.5 * self.sin[m - 1] * (1 if n > 0 else -1)

    def l2(self) -> float:
        return float(np.sqrt(0.5 * (np.sum(self.cos**2) + np.sum(self.sin**2))))

    def padded(self, N: int) -> "TrigSeries":
        if N < self.N:
            return TrigSeries(self.cos[:N], self.sin[:N])
        return TrigSeries(np.pad(self.cos, (0, N - self.N)), np.pad(self.sin, (0, N - self.N)))

    def __add__(self, other: "TrigSeries") -> "TrigSeries":
        N = max(self.N, other.N)
        a, b = self.padded(N), other.padded(N)
        return TrigSeries(a.cos + b.cos, a.sin + b.sin)

    def __mul__(self, c: float) -> "TrigSeries":
        return TrigSeries(c * self.cos, c * self.sin)

    __rmul__ = __mul__

    def __neg__(self) -> "TrigSeries":
        return TrigSeries(-self.cos, -self.sin)


@dataclass(frozen=True)
class CoefficientPair:
    """The coefficient pair u = (p, q) of the third order operator."""

    p: TrigSeries
    q: TrigSeries

    def __post_init__(self):
        N = max(self.p.N, self.q.N)
        object.__setattr__(self, "p", self.p.padded(N))
        object.__setattr__(self, "q", self.q.padded(N))

    @classmethod
    def zero(cls, N: int = 0) -> "CoefficientPair":
        return cls(TrigSeries.zero(N), TrigSeries.zero(N))

    @classmethod
    def from_arrays(cls, p_cos, p_sin, q_cos, q_sin) -> "CoefficientPair":
        return cls(TrigSeries(p_cos, p_sin), TrigSeries(q_cos, q_sin))

    @classmethod
    def from_vector(cls, v, N: int) -> "CoefficientPair":
        """Inverse of `to_vector`: blocks p_cos, p_sin, q_cos, q_sin of length N."""
        v = np.asarray(v, dtype=float)
        if v.size != 4 * N:
            raise ValueError(f"expected {4 * N} entries, got {v.size}")
        return cls.from_arrays(v[:N], v[N : 2 * N], v[2 * N : 3 * N], v[3 * N :])

    @property
    def N(self) -> int:
        return self.p.N

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.p.cos, self.p.sin, self.q.cos, self.q.sin])

    def padded(self, N: int) -> "CoefficientPair":
        return CoefficientPair(self.p.padded(N), self.q.padded(N))

    def norms(self) -> tuple[float, float]:
        """Return (||u||, ||u||_1) with ||u||_1^2 = ||p'||^2 + ||q||^2."""
        q2 = self.q.l2() ** 2
        return (
            float(np.sqrt(self.p.l2() ** 2 + q2)),
            float(np.sqrt(self.p.derivative().l2() ** 2 + q2)),
        )

    def norm1(self) -> float:
        return self.norms()[1]

    def star(self) -> "CoefficientPair":
        return CoefficientPair(self.p, -self.q)

    def reflect(self) -> "CoefficientPair":
        # f(1 - x): cosines keep their sign, sines flip
        return CoefficientPair(
            TrigSeries(self.p.cos, -self.p.sin), TrigSeries(self.q.cos, -self.q.sin)
        )

    def star_reflect(self) -> "CoefficientPair":
        return self.star().reflect()

    def involution(self, which: str) -> "CoefficientPair":
        try:
            return {"star": self.star, "reflect": self.reflect, "star_reflect": self.star_reflect}[which]()
        except KeyError:
            raise ValueError(f"unknown involution {which!r}") from None

    def __add__(self, other: "CoefficientPair") -> "CoefficientPair":
        return CoefficientPair(self.p + other.p, self.q + other.q)

    def __sub__(self, other: "CoefficientPair") -> "CoefficientPair":
        return self + (-1.0) * other

    def __mul__(self, c: float) -> "CoefficientPair":
        return CoefficientPair(c * self.p, c * self.q)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "p_cos": self.p.cos.tolist(),
            "p_sin": self.p.sin.tolist(),
            "q_cos": self.q.cos.tolist(),
            "q_sin": self.q.sin.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CoefficientPair":
        try:
            N = int(obj["N"])
            arrays = [obj[k] for k in ("p_cos", "p_sin", "q_cos", "q_sin")]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed coefficient record: {exc}") from exc
        if N < 0 or any(len(a) != N for a in arrays):
            raise ValueError("coefficient arrays must all have length N")
        return cls.from_arrays(*arrays)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2))

    @classmethod
    def load(cls, path) -> "CoefficientPair":
        return cls.from_json(json.loads(Path(path).read_text()))


def random_direction(N: int, seed: int) -> CoefficientPair:
    """Pseudo-random pair normalised to ||u||_1 = 1.

    Mode k amplitudes are damped by 1/k so p' and q share the same
    spectral profile.
    """
    rng = np.random.default_rng(seed)
    k = np.arange(1, N + 1)
    g = rng.standard_normal((4, N))
    u = CoefficientPair.from_arrays(
        g[0] / (TWO_PI * k**2), g[1] / (TWO_PI * k**2), g[2] / k, g[3] / k
    )
    return u * (1.0 / u.norm1())


def random_in_ball(radius: float, N: int, seed: int) -> CoefficientPair:
    """Deterministic random pair with ||u||_1 strictly inside the ball."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    rng = np.random.default_rng(seed)
    r = radius * (0.5 + 0.49 * rng.random())
    return r * random_direction(N, seed)
