"""Decreasing profiles ρ and even functions sampled on centered lattices."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import Any

import numpy as np
from scipy.integrate import trapezoid

from santalo.errors import DomainError, NonMonotoneRhoError
from santalo.settings import settings
from santalo.utils import formats

MONOTONE_CHECK_POINTS = 1_000
INVERSE_BISECTION_STEPS = 200


class RhoKind(str, Enum):
    INDICATOR = "indicator"
    EXPONENTIAL = "exponential"
    POWER = "power"
    TABLE = "table"
    REGULARIZED = "regularized"


Vectorized = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class RhoFunction:
    """Nonincreasing ``ρ: R -> [0, ∞]`` with its generalized inverse.

    ``inverse(s) = sup{t : ρ(t) >= s}``; it is ``+inf`` for ``s <= floor`` and
    ``-inf`` when no ``t`` qualifies. Use the classmethods to build one.
    """

    kind: RhoKind
    evaluate: Vectorized
    inverse_fn: Vectorized
    floor: float = 0.0
    params: dict[str, Any] = field(default_factory=dict)
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        self.check_monotone()

    def __call__(self, t) -> np.ndarray | float:
        T = np.asarray(t, dtype=float)
        out = np.asarray(self.evaluate(T), dtype=float)
        return float(out) if out.ndim == 0 else out

    def inverse(self, s) -> np.ndarray | float:
        S = np.asarray(s, dtype=float)
        out = np.asarray(self.inverse_fn(S), dtype=float)
        return float(out) if out.ndim == 0 else out

    @property
    def at_zero(self) -> float:
        return float(self(0.0))

    @property
    def label(self) -> str:
        args = ", ".join(f"{k}={v:g}" for k, v in self.params.items() if np.isscalar(v))
        return f"{self.kind.value}({args})"

    def check_monotone(self, lo: float = -5.0, hi: float = 50.0) -> None:
        t = np.linspace(lo, hi, MONOTONE_CHECK_POINTS)
        values = np.asarray(self.evaluate(t), dtype=float)
        if np.any(np.isnan(values)) or np.any(values < 0):
            raise DomainError(f"{self.kind.value} profile takes invalid values")
        finite = np.where(np.isinf(values), np.finfo(float).max, values)
        if np.any(np.diff(finite) > 1e-12 * np.maximum(1.0, finite[:-1])):
            raise NonMonotoneRhoError(f"{self.kind.value} profile is not nonincreasing")

    def scaled(self, c: float) -> RhoFunction:
        """``c * ρ``."""
        if c <= 0:
            raise DomainError("scale must be positive")
        evaluate, inverse_fn = self.evaluate, self.inverse_fn
        return RhoFunction(
            kind=self.kind,
            evaluate=lambda t: c * evaluate(t),
            inverse_fn=lambda s: inverse_fn(s / c),
            floor=c * self.floor,
            params={**self.params, "c": c * self.params.get("c", 1.0)},
            breakpoints=self.breakpoints,
        )

    # -- constructors ---------------------------------------------------------

    @classmethod
    def indicator(cls, C: float, c: float = 1.0) -> RhoFunction:
        """``∞`` on ``t < 0``, ``c`` on ``[0, C]``, ``0`` beyond."""
        if C <= 0 or c <= 0:
            raise DomainError("indicator profile needs C > 0 and c > 0")

        def evaluate(t: np.ndarray) -> np.ndarray:
            return np.where(t < 0, np.inf, np.where(t <= C, c, 0.0))

        def inverse_fn(s: np.ndarray) -> np.ndarray:
            return np.where(s <= 0, np.inf, np.where(s <= c, C, 0.0))

        return cls(
            RhoKind.INDICATOR,
            evaluate,
            inverse_fn,
            params={"C": C, "c": c},
            breakpoints=(c,),
        )

    @classmethod
    def exponential(cls, c: float = 1.0) -> RhoFunction:
        """``c * exp(-t)``."""
        if c <= 0:
            raise DomainError("exponential profile needs c > 0")

        def inverse_fn(s: np.ndarray) -> np.ndarray:
            with np.errstate(divide="ignore"):
                return np.where(s <= 0, np.inf, np.log(c / np.maximum(s, 1e-300)))

        return cls(
            RhoKind.EXPONENTIAL,
            lambda t: c * np.exp(-t),
            inverse_fn,
            params={"c": c},
        )

    @classmethod
    def power(cls, alpha: float, c: float = 1.0) -> RhoFunction:
        """``c * (1 + t)^{-alpha}`` for ``t > -1``, ``∞`` below."""
        if alpha <= 0 or c <= 0:
            raise DomainError("power profile needs alpha > 0 and c > 0")

        def evaluate(t: np.ndarray) -> np.ndarray:
            base = np.maximum(1.0 + t, 1e-300)
            return np.where(t <= -1.0, np.inf, c * base ** (-alpha))

        def inverse_fn(s: np.ndarray) -> np.ndarray:
            safe = np.maximum(s, 1e-300)
            return np.where(s <= 0, np.inf, (c / safe) ** (1.0 / alpha) - 1.0)

        return cls(RhoKind.POWER, evaluate, inverse_fn, params={"alpha": alpha, "c": c})

    @classmethod
    def table(cls, t, values) -> RhoFunction:
        """Piecewise linear through ``(t_i, v_i)``, constant outside the table."""
        t = np.asarray(t, dtype=float).ravel()
        v = np.asarray(values, dtype=float).ravel()
        if t.size != v.size or t.size < 2:
            raise DomainError("a ρ table needs at least two matching knots")
        if np.any(np.diff(t) <= 0):
            raise DomainError("ρ table knots must be strictly increasing")
        if np.any(~np.isfinite(v)) or np.any(v < 0):
            raise DomainError("ρ table values must be finite and nonnegative")
        if np.any(np.diff(v) > 0):
            raise NonMonotoneRhoError("ρ table is not nonincreasing")

        def evaluate(x: np.ndarray) -> np.ndarray:
            return np.interp(x, t, v)

        def inverse_fn(s: np.ndarray) -> np.ndarray:
            s = np.asarray(s, dtype=float)
            i = np.searchsorted(-v, -s, side="right") - 1
            inner = np.clip(i, 0, t.size - 2)
            drop = v[inner] - v[inner + 1]
            frac = np.where(drop > 0, (v[inner] - s) / np.where(drop > 0, drop, 1.0), 1.0)
            out = t[inner] + np.clip(frac, 0.0, 1.0) * (t[inner + 1] - t[inner])
            out = np.where(i < 0, -np.inf, out)
            return np.where(s <= v[-1], np.inf, out)

        return cls(
            RhoKind.TABLE,
            evaluate,
            inverse_fn,
            floor=float(v[-1]),
            params={"knots": t.size},
            breakpoints=tuple(float(x) for x in v),
        )

    def regularized(self, eps: float | None = None) -> RhoFunction:
        """``ρ(t) e^{-εt} + ε e^{-t-1/ε}``: continuous where ρ is, strictly decreasing.

        The inverse is found by bisection on the regularized profile.
        """
        eps = settings.RHO_EPSILON if eps is None else eps
        if eps <= 0:
            raise DomainError("epsilon must be positive")
        base = self.evaluate

        def evaluate(t: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float)
            with np.errstate(over="ignore", invalid="ignore"):
                core = base(t) * np.exp(-eps * t)
                tail = eps * np.exp(-t - 1.0 / eps)
            return np.where(np.isinf(base(t)), np.inf, core + tail)

        def inverse_fn(s: np.ndarray) -> np.ndarray:
            return bisect_inverse(evaluate, np.asarray(s, dtype=float))

        return RhoFunction(
            RhoKind.REGULARIZED,
            evaluate,
            inverse_fn,
            params={**self.params, "eps": eps, "base": self.kind.value},
            breakpoints=self.breakpoints,
        )


def bisect_inverse(evaluate: Vectorized, s: np.ndarray, span: float = 1e6) -> np.ndarray:
    """``sup{t : evaluate(t) >= s}`` elementwise for a nonincreasing ``evaluate``."""
    flat = np.atleast_1d(s).astype(float).ravel()
    lo = np.zeros_like(flat)
    hi = np.ones_like(flat)
    # expand both brackets geometrically
    below = evaluate(lo) < flat
    step = 1.0
    while np.any(below) and step <= span:
        lo = np.where(below, -step, lo)
        below = evaluate(lo) < flat
        step *= 2.0
    above = evaluate(hi) >= flat
    step = 1.0
    while np.any(above) and step <= span:
        hi = np.where(above, step * 2.0, hi)
        above = evaluate(hi) >= flat
        step *= 2.0
    for _ in range(INVERSE_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        ok = evaluate(mid) >= flat
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    out = np.where(above, np.inf, np.where(below, -np.inf, lo))
    out = np.where(flat <= 0, np.inf, out)
    return out.reshape(np.shape(s))


def regularize(rho: RhoFunction, eps: float | None = None) -> RhoFunction:
    return rho.regularized(eps)


# ---------------------------------------------------------------------------
# Lattice functions
# ---------------------------------------------------------------------------


def _symmetrize(values: np.ndarray, how: str) -> np.ndarray:
    flipped = np.flip(values)
    if how == "min":
        return np.minimum(values, flipped)
    # a + b == b + a in floating point, so the mean is exactly even
    return 0.5 * (values + flipped)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nonnegative values on the lattice ``h * {-M..M}^n`` with ``M h = L``."""

    values: np.ndarray
    L: float
    h: float
    even: bool = True
    label: str = ""

    def __post_init__(self):
        V = np.array(self.values, dtype=float)
        if self.L <= 0 or self.h <= 0:
            raise DomainError("lattice needs L > 0 and h > 0")
        M = round(self.L / self.h)
        if abs(M * self.h - self.L) > 1e-9 * self.L:
            raise DomainError(f"L={self.L} is not a multiple of h={self.h}")
        if V.shape != (2 * M + 1,) * V.ndim or V.ndim == 0:
            raise DomainError(f"values must have shape ({2 * M + 1},)*n, got {V.shape}")
        if np.any(~np.isfinite(V)) or np.any(V < 0):
            raise DomainError("grid values must be finite and nonnegative")
        if self.even and not np.array_equal(V, np.flip(V)):
            raise DomainError("values are flagged even but f(x) != f(-x)")
        V.setflags(write=False)
        object.__setattr__(self, "values", V)

    @classmethod
    def from_callable(
        cls,
        fn: Callable[[np.ndarray], np.ndarray],
        n: int,
        L: float,
        h: float,
        *,
        even: bool = True,
        symmetrize: str = "mean",
        label: str = "",
    ) -> GridFunction:
        """Sample ``fn`` (rows of points -> values) on the lattice."""
        side = 2 * round(L / h) + 1
        pts = lattice_points(n, L, h)
        values = np.asarray(fn(pts), dtype=float).reshape((side,) * n)
        if even:
            values = _symmetrize(values, symmetrize)
        return cls(values, L, h, even=even, label=label)

    @classmethod
    def load(cls, path: str | Path, even: bool = True) -> GridFunction:
        _, L, h, values = formats.parse_grid(formats.read_text(path))
        if even:
            values = _symmetrize(values, "mean")
        return cls(values, L, h, even=even, label=Path(path).stem)

    def dump(self, path: str | Path) -> Path:
        text = formats.format_grid(self.n, self.L, self.h, self.values)
        return formats.write_text(path, text)

    @property
    def n(self) -> int:
        return self.values.ndim

    @property
    def M(self) -> int:
        return round(self.L / self.h)

    @property
    def side(self) -> int:
        return self.values.shape[0]

    @property
    def axis(self) -> np.ndarray:
        return self.h * np.arange(-self.M, self.M + 1)

    @cached_property
    def points(self) -> np.ndarray:
        return lattice_points(self.n, self.L, self.h)

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def same_lattice(self, other: GridFunction) -> bool:
        return self.n == other.n and self.M == other.M and np.isclose(self.h, other.h)

    def weights(self, orthant: bool = False) -> np.ndarray:
        """Flattened product trapezoid weights; ``orthant`` keeps ``x >= 0`` with
        half weight on the coordinate planes."""
        w1 = np.full(self.side, self.h)
        w1[0] = w1[-1] = 0.5 * self.h
        if orthant:
            w1[: self.M] = 0.0
            w1[self.M] = 0.5 * self.h
        w = w1
        for _ in range(self.n - 1):
            w = np.multiply.outer(w, w1)
        return np.ravel(w)

    def integrate(
        self,
        weight: Callable[[np.ndarray], np.ndarray] | None = None,
        orthant: bool = False,
    ) -> float:
        f = self.flat * self.weights(orthant)
        if weight is not None:
            mask = f != 0
            f = f.copy()
            f[mask] *= weight(self.points[mask])
        return float(f.sum())

    def mass(self) -> float:
        return self.integrate()

    def moment(self, m: int, q: float, orthant: bool = False) -> float:
        """``∫ |x_m|^q f``; for ``q < 0`` the plane ``x_m = 0`` is left out."""
        if not 0 <= m < self.n:
            raise DomainError(f"axis {m} out of range for dimension {self.n}")
        if q == 0:
            return self.integrate(orthant=orthant)

        def weight(X: np.ndarray) -> np.ndarray:
            a = np.abs(X[:, m])
            with np.errstate(divide="ignore"):
                return np.where(a > 0, a**q, 0.0 if q < 0 else a**q)

        return self.integrate(weight, orthant)

    def directional_moment(self, u: np.ndarray, j: float) -> float:
        u = np.asarray(u, dtype=float)
        return self.integrate(lambda X: np.abs(X @ u) ** j)

    def fold(self, signs) -> np.ndarray:
        """Values of ``y -> f(σ y)`` (flips along axes with ``σ_l = -1``)."""
        axes = tuple(i for i, s in enumerate(signs) if s < 0)
        return np.flip(self.values, axis=axes) if axes else self.values

    def with_values(self, values: np.ndarray, label: str = "", even: bool | None = None):
        return GridFunction(
            values, self.L, self.h, self.even if even is None else even, label or self.label
        )


@dataclass(frozen=True, eq=False)
class IndicatorGrid(GridFunction):
    """Lattice indicator of a symmetric body; integrals use the body itself.

    ``orthant`` marks ``1_{K ∩ R^n_+}``; exact orthant integrals need an
    unconditional ``K``, otherwise the lattice is used.
    """

    body: Any = None
    orthant: bool = False
    unconditional: bool = False

    @classmethod
    def from_body(
        cls,
        body,
        L: float,
        h: float,
        *,
        orthant: bool = False,
        unconditional: bool = False,
        label: str = "",
    ) -> IndicatorGrid:
        n = body.n
        side = 2 * round(L / h) + 1
        pts = lattice_points(n, L, h)
        inside = body.contains(pts)
        if orthant:
            inside &= np.all(pts >= 0, axis=1)
        values = inside.astype(float).reshape((side,) * n)
        even = not orthant
        if even:
            values = _symmetrize(values, "min")
        return cls(
            values,
            L,
            h,
            even=even,
            label=label or getattr(body, "label", ""),
            body=body,
            orthant=orthant,
            unconditional=unconditional,
        )

    def _exact(self, m: int, q: float, orthant: bool) -> float | None:
        from santalo.measure.service import moment_integral

        if self.body is None or q < 0:
            return None
        if q != int(q) and not _is_lp_ball(self.body):
            return None
        halved = self.orthant or orthant
        if halved and not self.unconditional:
            return None
        degree = int(q) if q == int(q) else q
        value = moment_integral(self.body, m, degree, oracle_method="analytic").value
        return value / 2**self.n if halved else value

    def moment(self, m: int, q: float, orthant: bool = False) -> float:
        exact = self._exact(m, q, orthant)
        return super().moment(m, q, orthant) if exact is None else exact

    def mass(self) -> float:
        return self.moment(0, 0)

    def lattice_mass(self) -> float:
        return super().integrate()


def _is_lp_ball(body) -> bool:
    return getattr(body, "meta", {}).get("kind") == "lp_ball"


def lattice_points(n: int, L: float, h: float) -> np.ndarray:
    M = round(L / h)
    axis = h * np.arange(-M, M + 1)
    return np.array(list(product(axis, repeat=n)), dtype=float).reshape(-1, n)


# ---------------------------------------------------------------------------
# One-dimensional tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Table1D:
    """Nonnegative samples of a function on a grid in ``(0, T]``."""

    t: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.array(self.t, dtype=float).ravel()
        v = np.array(self.values, dtype=float).ravel()
        if t.size != v.size or t.size < 2:
            raise DomainError("a table needs at least two matching samples")
        if t[0] <= 0 or np.any(np.diff(t) <= 0):
            raise DomainError("table grid must be strictly increasing inside (0, T]")
        if np.any(~np.isfinite(v)) or np.any(v < 0):
            raise DomainError("table values must be finite and nonnegative")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, fn, T: float, size: int = 200, label: str = "") -> Table1D:
        t = np.linspace(T / size, T, size)
        return cls(t, np.asarray(fn(t), dtype=float), label)

    @property
    def T(self) -> float:
        return float(self.t[-1])

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        inside = (s > 0) & (s <= self.T * (1 + 1e-12))
        return np.where(inside, np.interp(s, self.t, self.values), 0.0)

    def integral(self) -> float:
        """Trapezoid on the grid, left rectangle on ``(0, t_0]``."""
        return float(trapezoid(self.values, self.t) + self.t[0] * self.values[0])
