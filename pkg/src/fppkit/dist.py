"""Edge-weight distributions with exact CDFs and right-continuous inverse CDFs.

Four variants are supported: a point mass, a finite atomic distribution,
a uniform interval and an exponential.  All are supported on [0, oo).
The inverse CDF is the right-continuous one, F^{-1}(u) = min{x : F(x) >= u},
so that F^{-1}(xi) with xi ~ U(0,1) samples F and pointwise comparisons of
inverse CDFs couple environments edge by edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.integrate import quad

PROB_TOL = 1e-12


class UnsupportedCombination(ValueError):
    """Raised when an operation needs finitely supported distributions."""


@dataclass(frozen=True)
class PointMass:
    value: float

    def __post_init__(self):
        if not (self.value >= 0.0):
            raise ValueError("point mass must sit in [0, oo)")


@dataclass(frozen=True)
class FiniteAtoms:
    # ((value, prob), ...) with strictly increasing values, probs summing to 1
    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(v), float(p)) for v, p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("need at least one atom")
        vals = [v for v, _ in pts]
        if any(v < 0.0 for v in vals):
            raise ValueError("atoms must sit in [0, oo)")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("atom values must be strictly increasing")
        probs = [p for _, p in pts]
        if any(not (0.0 < p <= 1.0) for p in probs):
            raise ValueError("atom probabilities must lie in (0, 1]")
        if abs(math.fsum(probs) - 1.0) > PROB_TOL:
            raise ValueError("atom probabilities must sum to 1 within 1e-12")

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.points])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.points])


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi):
            raise ValueError("need 0 <= lo < hi")


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if not (self.rate > 0.0):
            raise ValueError("rate must be positive")


Dist = Union[PointMass, FiniteAtoms, Uniform, Exponential]


def cdf(d: Dist, x: float) -> float:
    """Exact CDF value P(X <= x); right-continuous at atoms."""
    if isinstance(d, PointMass):
        return 1.0 if x >= d.value else 0.0
    if isinstance(d, FiniteAtoms):
        return math.fsum(p for v, p in d.points if v <= x)
    if isinstance(d, Uniform):
        if x < d.lo:
            return 0.0
        if x >= d.hi:
            return 1.0
        return (x - d.lo) / (d.hi - d.lo)
    if isinstance(d, Exponential):
        return 0.0 if x < 0.0 else -math.expm1(-d.rate * x)
    raise TypeError(f"not a Dist: {d!r}")


def cdf_left(d: Dist, x: float) -> float:
    """Left limit P(X < x)."""
    if isinstance(d, PointMass):
        return 1.0 if x > d.value else 0.0
    if isinstance(d, FiniteAtoms):
        return math.fsum(p for v, p in d.points if v < x)
    return cdf(d, x)  # continuous variants


def ppf_array(d: Dist, u: np.ndarray) -> np.ndarray:
    """Vectorized right-continuous inverse CDF, min{x : F(x) >= u}, u in (0,1).

    The scalar inverse_cdf routes through this function so that scalar and
    array evaluations are bit-identical.
    """
    u = np.asarray(u, dtype=np.float64)
    if isinstance(d, PointMass):
        return np.full(u.shape, d.value)
    if isinstance(d, FiniteAtoms):
        cum = np.cumsum(d.probs)
        idx = np.searchsorted(cum, u, side="left")
        # cum[-1] can fall a few ulp short of 1.0; clamp so u ~ 1 hits the top atom
        idx = np.minimum(idx, len(cum) - 1)
        return d.values[idx]
    if isinstance(d, Uniform):
        return d.lo + u * (d.hi - d.lo)
    if isinstance(d, Exponential):
        return -np.log1p(-u) / d.rate
    raise TypeError(f"not a Dist: {d!r}")


def inverse_cdf(d: Dist, u: float) -> float:
    """Right-continuous inverse CDF at a single u in (0,1)."""
    if not (0.0 < u < 1.0):
        raise ValueError("u must lie in the open interval (0, 1)")
    return float(ppf_array(d, np.array([u]))[0])


def mean(d: Dist) -> float:
    if isinstance(d, PointMass):
        return d.value
    if isinstance(d, FiniteAtoms):
        return math.fsum(v * p for v, p in d.points)
    if isinstance(d, Uniform):
        return 0.5 * (d.lo + d.hi)
    if isinstance(d, Exponential):
        return 1.0 / d.rate
    raise TypeError(f"not a Dist: {d!r}")


@dataclass(frozen=True)
class YDist:
    """Law of the minimum of 4 independent copies of the base distribution.

    survival(x) = (1 - F_base(x))^4.
    """

    base: Dist

    def survival(self, x: float) -> float:
        return (1.0 - cdf(self.base, x)) ** 4

    def cdf(self, x: float) -> float:
        return 1.0 - self.survival(x)

    def atoms(self) -> FiniteAtoms:
        """Induced atomic law when the base is finitely supported."""
        pts = _as_atoms(self.base)
        out = []
        prev_surv = 1.0
        for v, _ in pts:
            surv = (1.0 - cdf(self.base, v)) ** 4
            p = prev_surv - surv
            if p > PROB_TOL:
                out.append((v, p))
            prev_surv = surv
        return FiniteAtoms(tuple(out))

    def mean(self) -> float:
        """E[min of 4]; exact sum for atoms, numeric survival integral otherwise."""
        if isinstance(self.base, (PointMass, FiniteAtoms)):
            a = self.atoms()
            return math.fsum(v * p for v, p in a.points)
        upper = self.base.hi if isinstance(self.base, Uniform) else np.inf
        val, _ = quad(self.survival, 0.0, upper, limit=200)
        return float(val)


def y_dist(d: Dist) -> YDist:
    """Distribution of the minimum of 4 i.i.d. copies of d."""
    return YDist(d)


def _as_atoms(d: Dist) -> tuple[tuple[float, float], ...]:
    if isinstance(d, PointMass):
        return ((d.value, 1.0),)
    if isinstance(d, FiniteAtoms):
        return d.points
    raise UnsupportedCombination(
        f"operation needs PointMass or FiniteAtoms, got {type(d).__name__}"
    )


def combine_sub_dom(f_minus: Dist, f_plus: Dist) -> tuple[FiniteAtoms, FiniteAtoms]:
    """Pointwise CDF max (sub) and min (dom) of two atomic distributions.

    The coupled environment then satisfies, per edge and per uniform u,
    ppf(sub, u) <= weight <= ppf(dom, u).
    Returned as FiniteAtoms on the union of the supports.
    """
    _as_atoms(f_minus), _as_atoms(f_plus)
    vals = sorted({v for v, _ in _as_atoms(f_minus)} | {v for v, _ in _as_atoms(f_plus)})

    def step(which):
        pts, prev = [], 0.0
        for v in vals:
            c = which(cdf(f_minus, v), cdf(f_plus, v))
            p = c - prev
            if p > PROB_TOL:
                pts.append((v, p))
            prev = c
        return FiniteAtoms(tuple(pts))

    return step(max), step(min)


def _integral_min_t(atoms: tuple[tuple[float, float], ...], t: float) -> float:
    return math.fsum(p * min(v, t) for v, p in atoms)


def more_variable(f1: Dist, f2: Dist) -> bool:
    """Increasing-concave order test: is f1 more variable than f2?

    True iff the integral of every concave non-decreasing phi is <= under f1.
    For finitely supported laws the cone is generated by phi_t(x) = min(x, t)
    with t running over the atoms of either law, plus phi(x) = x (the means),
    so the order is decided exactly on that finite family.
    """
    a1, a2 = _as_atoms(f1), _as_atoms(f2)
    ts = sorted({v for v, _ in a1} | {v for v, _ in a2})
    for t in ts:
        if _integral_min_t(a1, t) > _integral_min_t(a2, t) + PROB_TOL:
            return False
    m1 = math.fsum(v * p for v, p in a1)
    m2 = math.fsum(v * p for v, p in a2)
    return m1 <= m2 + PROB_TOL


def stochastic_order_leq(small: Dist, big: Dist) -> bool:
    """True iff small <=_st big, i.e. F_small(x) >= F_big(x) for all x.

    Equivalent to the inverse CDFs being pointwise ordered, which makes the
    shared-uniform coupling monotone edge by edge.
    """
    a1, a2 = _as_atoms(small), _as_atoms(big)
    for v in sorted({v for v, _ in a1} | {v for v, _ in a2}):
        if cdf(small, v) < cdf(big, v) - PROB_TOL:
            return False
    return True


def dist_equal(d1: Dist, d2: Dist) -> bool:
    """Equality as laws for atomic variants: exact values, probs within 1e-12."""
    a1, a2 = _as_atoms(d1), _as_atoms(d2)
    if len(a1) != len(a2):
        return False
    return all(v1 == v2 and abs(p1 - p2) <= PROB_TOL
               for (v1, p1), (v2, p2) in zip(a1, a2))


def dist_to_json(d: Dist) -> dict:
    if isinstance(d, PointMass):
        return {"kind": "point", "value": d.value}
    if isinstance(d, FiniteAtoms):
        return {"kind": "atoms", "points": [[v, p] for v, p in d.points]}
    if isinstance(d, Uniform):
        return {"kind": "uniform", "lo": d.lo, "hi": d.hi}
    if isinstance(d, Exponential):
        return {"kind": "exp", "rate": d.rate}
    raise TypeError(f"not a Dist: {d!r}")


def dist_from_json(obj: dict) -> Dist:
    kind = obj.get("kind")
    if kind == "point":
        return PointMass(float(obj["value"]))
    if kind == "atoms":
        return FiniteAtoms(tuple((float(v), float(p)) for v, p in obj["points"]))
    if kind == "uniform":
        return Uniform(float(obj["lo"]), float(obj["hi"]))
    if kind == "exp":
        return Exponential(float(obj["rate"]))
    raise ValueError(f"unknown dist kind: {kind!r}")
