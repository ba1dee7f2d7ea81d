"""Seeded lattice environments: a declarative region rule plus a pure map
edge -> weight.

Per-edge uniforms come from a counter-based 64-bit mix of
(seed, a.x, a.y, orientation) where a is the canonical (lexicographically
smaller) endpoint, so the infinite lattice is evaluated lazily, replays
identically across restarts and threads, and two environments built on the
same seed share their uniforms edge by edge -- which is what couples them.
Weights are ppf(region distribution, uniform) in double precision.

The scalar path uses Python integers and the vectorized path uint64 arrays;
both run the identical masked splitmix64 chain, so they agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

import numpy as np

from .dist import Dist, dist_from_json, dist_to_json, ppf_array

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_CX = 0xD6E8FEB86659FD93
_CY = 0xCA01F9DD51B143DF
_CO = 0x2545F4914F6CDD1D
_TAG_ETA = 0xA24BAED4963EE407


class WrongSpec(ValueError):
    """Raised when an operation is asked of the wrong environment variant."""


class Site(NamedTuple):
    x: int
    y: int


class Edge(NamedTuple):
    a: Site
    b: Site


ORIGIN = Site(0, 0)


def edge(a, b) -> Edge:
    """Canonical nearest-neighbour edge with a < b lexicographically."""
    a, b = Site(*a), Site(*b)
    if abs(a.x - b.x) + abs(a.y - b.y) != 1:
        raise ValueError(f"not a nearest-neighbour pair: {a}, {b}")
    return Edge(a, b) if a < b else Edge(b, a)


@dataclass(frozen=True)
class Homogeneous:
    F: Dist


@dataclass(frozen=True)
class HalfPlane:
    F_minus: Dist
    F_plus: Dist


@dataclass(frozen=True)
class HalfPlaneAxis:
    F_minus: Dist
    F_plus: Dist
    F_axis: Dist


@dataclass(frozen=True)
class RandomColumns:
    F: Dist
    F_axis: Dist
    epsilon: float

    def __post_init__(self):
        if not (0.0 <= self.epsilon <= 1.0):
            raise ValueError("epsilon must lie in [0, 1]")


EnvSpec = Union[Homogeneous, HalfPlane, HalfPlaneAxis, RandomColumns]


def _mix64(z: int) -> int:
    z &= _MASK
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(0xBF58476D1CE4E5B9)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _to_uniform(h: int) -> float:
    # (h >> 11) < 2^53 is exactly representable; result lies strictly in (0,1)
    return ((h >> 11) + 0.5) * 2.0**-53


def mix_seed(seed: int, i: int) -> int:
    """Derived 64-bit stream seed; used for replication seeds."""
    return _mix64((seed & _MASK) ^ _mix64(i & _MASK))


def _edge_key(e: Edge) -> tuple[int, int, int]:
    a, b = e
    orient = 0 if b.x == a.x + 1 else 1
    return a.x, a.y, orient


def uniform_at(seed: int, e: Edge) -> float:
    """Deterministic per-edge uniform in the open interval (0, 1)."""
    ax, ay, orient = _edge_key(e)
    h = _mix64(seed ^ _GAMMA)
    h = _mix64(h ^ ((ax & _MASK) * _CX & _MASK))
    h = _mix64(h ^ ((ay & _MASK) * _CY & _MASK))
    h = _mix64(h ^ ((orient + 1) * _CO & _MASK))
    return _to_uniform(h)


def _uniform_grid(seed: int, xs: np.ndarray, ys: np.ndarray, orient: int) -> np.ndarray:
    """Uniforms for the rectangle of canonical endpoints xs x ys; same chain
    as uniform_at, absorbed coordinate by coordinate."""
    h1 = np.uint64(_mix64(seed ^ _GAMMA))
    hx = _mix64_np(h1 ^ (xs.astype(np.int64).astype(np.uint64) * np.uint64(_CX)))
    hy = ys.astype(np.int64).astype(np.uint64) * np.uint64(_CY)
    h = _mix64_np(hx[:, None] ^ hy[None, :])
    h = _mix64_np(h ^ np.uint64((orient + 1) * _CO & _MASK))
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def _eta_hash(seed: int, column: int) -> float:
    h = _mix64(seed ^ _TAG_ETA)
    h = _mix64(h ^ ((column & _MASK) * _CX & _MASK))
    return _to_uniform(h)


def _eta_grid(seed: int, xs: np.ndarray, epsilon: float) -> np.ndarray:
    h0 = np.uint64(_mix64(seed ^ _TAG_ETA))
    h = _mix64_np(h0 ^ (xs.astype(np.int64).astype(np.uint64) * np.uint64(_CX)))
    u = ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return u < epsilon


def region_of(e: Edge, spec: EnvSpec, eta: Callable[[int], int] | None = None) -> Dist:
    """Distribution assigned to edge e by the region rule.

    Half-plane rule: F_minus iff at least one endpoint lies strictly in the
    left half-plane (min endpoint x < 0), F_plus otherwise; the axis variant
    reassigns vertical edges with both endpoints at x = 0 to F_axis.
    RandomColumns needs the eta indicator (per-column defect layer), supplied
    by the owning WeightField.
    """
    a, b = e
    if isinstance(spec, Homogeneous):
        return spec.F
    if isinstance(spec, HalfPlane):
        return spec.F_minus if min(a.x, b.x) < 0 else spec.F_plus
    if isinstance(spec, HalfPlaneAxis):
        if a.x == 0 and b.x == 0:
            return spec.F_axis
        return spec.F_minus if min(a.x, b.x) < 0 else spec.F_plus
    if isinstance(spec, RandomColumns):
        if eta is None:
            raise WrongSpec("RandomColumns region rule needs the eta layer")
        if a.x == b.x:  # vertical edge in column a.x
            return spec.F_axis if eta(a.x) else spec.F
        return spec.F_axis if (eta(a.x) and eta(b.x)) else spec.F
    raise TypeError(f"not an EnvSpec: {spec!r}")


@dataclass(frozen=True)
class WeightField:
    """An EnvSpec realized under a 64-bit seed; immutable and pure."""

    spec: EnvSpec
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & _MASK)

    def uniform(self, e: Edge) -> float:
        return uniform_at(self.seed, e)

    def eta(self, column: int) -> int:
        if not isinstance(self.spec, RandomColumns):
            raise WrongSpec("eta is defined only for RandomColumns environments")
        return int(_eta_hash(self.seed, column) < self.spec.epsilon)

    def region_of(self, e: Edge) -> Dist:
        if isinstance(self.spec, RandomColumns):
            return region_of(e, self.spec, eta=self.eta)
        return region_of(e, self.spec)

    def weight(self, e: Edge) -> float:
        u = np.array([uniform_at(self.seed, e)])
        return float(ppf_array(self.region_of(e), u)[0])

    def weight_arrays(self, x_lo: int, x_hi: int, y_lo: int, y_hi: int):
        """Weights of all edges with both endpoints in the box, as two arrays:
        horizontal (W-1, H) indexed by the canonical endpoint, vertical (W, H-1).
        Bit-identical to per-edge weight() calls."""
        W = x_hi - x_lo + 1
        H = y_hi - y_lo + 1
        xs_h = np.arange(x_lo, x_hi, dtype=np.int64)
        xs_v = np.arange(x_lo, x_hi + 1, dtype=np.int64)
        ys_h = np.arange(y_lo, y_hi + 1, dtype=np.int64)
        ys_v = np.arange(y_lo, y_hi, dtype=np.int64)
        u_h = _uniform_grid(self.seed, xs_h, ys_h, 0) if W > 1 else np.empty((0, H))
        u_v = _uniform_grid(self.seed, xs_v, ys_v, 1) if H > 1 else np.empty((W, 0))
        spec = self.spec
        if isinstance(spec, Homogeneous):
            return ppf_array(spec.F, u_h), ppf_array(spec.F, u_v)
        if isinstance(spec, (HalfPlane, HalfPlaneAxis)):
            # region boundary is a row index: rows are canonical x, ascending
            n_h = int(np.clip(-x_lo, 0, max(W - 1, 0)))
            n_v = int(np.clip(-x_lo, 0, W))
            h_w = np.empty_like(u_h)
            v_w = np.empty_like(u_v)
            h_w[:n_h] = ppf_array(spec.F_minus, u_h[:n_h])
            h_w[n_h:] = ppf_array(spec.F_plus, u_h[n_h:])
            v_w[:n_v] = ppf_array(spec.F_minus, u_v[:n_v])
            v_w[n_v:] = ppf_array(spec.F_plus, u_v[n_v:])
            if isinstance(spec, HalfPlaneAxis) and x_lo <= 0 <= x_hi and H > 1:
                v_w[-x_lo] = ppf_array(spec.F_axis, u_v[-x_lo])
            return h_w, v_w
        if isinstance(spec, RandomColumns):
            eta_cols = _eta_grid(self.seed, xs_v, spec.epsilon)  # (W,)
            v_w = ppf_array(spec.F, u_v)
            if eta_cols.any() and H > 1:
                v_w[eta_cols] = ppf_array(spec.F_axis, u_v[eta_cols])
            h_w = ppf_array(spec.F, u_h)
            pair = eta_cols[:-1] & eta_cols[1:]
            if pair.any() and W > 1:
                h_w[pair] = ppf_array(spec.F_axis, u_h[pair])
            return h_w, v_w
        raise TypeError(f"not an EnvSpec: {spec!r}")


class OverrideField:
    """A field with a few edges pinned to explicit weights; used to force
    configurations in tests and demos. Quacks like WeightField."""

    def __init__(self, base: WeightField, overrides: dict):
        self.base = base
        self.overrides = {edge(a, b): float(w) for (a, b), w in overrides.items()}

    @property
    def spec(self):
        return self.base.spec

    @property
    def seed(self):
        return self.base.seed

    def weight(self, e: Edge) -> float:
        e = edge(*e)
        if e in self.overrides:
            return self.overrides[e]
        return self.base.weight(e)

    def weight_arrays(self, x_lo, x_hi, y_lo, y_hi):
        h_w, v_w = self.base.weight_arrays(x_lo, x_hi, y_lo, y_hi)
        h_w, v_w = h_w.copy(), v_w.copy()
        for (a, b), w in self.overrides.items():
            if a.x == b.x - 1:  # horizontal
                if x_lo <= a.x < x_hi and y_lo <= a.y <= y_hi:
                    h_w[a.x - x_lo, a.y - y_lo] = w
            else:
                if x_lo <= a.x <= x_hi and y_lo <= a.y < y_hi:
                    v_w[a.x - x_lo, a.y - y_lo] = w
        return h_w, v_w


def env_to_json(spec: EnvSpec) -> dict:
    if isinstance(spec, Homogeneous):
        return {"kind": "homogeneous", "F": dist_to_json(spec.F)}
    if isinstance(spec, HalfPlane):
        return {"kind": "half_plane", "F_minus": dist_to_json(spec.F_minus),
                "F_plus": dist_to_json(spec.F_plus)}
    if isinstance(spec, HalfPlaneAxis):
        return {"kind": "half_plane_axis", "F_minus": dist_to_json(spec.F_minus),
                "F_plus": dist_to_json(spec.F_plus), "F_axis": dist_to_json(spec.F_axis)}
    if isinstance(spec, RandomColumns):
        return {"kind": "random_columns", "F": dist_to_json(spec.F),
                "F_axis": dist_to_json(spec.F_axis), "epsilon": spec.epsilon}
    raise TypeError(f"not an EnvSpec: {spec!r}")


def env_from_json(obj: dict) -> EnvSpec:
    kind = obj.get("kind")
    if kind == "homogeneous":
        return Homogeneous(dist_from_json(obj["F"]))
    if kind == "half_plane":
        return HalfPlane(dist_from_json(obj["F_minus"]), dist_from_json(obj["F_plus"]))
    if kind == "half_plane_axis":
        return HalfPlaneAxis(dist_from_json(obj["F_minus"]), dist_from_json(obj["F_plus"]),
                             dist_from_json(obj["F_axis"]))
    if kind == "random_columns":
        return RandomColumns(dist_from_json(obj["F"]), dist_from_json(obj["F_axis"]),
                             float(obj["epsilon"]))
    raise ValueError(f"unknown env kind: {kind!r}")
