"""Limit-shape calculus.

The inhomogeneous time constant is evaluated by the one-dimensional convex
minimization over the axis crossing height a,

    value(x) = min_a [ |a| nu + s_side(x - a e2) ],

with the side seminorm chosen by sign(x1); its unit sublevel set equals the
convex hull of the two homogeneous half-shapes and the vertical segment of
half-length 1/nu, which is what hull_shape builds directly. The gadget
construction realizes strict improvement of the axis constant: a block of
K+2 cheap edges (two bridges plus K verticals one column into the cheap
half-plane) beats the K unit axis edges whenever (K+2) y < K, giving the
closed-form limit bound 1 + p^(K+2) ((K+2) y - K)/K < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dist import FiniteAtoms, PointMass, cdf
from .env import (
    EnvSpec,
    HalfPlane,
    HalfPlaneAxis,
    Homogeneous,
    RandomColumns,
    Site,
    WeightField,
    edge,
)
from .estimate import (
    DEFAULT_MARGIN_CAP,
    Estimate,
    axis_constant,
    homogeneous_mu,
    mix_seed,
)
from .fpp import Box, NotContained, growth_rows


class UnboundedShape(RuntimeError):
    """Shape is a half-plane or worse; nothing compact to export."""


class InvalidGadget(ValueError):
    """Gadget parameters violate (K+2) y < K or degenerate."""


class SeminormEval:
    """1-homogeneous directional evaluator, symmetric under x -> -x.

    Backed either by an exact scaled-l1 formula (point-mass environments) or
    by directional estimates interpolated piecewise-linearly in angle and
    extended 1-homogeneously. The angular mesh width is exposed as
    interpolation_gap() so callers can report it rather than hide it.
    """

    def __init__(self, angles, values, exact_l1_scale=None):
        self._scale = exact_l1_scale
        if exact_l1_scale is None:
            ang = np.asarray(angles, dtype=float) % (2 * math.pi)
            val = np.asarray(values, dtype=float)
            if np.any(val < 0):
                raise ValueError("seminorm values must be nonnegative")
            # impose central symmetry by duplicating data at theta + pi
            ang = np.concatenate([ang, (ang + math.pi) % (2 * math.pi)])
            val = np.concatenate([val, val])
            order = np.argsort(ang)
            self._ang = ang[order]
            self._val = val[order]

    @classmethod
    def scaled_l1(cls, c: float) -> "SeminormEval":
        """Exact evaluator c * ||x||_1 (homogeneous point-mass environment)."""
        if c < 0:
            raise ValueError("scale must be nonnegative")
        return cls(None, None, exact_l1_scale=float(c))

    @classmethod
    def from_directional_estimates(cls, pairs) -> "SeminormEval":
        """pairs: iterable of (unit direction, value) or (direction, Estimate)."""
        angles, values = [], []
        for d, v in pairs:
            angles.append(math.atan2(d[1], d[0]))
            values.append(v.point if isinstance(v, Estimate) else float(v))
        return cls(angles, values)

    def interpolation_gap(self) -> float:
        if self._scale is not None:
            return 0.0
        gaps = np.diff(np.concatenate([self._ang, [self._ang[0] + 2 * math.pi]]))
        return float(gaps.max())

    def __call__(self, x) -> float:
        px, py = float(x[0]), float(x[1])
        r = math.hypot(px, py)
        if r == 0.0:
            return 0.0
        if self._scale is not None:
            return self._scale * (abs(px) + abs(py))
        theta = math.atan2(py, px) % (2 * math.pi)
        return r * float(np.interp(theta, self._ang, self._val, period=2 * math.pi))


def mubar_eval(mu_minus: SeminormEval, mu_plus: SeminormEval, nu: float, x,
               tol: float = 1e-9) -> float:
    """min_a [ |a| nu + mu_side(x - a e2) ], side picked by sign(x1).

    The target is convex in a; ternary search runs on a bracket that provably
    contains the minimizer (|a*| nu <= value at a=0), with the degenerate
    cases (vanishing side seminorm, nu = 0) resolved directly.
    """
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    px, py = float(x[0]), float(x[1])
    s = mu_plus if px >= 0 else mu_minus
    if s((1.0, 0.0)) + s((0.0, 1.0)) == 0.0:
        return 0.0  # subadditivity forces s identically zero
    if nu == 0.0:
        # minimum over a degenerates to the horizontal reach
        return s((px, 0.0))

    def g(a: float) -> float:
        return abs(a) * nu + s((px, py - a))

    l1 = abs(px) + abs(py)
    half = max((l1 + 1.0) * (1.0 + s((0.0, 1.0)) / max(nu, 1e-12)),
               g(0.0) / nu + 1.0)
    lo, hi = -half, half
    for _ in range(120):
        if hi - lo <= tol * 1e-3:
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        g1, g2 = g(m1), g(m2)
        if g1 < g2:
            hi = m2
        elif g1 > g2:
            lo = m1
        else:
            lo, hi = m1, m2
    # kinks of piecewise-linear inputs sit at these candidates; take the best
    best = min(g(0.5 * (lo + hi)), g(0.0), g(py), g(-py))
    return best


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list[tuple[float, float]]:
    """Counterclockwise convex hull (monotone chain, collinear points dropped)."""
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    if len(pts) <= 2:
        return pts
    lower = []
    for p in pts:
        while len(lower) > 1 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) > 1 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[tuple[float, float], ...]  # counterclockwise

    @classmethod
    def from_points(cls, points) -> "Polygon":
        return cls(tuple(convex_hull(points)))

    def is_convex(self, tol: float = 1e-12) -> bool:
        v = self.vertices
        k = len(v)
        if k <= 2:
            return True
        return all(_cross(v[i], v[(i + 1) % k], v[(i + 2) % k]) >= -tol for i in range(k))

    def contains_origin(self, tol: float = 1e-9) -> bool:
        v = self.vertices
        k = len(v)
        if k < 3:
            return False
        return all(_cross(v[i], v[(i + 1) % k], (0.0, 0.0)) >= -tol for i in range(k))

    def support(self, angles: np.ndarray) -> np.ndarray:
        """h(theta) = max over vertices of <v, (cos theta, sin theta)>."""
        v = np.asarray(self.vertices, dtype=float)
        u = np.stack([np.cos(angles), np.sin(angles)])
        return (v @ u).max(axis=0)


def hausdorff(p: Polygon, q: Polygon, samples: int = 720) -> float:
    """Hausdorff distance between convex polygons via the support-function
    sup metric, sampled at `samples` directions (error <= perimeter/samples)."""
    angles = 2 * math.pi * np.arange(samples) / samples
    return float(np.abs(p.support(angles) - q.support(angles)).max())


def hull_shape(w_minus: Polygon, w_plus: Polygon, nu: float) -> Polygon:
    """Convex hull of the half-shapes and the axis segment {0} x [-1/nu, 1/nu]."""
    if not nu > 0:
        raise ValueError("nu must be positive")
    if not (w_minus.is_convex() and w_plus.is_convex()):
        raise ValueError("half-shapes must be convex")
    if any(vx > 1e-12 for vx, _ in w_minus.vertices):
        raise ValueError("w_minus must lie in the closed left half-plane")
    if any(vx < -1e-12 for vx, _ in w_plus.vertices):
        raise ValueError("w_plus must lie in the closed right half-plane")
    pts = list(w_minus.vertices) + list(w_plus.vertices)
    pts += [(0.0, 1.0 / nu), (0.0, -1.0 / nu)]
    return Polygon.from_points(pts)


def seminorm_half_shape(s: SeminormEval, side: str, rays: int = 361) -> Polygon:
    """{x in the closed half-plane : s(x) <= 1} sampled on rays, as a polygon."""
    sgn = {"right": 1.0, "left": -1.0}[side]
    pts = [(0.0, 0.0)]
    for theta in np.linspace(-math.pi / 2, math.pi / 2, rays):
        u = (sgn * math.cos(theta), math.sin(theta))
        val = s(u)
        if val > 0:
            pts.append((u[0] / val, u[1] / val))
    return Polygon.from_points(pts)


def sublevel_polygon(mu_minus: SeminormEval, mu_plus: SeminormEval, nu: float,
                     rays: int = 720) -> Polygon:
    """{x : mubar_eval(x) <= 1} sampled on rays; by 1-homogeneity the boundary
    point along direction u is u / value(u)."""
    pts = []
    for theta in 2 * math.pi * np.arange(rays) / rays:
        u = (math.cos(theta), math.sin(theta))
        val = mubar_eval(mu_minus, mu_plus, nu, u)
        if val <= 0:
            raise UnboundedShape("sublevel set is unbounded along a sampled ray")
        pts.append((u[0] / val, u[1] / val))
    return Polygon.from_points(pts)


def _unbounded(spec: EnvSpec) -> bool:
    p_c = 0.5
    if isinstance(spec, Homogeneous):
        return cdf(spec.F, 0.0) >= p_c
    if isinstance(spec, (HalfPlane, HalfPlaneAxis)):
        return max(cdf(spec.F_minus, 0.0), cdf(spec.F_plus, 0.0)) >= p_c
    if isinstance(spec, RandomColumns):
        if cdf(spec.F, 0.0) >= p_c:
            return True
        return spec.epsilon > 0 and cdf(spec.F_axis, 0.0) >= p_c
    raise TypeError(f"not an EnvSpec: {spec!r}")


def empirical_growth(spec: EnvSpec, t: float, seed: int,
                     grid: int | None = None) -> list[tuple[int, int, float]]:
    """Exact growth rows (x, y, T(0,(x,y))) at threshold t on an auto-grown
    box, sorted lexicographically."""
    if t <= 0:
        raise ValueError("t must be positive")
    if _unbounded(spec):
        raise UnboundedShape("an F(0) >= 1/2 region makes the limit shape unbounded")
    field = WeightField(spec, seed)
    half = grid if grid is not None else math.ceil(t) + 16
    for _ in range(8):
        try:
            return growth_rows(field, t, Box(-half, half, -half, half))
        except NotContained:
            half *= 2
    raise NotContained(f"growth set still reaches the rim at half-width {half}")


def empirical_shape(spec: EnvSpec, t: float, seed: int, grid: int | None = None) -> Polygon:
    """Convex hull of the growth set at time t, scaled by 1/t."""
    rows = empirical_growth(spec, t, seed, grid)
    return Polygon.from_points([(x / t, y / t) for x, y, _ in rows])


@dataclass(frozen=True)
class GadgetSpec:
    y: float
    p: float
    K: int
    z_high: float

    def __post_init__(self):
        if not (0.0 < self.y < 1.0 and 0.0 < self.p < 1.0):
            raise InvalidGadget("need y in (0,1) and p in (0,1)")
        if not (isinstance(self.K, int) and self.K >= 1):
            raise InvalidGadget("K must be a positive integer")
        if not (self.z_high > 1.0):
            raise InvalidGadget("z_high must exceed 1")
        if not ((self.K + 2) * self.y < self.K):
            raise InvalidGadget("need (K+2) y < K, i.e. K > 2y/(1-y)")


def gadget_bound(g: GadgetSpec) -> float:
    """Closed-form limit bound 1 + p^(K+2) ((K+2) y - K)/K; always < 1."""
    return 1.0 + g.p ** (g.K + 2) * ((g.K + 2) * g.y - g.K) / g.K


def gadget_dist(g: GadgetSpec) -> FiniteAtoms:
    return FiniteAtoms(((g.y, g.p), (g.z_high, 1.0 - g.p)))


def gadget_env(g: GadgetSpec, mirror: bool = False) -> EnvSpec:
    """Environment realizing the pyramid: the two-atom distribution on one
    half-plane, the unit point mass on the other and on the axis.

    Default orientation puts the cheap atoms on the left so the half-plane
    region rule alone gives the axis its deterministic weights; mirror=True
    puts them on the right, which needs the explicit axis variant.
    """
    if mirror:
        return HalfPlaneAxis(PointMass(1.0), gadget_dist(g), PointMass(1.0))
    return HalfPlane(gadget_dist(g), PointMass(1.0))


def gadget_block_path(g: GadgetSpec, i: int, mirror: bool = False) -> list[Site]:
    """Block i's cheap route: bridge, K verticals one column off-axis, bridge."""
    c = 1 if mirror else -1
    lo, hi = i * g.K, (i + 1) * g.K
    return ([Site(0, lo), Site(c, lo)]
            + [Site(c, y) for y in range(lo + 1, hi + 1)]
            + [Site(0, hi)])


def axis_block_path(g: GadgetSpec, i: int) -> list[Site]:
    return [Site(0, y) for y in range(i * g.K, (i + 1) * g.K + 1)]


def block_occurs(field, g: GadgetSpec, i: int, mirror: bool = False) -> bool:
    """All K+2 edges of block i's cheap route weigh at most y."""
    path = gadget_block_path(g, i, mirror)
    return all(field.weight(edge(a, b)) <= g.y for a, b in zip(path, path[1:]))


def constructed_path_cost(field, g: GadgetSpec, blocks: int,
                          mirror: bool = False) -> tuple[float, int]:
    """Cost of the explicit axis route over the first `blocks` blocks and the
    number N of blocks where the cheap configuration occurred; on gadget
    environments this equals K (blocks - N) + (K+2) N y exactly."""
    total = 0.0
    occurrences = 0
    for i in range(blocks):
        if block_occurs(field, g, i, mirror):
            path = gadget_block_path(g, i, mirror)
            occurrences += 1
        else:
            path = axis_block_path(g, i)
        for a, b in zip(path, path[1:]):
            total = total + field.weight(edge(a, b))
    return total, occurrences


@dataclass(frozen=True)
class PyramidVerdict:
    gadget: GadgetSpec
    axis_estimate: Estimate
    analytic_bound: float
    deterministic_axis_exact: float
    gadget_axis_estimate: Estimate
    mirror: bool
    verdict: str

    @property
    def detected(self) -> bool:
        return self.verdict == "PyramidDetected"

    def to_json(self) -> dict:
        det, gad = self.deterministic_axis_exact, self.gadget_axis_estimate
        return {
            "gadget": {"y": self.gadget.y, "p": self.gadget.p,
                       "K": self.gadget.K, "z_high": self.gadget.z_high},
            "orientation": "gadget_right" if self.mirror else "gadget_left",
            "n": self.axis_estimate.n,
            "reps": self.axis_estimate.reps,
            "confidence": self.axis_estimate.confidence,
            "axis_point": self.axis_estimate.point,
            "axis_stderr": self.axis_estimate.stderr,
            "certified_upper": self.axis_estimate.certified_upper,
            "analytic_bound": self.analytic_bound,
            "mu_plus_axis" if not self.mirror else "mu_minus_axis": det,
            "mu_minus_axis" if not self.mirror else "mu_plus_axis": {
                "point": gad.point, "stderr": gad.stderr,
                "caveat": "no lower-bound certificate",
            },
            "domination_min_of_sides": min(det, gad.point),
            "verdict": self.verdict,
        }


def pyramid_test(g: GadgetSpec, n: int, reps: int, seed: int, confidence: float, *,
                 threads: int = 1, margin_cap: int = DEFAULT_MARGIN_CAP,
                 mirror: bool = False, gadget_mu_n: int = 120,
                 gadget_mu_reps: int = 40) -> PyramidVerdict:
    """Detect the axis speed-up: certified upper bound for the inhomogeneous
    axis constant strictly below the deterministic side's exact value 1.

    Detection is one-sided by design: subadditivity certifies upper bounds
    only, so strictness against the gadget side's own constant is reported
    statistically, never certified.
    """
    spec = gadget_env(g, mirror)
    est = axis_constant(spec, n, reps, seed, confidence,
                        margin_cap=margin_cap, threads=threads)
    side = homogeneous_mu(gadget_dist(g), (0, 1), gadget_mu_n, gadget_mu_reps,
                          mix_seed(seed, 0xA5A5), confidence=confidence,
                          margin_cap=margin_cap, threads=threads)
    detected = est.certified_upper is not None and est.certified_upper < 1.0
    return PyramidVerdict(
        gadget=g,
        axis_estimate=est,
        analytic_bound=gadget_bound(g),
        deterministic_axis_exact=1.0,
        gadget_axis_estimate=side,
        mirror=mirror,
        verdict="PyramidDetected" if detected else "NotDetected",
    )


def polygon_csv_rows(poly: Polygon) -> list[str]:
    return [f"{x!r},{y!r}" for x, y in poly.vertices]


def polygon_svg(polys, size: int = 512, timestamp: str | None = None) -> str:
    """Closed-path SVG, origin centered in a size x size viewport.

    polys: iterable of (Polygon, stroke color). Geometry is deterministic;
    only the optional timestamp comment varies between runs.
    """
    polys = list(polys)
    extent = max((max(abs(vx), abs(vy)) for p, _ in polys for vx, vy in p.vertices),
                 default=1.0)
    scale = (size / 2 - 30) / max(extent, 1e-9)
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">']
    if timestamp is not None:
        lines.append(f"<!-- generated: {timestamp} -->")
    lines.append(f'<line x1="0" y1="{size//2}" x2="{size}" y2="{size//2}" stroke="#ddd"/>')
    lines.append(f'<line x1="{size//2}" y1="0" x2="{size//2}" y2="{size}" stroke="#ddd"/>')
    for poly, color in polys:
        cmds = []
        for k, (vx, vy) in enumerate(poly.vertices):
            px = size / 2 + vx * scale
            py = size / 2 - vy * scale
            cmds.append(f"{'M' if k == 0 else 'L'} {px:.3f} {py:.3f}")
        cmds.append("Z")
        lines.append(f'<path d="{" ".join(cmds)}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
