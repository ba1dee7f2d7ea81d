"""Exact passage times on finite boxes.

Weights are nonnegative, so a single label-settling sweep (scipy's Dijkstra
over a CSR grid graph) gives exact in-box distances. A box-restricted value
equals the infinite-lattice one whenever it is no larger than every distance
label on the part of the box rim through which an admissible path could
leave: any path exiting the box must first pay its way to such a rim site.
That comparison is the truncation-exactness certificate; it is conservative,
and callers grow the box and retry when it fails.

Restrictions carve the admissible edge set: RightHalf keeps edges with at
least one endpoint at x >= 1 (the half-plane passage time that excludes
vertical axis edges), LeftHalf mirrors it, Cylinder(K) keeps edges with both
endpoints at |x| <= K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .env import Site, edge

DEFAULT_MARGIN_CAP = 4096


class NotContained(RuntimeError):
    """Growth threshold reached the box rim; enlarge the box."""


class Oversize(ValueError):
    """Brute-force box exceeds the enumeration budget."""


class Inconclusive(RuntimeError):
    """Truncation was not exact, so the check proves nothing either way."""


class TruncationFailure(RuntimeError):
    """Box growth hit the margin cap without certifying exactness."""

    def __init__(self, message, seed=None, margin=None):
        super().__init__(message)
        self.seed = seed
        self.margin = margin

    def __reduce__(self):
        # keep seed/margin across process-pool pickling
        return (TruncationFailure, (self.args[0], self.seed, self.margin))


@dataclass(frozen=True)
class Box:
    x_lo: int
    x_hi: int
    y_lo: int
    y_hi: int

    def __post_init__(self):
        if self.x_lo > self.x_hi or self.y_lo > self.y_hi:
            raise ValueError("empty box")

    @property
    def width(self) -> int:
        return self.x_hi - self.x_lo + 1

    @property
    def height(self) -> int:
        return self.y_hi - self.y_lo + 1

    @property
    def n_sites(self) -> int:
        return self.width * self.height

    def contains(self, s: Site) -> bool:
        return self.x_lo <= s.x <= self.x_hi and self.y_lo <= s.y <= self.y_hi

    def index(self, s: Site) -> int:
        # x-major, so ascending node index is lexicographic (x, y) order
        return (s.x - self.x_lo) * self.height + (s.y - self.y_lo)

    def site(self, i: int) -> Site:
        x, y = divmod(i, self.height)
        return Site(x + self.x_lo, y + self.y_lo)


@dataclass(frozen=True)
class RightHalf:
    pass


@dataclass(frozen=True)
class LeftHalf:
    pass


@dataclass(frozen=True)
class Cylinder:
    half_width: int

    def __post_init__(self):
        if self.half_width < 1:
            raise ValueError("cylinder half-width must be >= 1")


Restriction = Union[None, RightHalf, LeftHalf, Cylinder]


@dataclass(frozen=True)
class PathResult:
    time: float
    geodesic: tuple[Site, ...]
    exact: bool


def site_admissible(r: Restriction, s: Site) -> bool:
    if r is None:
        return True
    if isinstance(r, RightHalf):
        return s.x >= 0
    if isinstance(r, LeftHalf):
        return s.x <= 0
    return abs(s.x) <= r.half_width


def edge_admissible(r: Restriction, e) -> bool:
    a, b = e
    if r is None:
        return True
    if isinstance(r, RightHalf):
        return max(a.x, b.x) >= 1
    if isinstance(r, LeftHalf):
        return min(a.x, b.x) <= -1
    return abs(a.x) <= r.half_width and abs(b.x) <= r.half_width


def _h_rows_mask(r: Restriction, x_lo: int, w: int) -> np.ndarray:
    """Admissibility of horizontal edges with canonical endpoint x, per row."""
    xs = np.arange(x_lo, x_lo + w)
    if r is None:
        return np.ones(w, dtype=bool)
    if isinstance(r, RightHalf):
        return xs >= 0
    if isinstance(r, LeftHalf):
        return xs <= -1
    k = r.half_width
    return (xs >= -k) & (xs + 1 <= k)


def _v_rows_mask(r: Restriction, x_lo: int, w: int) -> np.ndarray:
    """Admissibility of vertical edges in column x, per row."""
    xs = np.arange(x_lo, x_lo + w)
    if r is None:
        return np.ones(w, dtype=bool)
    if isinstance(r, RightHalf):
        return xs >= 1
    if isinstance(r, LeftHalf):
        return xs <= -1
    return np.abs(xs) <= r.half_width


def _build_csr(h_w, v_w, box: Box, r: Restriction) -> csr_matrix:
    """Upper-triangular CSR of the admissible in-box grid graph. Each node's
    forward edges are (i, i+1) [vertical] then (i, i+height) [horizontal]."""
    w, h = box.width, box.height
    n = w * h
    vnode = np.zeros((w, h), dtype=bool)
    hnode = np.zeros((w, h), dtype=bool)
    if h > 1:
        vnode[:, :-1] = _v_rows_mask(r, box.x_lo, w)[:, None]
    if w > 1:
        hnode[:-1, :] = _h_rows_mask(r, box.x_lo, w - 1)[:, None]
    vflat = vnode.ravel()
    hflat = hnode.ravel()
    indptr = np.zeros(n + 1, dtype=np.int32)
    np.cumsum(vflat.astype(np.int32) + hflat.astype(np.int32), out=indptr[1:])
    m = int(indptr[-1])
    indices = np.empty(m, dtype=np.int32)
    data = np.empty(m, dtype=np.float64)
    if h > 1:
        vw_full = np.zeros((w, h))
        vw_full[:, :-1] = v_w
        ivert = np.flatnonzero(vflat)
        pos = indptr[ivert]
        indices[pos] = (ivert + 1).astype(np.int32)
        data[pos] = vw_full.ravel()[ivert]
    if w > 1:
        hw_full = np.zeros((w, h))
        hw_full[:-1, :] = h_w
        ihor = np.flatnonzero(hflat)
        pos = indptr[ihor] + vflat[ihor]
        indices[pos] = (ihor + h).astype(np.int32)
        data[pos] = hw_full.ravel()[ihor]
    return csr_matrix((data, indices, indptr), shape=(n, n))


def _h_edge_admissible(r: Restriction, ax: int) -> bool:
    return edge_admissible(r, (Site(ax, 0), Site(ax + 1, 0)))


def _boundary_min(dist: np.ndarray, box: Box, r: Restriction) -> float:
    """Minimum distance label over rim sites with an admissible edge leaving
    the box (unreached labels are +inf, which is conservative here: they are
    at least the sweep's limit, itself an upper bound for the target)."""
    d = dist.reshape(box.width, box.height)
    m = np.inf
    if _h_edge_admissible(r, box.x_lo - 1):
        m = min(m, float(d[0].min()))
    if _h_edge_admissible(r, box.x_hi):
        m = min(m, float(d[-1].min()))
    vmask = _v_rows_mask(r, box.x_lo, box.width)
    if vmask.any():
        m = min(m, float(d[vmask, 0].min()), float(d[vmask, -1].min()))
    return m


def _staircase(u: Site, v: Site) -> list[Site]:
    sites = [u]
    x, y = u
    while x != v.x:
        x += 1 if v.x > x else -1
        sites.append(Site(x, y))
    while y != v.y:
        y += 1 if v.y > y else -1
        sites.append(Site(x, y))
    return sites


def _bound_path(u: Site, v: Site, box: Box, r: Restriction) -> list[Site] | None:
    """An explicit admissible in-box path; its cost caps the Dijkstra sweep."""
    if r is None or isinstance(r, Cylinder):
        return _staircase(u, v)
    if isinstance(r, RightHalf):
        xd = max(u.x, v.x, 1)
        if xd > box.x_hi:
            return None
    else:
        xd = min(u.x, v.x, -1)
        if xd < box.x_lo:
            return None
    path = _staircase(u, Site(xd, u.y))
    path += _staircase(Site(xd, u.y), Site(xd, v.y))[1:]
    path += _staircase(Site(xd, v.y), v)[1:]
    return path


def _path_cost(field, sites: list[Site]) -> float:
    acc = 0.0
    for a, b in zip(sites, sites[1:]):
        acc = acc + field.weight(edge(a, b))
    return acc


def _check_endpoint(s: Site, box: Box, r: Restriction):
    if not box.contains(s):
        raise ValueError(f"site {s} outside box {box}")
    if not site_admissible(r, s):
        raise ValueError(f"site {s} inadmissible under {r}")


def _walk_predecessors(pred: np.ndarray, box: Box, u: Site, v: Site) -> tuple[Site, ...]:
    iu, iv = box.index(u), box.index(v)
    rev = [iv]
    cur = iv
    while cur != iu:
        cur = int(pred[cur])
        if cur < 0:
            raise RuntimeError("predecessor chain broken; target unreachable")
        rev.append(cur)
    return tuple(box.site(i) for i in reversed(rev))


def passage_time(field, u, v, box: Box, r: Restriction = None) -> PathResult:
    """Exact minimal weight over admissible in-box paths from u to v,
    with the recovered geodesic and the truncation-exactness certificate."""
    u, v = Site(*u), Site(*v)
    _check_endpoint(u, box, r)
    _check_endpoint(v, box, r)
    h_w, v_w = field.weight_arrays(box.x_lo, box.x_hi, box.y_lo, box.y_hi)
    graph = _build_csr(h_w, v_w, box, r)
    bound = _bound_path(u, v, box, r)
    limit = np.inf if bound is None else np.nextafter(_path_cost(field, bound), np.inf)
    dist, pred = dijkstra(graph, directed=False, indices=box.index(u),
                          return_predecessors=True, limit=limit)
    t = float(dist[box.index(v)])
    if not math.isfinite(t):
        raise RuntimeError(f"no admissible path from {u} to {v} in {box}")
    geodesic = _walk_predecessors(pred, box, u, v)
    return PathResult(t, geodesic, t <= _boundary_min(dist, box, r))


def default_box(u, v, margin: int, r: Restriction = None) -> Box:
    """Bounding rectangle of the endpoints padded by margin, clamped to the
    restriction's admissible columns."""
    u, v = Site(*u), Site(*v)
    x_lo, x_hi = min(u.x, v.x) - margin, max(u.x, v.x) + margin
    y_lo, y_hi = min(u.y, v.y) - margin, max(u.y, v.y) + margin
    if isinstance(r, RightHalf):
        x_lo = max(x_lo, 0)
    elif isinstance(r, LeftHalf):
        x_hi = min(x_hi, 0)
    elif isinstance(r, Cylinder):
        x_lo, x_hi = max(x_lo, -r.half_width), min(x_hi, r.half_width)
    return Box(x_lo, x_hi, y_lo, y_hi)


def exact_passage_time(field, u, v, r: Restriction = None, margin: int | None = None,
                       margin_cap: int = DEFAULT_MARGIN_CAP) -> PathResult:
    """passage_time on auto-grown boxes until the certificate holds.

    Starts from margin max(ceil(l1/2), 16), doubles on failure, raises
    TruncationFailure past margin_cap.
    """
    u, v = Site(*u), Site(*v)
    if margin is None:
        l1 = abs(u.x - v.x) + abs(u.y - v.y)
        margin = max(math.ceil(l1 / 2), 16)
    while True:
        res = passage_time(field, u, v, default_box(u, v, margin, r), r)
        if res.exact:
            return res
        if margin >= margin_cap:
            raise TruncationFailure(
                f"margin cap {margin_cap} reached for {u}->{v}",
                seed=getattr(field, "seed", None), margin=margin)
        margin = min(2 * margin, margin_cap)


def growth_rows(field, t: float, box: Box) -> list[tuple[int, int, float]]:
    """(x, y, T(0,(x,y))) for all sites with T <= t, sorted lexicographically.
    Exact only if t stays below every rim label, else NotContained."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    origin = Site(0, 0)
    if not box.contains(origin):
        raise ValueError("origin must lie in the box")
    h_w, v_w = field.weight_arrays(box.x_lo, box.x_hi, box.y_lo, box.y_hi)
    graph = _build_csr(h_w, v_w, box, None)
    dist = dijkstra(graph, directed=False, indices=box.index(origin),
                    limit=np.nextafter(t, np.inf))
    if _boundary_min(dist, box, None) <= t:
        raise NotContained(f"growth threshold {t} reaches the rim of {box}")
    idx = np.flatnonzero(dist <= t)
    return [(box.site(int(i)).x, box.site(int(i)).y, float(dist[i])) for i in idx]


def growth_set(field, t: float, box: Box) -> set[Site]:
    """All sites z with T(0, z) <= t, by one threshold-halted sweep."""
    return {Site(x, y) for x, y, _ in growth_rows(field, t, box)}


def brute_force_passage(field, u, v, box: Box, r: Restriction = None) -> float:
    """Test oracle: exhaustive minimum over self-avoiding admissible paths.

    Sums run left-to-right from u, matching the engine's accumulation order.
    """
    if box.n_sites > 25:
        raise Oversize(f"{box.n_sites} sites; brute force is capped at 25")
    u, v = Site(*u), Site(*v)
    _check_endpoint(u, box, r)
    _check_endpoint(v, box, r)
    weights = {}
    for x in range(box.x_lo, box.x_hi + 1):
        for y in range(box.y_lo, box.y_hi + 1):
            for b in (Site(x + 1, y), Site(x, y + 1)):
                if box.contains(b):
                    e = edge(Site(x, y), b)
                    if edge_admissible(r, e):
                        weights[e] = field.weight(e)
    best = math.inf
    visited = {u}

    def search(s: Site, acc: float):
        nonlocal best
        if acc >= best:
            return
        if s == v:
            best = acc
            return
        for nb in (Site(s.x + 1, s.y), Site(s.x - 1, s.y),
                   Site(s.x, s.y + 1), Site(s.x, s.y - 1)):
            if nb in visited or not box.contains(nb):
                continue
            e = edge(s, nb)
            if e not in weights:
                continue
            visited.add(nb)
            search(nb, acc + weights[e])
            visited.discard(nb)

    if u == v:
        return 0.0
    search(u, 0.0)
    return best


def variation_check(field, z, box: Box, tol: float = 1e-9) -> bool:
    """Check T(0,z) = min_k [T(0, k e2) + T_plus(k e2, z)] on the box.

    Requires z in the closed right half-plane. True needs only a certified
    T(0,z): box-truncated summands are upper bounds, so a match proves the
    identity. Concluding False additionally needs every summand certified and
    the rim strictly more expensive than T(0,z) (so no out-of-box k could
    tie); anything less is Inconclusive.
    """
    z = Site(*z)
    if z.x < 0:
        raise ValueError("z must lie in the closed right half-plane")
    origin = Site(0, 0)
    if not (box.contains(origin) and box.contains(z)):
        raise ValueError("box must contain the origin and z")
    h_w, v_w = field.weight_arrays(box.x_lo, box.x_hi, box.y_lo, box.y_hi)
    free = _build_csr(h_w, v_w, box, None)
    dist0 = dijkstra(free, directed=False, indices=box.index(origin))
    right = _build_csr(h_w, v_w, box, RightHalf())
    dist_r = dijkstra(right, directed=False, indices=box.index(z))
    t0z = float(dist0[box.index(z)])
    mb0 = _boundary_min(dist0, box, None)
    if t0z > mb0:
        raise Inconclusive("T(0,z) is not truncation-exact on this box")
    axis = np.array([box.index(Site(0, k)) for k in range(box.y_lo, box.y_hi + 1)])
    sums = dist0[axis] + dist_r[axis]
    if float(sums.min()) <= t0z + tol:
        return True
    mbr = _boundary_min(dist_r, box, RightHalf())
    terms_exact = bool((dist0[axis] <= mb0).all() and (dist_r[axis] <= mbr).all())
    if terms_exact and mb0 > t0z + tol:
        return False
    raise Inconclusive("decomposition terms are not truncation-exact on this box")
