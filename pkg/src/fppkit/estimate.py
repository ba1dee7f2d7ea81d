"""Monte Carlo estimation of radial limits and time constants.

Replication i runs on its own field seeded by mix_seed(master_seed, i), so
results are independent of evaluation order and worker count; aggregation
reduces the per-replication values in index order. Vertical translation
invariance (every environment here has it) makes E T(0, n e2) subadditive in
n, so finite-n means overestimate the limit and a one-sided normal bound
point + z * stderr is a certified upper confidence bound for the axis time
constant. No lower bounds are certified anywhere: finite-n means sit above
the limit and there is nothing to certify them against.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist

import numpy as np

from .dist import Dist
from .env import ORIGIN, EnvSpec, Homogeneous, Site, WeightField, mix_seed
from .fpp import (
    DEFAULT_MARGIN_CAP,
    Restriction,
    default_box,
    exact_passage_time,
    passage_time,
)


@dataclass(frozen=True)
class Estimate:
    point: float
    stderr: float
    reps: int
    n: int
    certified_upper: float | None
    confidence: float


def z_quantile(confidence: float) -> float:
    if not (0.0 < confidence < 1.0):
        raise ValueError("confidence must lie in (0, 1)")
    return NormalDist().inv_cdf(confidence)


def scaled_direction(x, n: int) -> Site:
    """The lattice site n*x; rejects directions that do not scale to Z^2."""
    zx, zy = Fraction(x[0]) * n, Fraction(x[1]) * n
    if zx.denominator != 1 or zy.denominator != 1:
        raise ValueError(f"n*x must have integer coordinates, got {x} at n={n}")
    return Site(int(zx), int(zy))


def _one_time(spec: EnvSpec, seed: int, target: Site, r: Restriction,
              margin_cap: int, exact: bool) -> float:
    field = WeightField(spec, seed)
    if exact:
        return exact_passage_time(field, ORIGIN, target, r, margin_cap=margin_cap).time
    l1 = abs(target.x) + abs(target.y)
    box = default_box(ORIGIN, target, max(math.ceil(l1 / 2), 16), r)
    return passage_time(field, ORIGIN, target, box, r).time


def _worker(args):
    return _one_time(*args)


def replication_times(spec: EnvSpec, target: Site, reps: int, seed: int,
                      r: Restriction = None, margin_cap: int = DEFAULT_MARGIN_CAP,
                      threads: int = 1, exact: bool = True) -> np.ndarray:
    """T(0, target) over reps independent fields, ordered by replication index."""
    if reps < 2:
        raise ValueError("need reps >= 2")
    jobs = [(spec, mix_seed(seed, i), target, r, margin_cap, exact) for i in range(reps)]
    if threads <= 1:
        values = [_one_time(*j) for j in jobs]
    else:
        chunk = max(1, reps // (threads * 4))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(_worker, jobs, chunksize=chunk))
    return np.asarray(values)


def summarize_times(values: np.ndarray, scale: float, n: int, confidence: float,
               certify: bool) -> Estimate:
    scaled = values / scale
    point = float(scaled.mean())
    stderr = float(scaled.std(ddof=1) / math.sqrt(len(scaled)))
    upper = point + z_quantile(confidence) * stderr if certify else None
    return Estimate(point, stderr, len(scaled), n, upper, confidence)


def radial_estimate(spec: EnvSpec, x, n: int, reps: int, seed: int, *,
                    confidence: float = 0.95, margin_cap: int = DEFAULT_MARGIN_CAP,
                    threads: int = 1, exact: bool = True) -> Estimate:
    """Sample mean and stderr of T(0, n x) / n over independent fields."""
    if n < 1:
        raise ValueError("need n >= 1")
    target = scaled_direction(x, n)
    values = replication_times(spec, target, reps, seed,
                               margin_cap=margin_cap, threads=threads, exact=exact)
    return summarize_times(values, float(n), n, confidence, certify=False)


def axis_constant(spec: EnvSpec, n: int, reps: int, seed: int,
                  confidence: float = 0.95, *, margin_cap: int = DEFAULT_MARGIN_CAP,
                  threads: int = 1, exact: bool = True) -> Estimate:
    """Estimate of T(0, n e2)/n with a certified upper confidence bound.

    E T(0, n e2) is subadditive in n, box truncation only increases passage
    times, and replications are exact, so point + z * stderr upper-bounds the
    axis time constant at the stated confidence.
    """
    target = Site(0, n)
    values = replication_times(spec, target, reps, seed,
                               margin_cap=margin_cap, threads=threads, exact=exact)
    return summarize_times(values, float(n), n, confidence, certify=True)


_AXIS_UNITS = {(1, 0), (-1, 0), (0, 1), (0, -1)}


def homogeneous_mu(F: Dist, x, n: int, reps: int, seed: int, *,
                   confidence: float = 0.95, margin_cap: int = DEFAULT_MARGIN_CAP,
                   threads: int = 1, exact: bool = True) -> Estimate:
    """Directional time-constant estimate for the homogeneous environment;
    certified upper bound on coordinate axes (translation invariance both ways)."""
    if n < 1:
        raise ValueError("need n >= 1")
    spec = Homogeneous(F)
    target = scaled_direction(x, n)
    values = replication_times(spec, target, reps, seed,
                               margin_cap=margin_cap, threads=threads, exact=exact)
    axis = (float(x[0]), float(x[1])) in {(float(a), float(b)) for a, b in _AXIS_UNITS}
    return summarize_times(values, float(n), n, confidence, certify=axis)


def directional_sweep(spec: EnvSpec, m: int, n: int, reps: int, seed: int, *,
                      confidence: float = 0.95, margin_cap: int = DEFAULT_MARGIN_CAP,
                      threads: int = 1, exact: bool = True):
    """Estimates of the radial limit along m evenly spaced angles, each via
    the nearest direction with denominator <= n. Returns [(unit dir, Estimate)]."""
    if m < 4:
        raise ValueError("need m >= 4 directions")
    out = []
    for j in range(m):
        theta = 2.0 * math.pi * j / m
        z = Site(round(n * math.cos(theta)), round(n * math.sin(theta)))
        norm = math.hypot(z.x, z.y)
        values = replication_times(spec, z, reps, mix_seed(seed, 10_000 + j),
                                   margin_cap=margin_cap, threads=threads, exact=exact)
        out.append(((z.x / norm, z.y / norm), summarize_times(values, norm, n, confidence, False)))
    return out
