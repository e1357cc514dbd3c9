"""Random limit-set points and box-counting dimension cross-checks.

Words are drawn by uniform random successor choice, so point density is
biased relative to the conformal measure, but the support is not; the box
slope only sees the support.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NotApplicableError, ResourceGuardError
from .system import GdmsSystem, diameter_bound, empty_limit_set

RNG_NAME = "python-mt19937-per-point"
_SEED_MIX = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class SampleEntry:
    word: tuple
    interval: tuple
    midpoint: float


@dataclass(frozen=True)
class LimitPointSample:
    seed: int
    depth: int
    entries: tuple
    diameter_bound: float
    anchor: float
    rng_name: str = RNG_NAME

    @property
    def points(self):
        return [e.midpoint for e in self.entries]


@dataclass(frozen=True)
class BoxCount:
    scales: tuple
    counts: tuple
    slope: float
    residual: float


def sample_points(system: GdmsSystem, count: int, depth: int, seed: int,
                  max_retries: int = 100) -> LimitPointSample:
    """Draw `count` admissible words of length `depth`, reproducibly.

    Point k uses its own generator derived from (seed, k), so the output is
    independent of evaluation order. Midpoints of the terminal image
    intervals approximate coding-map values within the interval diameter.
    """
    if depth < 1:
        raise InputError("depth must be >= 1")
    if count < 1:
        raise InputError("count must be >= 1")
    if system.infinite:
        raise NotApplicableError("truncate the system first")
    if empty_limit_set(system):
        raise NotApplicableError("empty limit set: nothing to sample")

    ids = list(system.edge_ids)
    succ = system.successor_map
    entries = []
    for k in range(count):
        rng = random.Random(seed * _SEED_MIX + k)
        word = None
        for _ in range(max_retries):
            trial = [rng.choice(ids)]
            while len(trial) < depth:
                options = succ[trial[-1]]
                if not options:
                    break
                trial.append(rng.choice(options))
            if len(trial) == depth:
                word = tuple(trial)
                break
        if word is None:
            raise ResourceGuardError(
                f"point {k}: dead-end words exceeded {max_retries} retries")
        lo, hi = system.word_interval(word)
        entries.append(SampleEntry(word, (lo, hi), 0.5 * (lo + hi)))

    anchor = min(s.lo for s in system.spaces.values())
    return LimitPointSample(seed, depth, tuple(entries),
                            diameter_bound(system, depth), anchor)


def sample_from_points(points, anchor: float = 0.0,
                       error_bound: float = 0.0) -> LimitPointSample:
    """Wrap bare point values (e.g. re-read from CSV) for box counting."""
    entries = tuple(SampleEntry((), (p, p), float(p)) for p in points)
    return LimitPointSample(0, 0, entries, error_bound, anchor)


def box_dimension(sample: LimitPointSample, scales) -> BoxCount:
    """Occupied-box counts on a grid anchored at the vertex-space lower end,
    with the least-squares slope of log N against log(1/scale)."""
    points = np.asarray(sample.points, dtype=float)
    if points.size < 1000:
        raise InputError("box counting needs at least 1000 points")
    scales = [float(s) for s in scales]
    if any(s <= 0 for s in scales) or any(b >= a for a, b in zip(scales, scales[1:])):
        raise InputError("scales must be positive and strictly decreasing")
    floor = 10.0 * sample.diameter_bound
    if any(s < floor for s in scales):
        raise InputError(
            f"scales finer than 10x the sample position error ({floor:.3g}) "
            "would count noise")

    counts = []
    for eps in scales:
        boxes = np.unique(np.floor((points - sample.anchor) / eps))
        counts.append(int(boxes.size))
    xs = np.log([1.0 / s for s in scales])
    ys = np.log(counts)
    slope, intercept = np.polyfit(xs, ys, 1)
    residual = float(np.sqrt(np.mean((ys - (slope * xs + intercept)) ** 2)))
    return BoxCount(tuple(scales), tuple(counts), float(slope), residual)
