"""Bowen dimension, component structure checks and truncation sweeps.

The dimension of the limit set is the infimum of {t >= 0 : P(t) < 0}.
Similarity systems expose the exact pressure ln rho(B(t)), so plain
bisection brackets the root to any tolerance; continued-fraction systems
bisect the rigorous pressure brackets instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import graph as g
from . import thermo
from .errors import InputError, NotApplicableError, UnsupportedAnalysisError
from .system import GdmsSystem, empty_limit_set

MORAN_EXACT = "moran-exact"
SPECTRAL_BISECTION = "spectral-bisection"
BRACKET_BISECTION = "bracket-bisection"
EMPTY_LIMIT_SET = "empty-limit-set"


@dataclass(frozen=True)
class DimensionEstimate:
    lo: float
    hi: float
    method: str
    iterations: int = 0
    flagged: bool = False
    warnings: tuple = ()

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo


FINITE_H_MEASURE = "FiniteHMeasure"
INFINITE_H_MEASURE = "InfiniteHMeasure"
NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class MeasureClassification:
    verdict: str
    dimension: DimensionEstimate
    maximal_components: tuple        # indices into the SCC report
    communicating_pairs: tuple       # ordered pairs of maximal-component indices
    evidence_n: tuple
    evidence_z: tuple
    growth_slope: float
    explanation: str


@dataclass(frozen=True)
class SweepEntry:
    size: int
    estimate: DimensionEstimate
    irreducible: bool


@dataclass(frozen=True)
class TruncationSweep:
    entries: tuple
    sup_lo: float
    final_interval: tuple
    monotone: bool
    warnings: tuple


@dataclass(frozen=True)
class ComponentDimensionReport:
    components: tuple           # frozensets of edge ids
    estimates: tuple            # DimensionEstimate per component
    overall: DimensionEstimate
    max_component: DimensionEstimate
    difference: float


def _bisect_decreasing(fn, lo, hi, tolerance, positive_at=None):
    """Bracket the sign change of a non-increasing function on [lo, hi].

    Maintains fn(lo) >= 0 >= is-negative side; `positive_at` chooses whether
    the kept invariant is fn(mid) >= 0 (default) or fn(mid) > 0.
    """
    strictly = positive_at == "strict"
    iterations = 0
    while hi - lo > tolerance and iterations < 200:
        mid = 0.5 * (lo + hi)
        value = fn(mid)
        keep_low = value > 0 if strictly else value >= 0
        if keep_low:
            lo = mid
        else:
            hi = mid
        iterations += 1
    return lo, hi, iterations


def _moran_root(ratios, tolerance):
    """Independent root of the Moran equation sum r_e^t = 1 on [0, 1]."""
    def fn(t):
        return math.fsum(r ** t for r in ratios) - 1.0
    lo, hi, _ = _bisect_decreasing(fn, 0.0, 1.0, tolerance)
    return 0.5 * (lo + hi)


def _is_full_shift(system):
    succ = system.successor_map
    ids = system.edge_ids
    return all(len(succ[e]) == len(ids) for e in ids)


def bowen_dimension(system: GdmsSystem, tolerance: float = 1e-10,
                    n_max: int = 14) -> DimensionEstimate:
    """Bracket HD(J) = inf{t : P(t) < 0} for a finite system."""
    if tolerance <= 0:
        raise InputError("tolerance must be positive")
    if system.infinite:
        raise NotApplicableError("truncate the system first")
    if empty_limit_set(system):
        return DimensionEstimate(0.0, 0.0, EMPTY_LIMIT_SET)

    if system.family.kind == "similarity":
        def pressure_at(t):
            return thermo.pressure(system, t).upper

        p1 = pressure_at(1.0)
        if p1 > 1e-12:
            raise UnsupportedAnalysisError(
                "P(1) > 0: total contraction exceeds the interval, the system "
                "cannot satisfy the open set condition")
        lo, hi, iters = _bisect_decreasing(pressure_at, 0.0, 1.0, tolerance)
        method = SPECTRAL_BISECTION
        if _is_full_shift(system):
            ratios = [system.family.map_for(e).ratio for e in system.edge_ids]
            moran = _moran_root(ratios, tolerance)
            if not (lo - tolerance <= moran <= hi + tolerance):
                raise InputError(
                    f"spectral bisection [{lo}, {hi}] disagrees with the Moran "
                    f"root {moran}")
            method = MORAN_EXACT
        return DimensionEstimate(lo, hi, method, iters)

    # continued-fraction truncation: bisect the pressure bracket signs
    cache = thermo.CfPartitionCache(system)
    report = g.scc_decompose(system)
    core = max(report.components, key=len)
    restriction_cache = thermo.CfPartitionCache(system.restrict(core))

    def bounds(t):
        est = thermo.pressure(system, t, n_max=n_max, cache=cache,
                              restriction_cache=restriction_cache)
        return est.lower, est.upper

    warnings = []
    flagged = False
    # smallest t with P_upper(t) < 0
    if bounds(0.0)[1] < 0:
        hi = 0.0
        iters_hi = 0
    elif bounds(1.0)[1] >= 0:
        hi, iters_hi, flagged = 1.0, 0, True
        warnings.append("upper pressure bound still nonnegative at t = 1")
    else:
        _, hi, iters_hi = _bisect_decreasing(lambda t: bounds(t)[1], 0.0, 1.0, tolerance)
    # largest t with P_lower(t) > 0
    if bounds(0.0)[0] <= 0:
        lo = 0.0
        iters_lo = 0
    elif bounds(1.0)[0] > 0:
        lo, iters_lo, flagged = 1.0, 0, True
        warnings.append("lower pressure bound still positive at t = 1")
    else:
        lo, _, iters_lo = _bisect_decreasing(lambda t: bounds(t)[0], 0.0, 1.0,
                                             tolerance, positive_at="strict")
    lo = min(lo, hi)
    return DimensionEstimate(lo, hi, BRACKET_BISECTION, iters_hi + iters_lo,
                             flagged, tuple(warnings))


def component_dimensions(system: GdmsSystem, tolerance: float = 1e-10) -> ComponentDimensionReport:
    """Per-component Bowen dimensions plus the whole-system value.

    The overall dimension must equal the maximum over strongly connected
    components (isolated edges only contribute a geometrically decaying tail).
    """
    report = g.scc_decompose(system)
    estimates = tuple(bowen_dimension(system.restrict(comp), tolerance)
                      for comp in report.components)
    overall = bowen_dimension(system, tolerance)
    if estimates:
        max_est = max(estimates, key=lambda e: e.mid)
    else:
        max_est = DimensionEstimate(0.0, 0.0, EMPTY_LIMIT_SET)
    difference = abs(overall.mid - max_est.mid)
    return ComponentDimensionReport(report.components, estimates, overall,
                                    max_est, difference)


def classify_hausdorff_measure(system: GdmsSystem, tolerance: float = 1e-9,
                               n_range=range(1, 31)) -> MeasureClassification:
    """Finite/infinite verdict for the h-dimensional Hausdorff measure.

    Maximal components are those whose dimension interval overlaps the
    whole-system interval (exact equality is a measure-zero event). The
    verdict is structural: the measure is infinite exactly when two distinct
    maximal components communicate. Z_n(h) evidence is attached but never
    overrides the structural verdict.
    """
    if system.infinite:
        raise NotApplicableError("truncate the system first")
    if empty_limit_set(system):
        return MeasureClassification(NOT_APPLICABLE,
                                     DimensionEstimate(0.0, 0.0, EMPTY_LIMIT_SET),
                                     (), (), (), (), 0.0,
                                     "empty limit set: no dimension to classify")
    report = g.scc_decompose(system)
    comp_report = component_dimensions(system, tolerance)
    overall = comp_report.overall
    maximal = tuple(
        i for i, est in enumerate(comp_report.estimates)
        if est.hi >= overall.lo - tolerance and est.lo <= overall.hi + tolerance)
    communicating = tuple(sorted(
        (i, j) for (i, j) in report.communication
        if i in maximal and j in maximal))
    verdict = INFINITE_H_MEASURE if communicating else FINITE_H_MEASURE
    if communicating:
        explanation = ("communicating maximal components => infinite h-measure "
                       "(crossing words pile up linearly in Z_n(h))")
    else:
        explanation = ("no two maximal components communicate => finite h-measure "
                       "(Z_n(h) stays bounded)")

    h = overall.mid
    ns = tuple(int(n) for n in n_range)
    zs = tuple(thermo.partition_sum(system, n, h).value for n in ns)
    slope = float(np.polyfit(ns, zs, 1)[0]) if len(ns) > 1 else 0.0
    return MeasureClassification(verdict, overall, maximal, communicating,
                                 ns, zs, slope, explanation)


def truncation_sweep(system: GdmsSystem, sizes, tolerance: float = 1e-3,
                     n_max: int = 14) -> TruncationSweep:
    """Dimensions of the finite heads {1..N} of an infinite system.

    For irreducible exhaustions the truncation dimensions increase towards
    sup{HD(J_F) : F finite}. The strictly-increasing-labels rule is accepted
    but flagged: all its truncations have empty limit sets, so the sup is 0
    even though the finiteness parameter is 1/2.
    """
    if not system.infinite:
        raise NotApplicableError("truncation sweeps apply to infinite systems")
    sizes = [int(s) for s in sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])) or not sizes:
        raise InputError("sizes must be strictly increasing")

    entries = []
    warnings = []
    for size in sizes:
        head = system.truncate(size)
        props = g.matrix_properties(head)
        est = bowen_dimension(head, tolerance, n_max=n_max)
        entries.append(SweepEntry(size, est, props.irreducible))
    sup_lo = max(e.estimate.lo for e in entries)
    monotone = all(entries[k].estimate.lo <= entries[k + 1].estimate.lo + 2 * tolerance
                   for k in range(len(entries) - 1))
    if system.incidence.kind == g.UPPER:
        theta = thermo.finiteness_parameters(system, [1]).theta
        warnings.append(
            f"sup over finite subsystems = {sup_lo:g} < theta = {float(theta):g}: "
            "the pressure-root dimension formula fails for this system "
            "(every finite truncation has an empty limit set)")
    return TruncationSweep(tuple(entries), sup_lo, (sup_lo, 1.0), monotone,
                           tuple(warnings))
