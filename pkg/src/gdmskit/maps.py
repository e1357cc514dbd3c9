"""Contraction families on real intervals.

Two families are supported: orientation-aware affine similarities, and the
continued-fraction Moebius maps x -> 1/(e + x) on [0, 1] with positive
integer labels. Continued-fraction compositions are evaluated through the
integer continuant recurrence q_k = a_k*q_{k-1} + q_{k-2}, which gives exact
derivative norms for short words; long words switch to a log-space float
recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, InputError

# Integer continuants are kept exact up to this word length.
EXACT_CONTINUANT_CAP = 30


@dataclass(frozen=True)
class VertexSpace:
    """A closed interval [lo, hi] attached to one vertex."""

    vertex: object
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InputError(f"vertex space {self.vertex!r}: need lo < hi")

    @property
    def diameter(self) -> float:
        return self.hi - self.lo

    def contains(self, x, slack=1e-12) -> bool:
        return self.lo - slack <= x <= self.hi + slack


@dataclass(frozen=True)
class SimilarityMap:
    """x -> sign * ratio * x + offset with ratio in (0, 1)."""

    ratio: float
    offset: float
    sign: int = 1

    def __post_init__(self):
        if not 0.0 < self.ratio < 1.0:
            raise InputError(f"similarity ratio must lie in (0,1), got {self.ratio}")
        if self.sign not in (-1, 1):
            raise InputError(f"similarity sign must be +1 or -1, got {self.sign}")

    def __call__(self, x: float) -> float:
        return self.sign * self.ratio * x + self.offset


@dataclass(frozen=True)
class DerivativeNorm:
    """sup-norm of a composed derivative, carried as a natural log."""

    word: tuple
    log_value: float
    exact: bool

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


@dataclass(frozen=True)
class SimilarityFamily:
    """A finite family of affine similarities keyed by edge id."""

    maps: dict = field(default_factory=dict)

    kind = "similarity"

    def map_for(self, edge_id) -> SimilarityMap:
        try:
            return self.maps[edge_id]
        except KeyError:
            raise InputError(f"unknown edge id {edge_id!r}") from None

    def one_step_log_norm(self, edge_id) -> float:
        return math.log(self.map_for(edge_id).ratio)

    def affine(self, word):
        """Coefficients (a, b) of the composed map phi_word(x) = a*x + b."""
        a, b = 1.0, 0.0
        for e in reversed(word):
            m = self.map_for(e)
            a, b = m.sign * m.ratio * a, m.sign * m.ratio * b + m.offset
        return a, b

    def apply(self, word, x: float) -> float:
        a, b = self.affine(word)
        return a * x + b

    def interval_image(self, word, space: VertexSpace):
        a, b = self.affine(word)
        u, v = a * space.lo + b, a * space.hi + b
        return (u, v) if u <= v else (v, u)


def _check_cf_label(edge_id):
    if not isinstance(edge_id, int) or edge_id < 1:
        raise InputError(f"continued-fraction labels are positive integers, got {edge_id!r}")


def cf_continuants(word):
    """Exact continuants (p_n, p_{n-1}, q_n, q_{n-1}) for the composed map.

    phi_word(x) = (p_n + p_{n-1} * x) / (q_n + q_{n-1} * x).
    """
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for a in word:
        _check_cf_label(a)
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return p, p_prev, q, q_prev


def cf_log_continuants(word):
    """Log-space (ln q_n, ln q_{n-1}) recurrence for long words."""
    lq_prev, lq = -math.inf, 0.0
    for a in word:
        _check_cf_label(a)
        hi = math.log(a) + lq
        # logaddexp(hi, lq_prev) without numpy
        if lq_prev == -math.inf:
            nxt = hi
        else:
            m = max(hi, lq_prev)
            nxt = m + math.log(math.exp(hi - m) + math.exp(lq_prev - m))
        lq_prev, lq = lq, nxt
    return lq, lq_prev


@dataclass(frozen=True)
class MoebiusCfFamily:
    """The continued-fraction maps phi_e(x) = 1/(e + x) on [0, 1]."""

    kind = "cf"

    def one_step_log_norm(self, edge_id) -> float:
        _check_cf_label(edge_id)
        return -2.0 * math.log(edge_id)

    def apply(self, word, x: float) -> float:
        p, p_prev, q, q_prev = cf_continuants(word)
        return (p + p_prev * x) / (q + q_prev * x)

    def interval_image(self, word, space: VertexSpace):
        u, v = self.apply(word, space.lo), self.apply(word, space.hi)
        return (u, v) if u <= v else (v, u)


def evaluate(family, word, x, space: VertexSpace | None = None) -> float:
    """Evaluate the composed contraction phi_word at x.

    `space` is the vertex space of the terminal vertex; when given, x must
    lie inside it.
    """
    if not word:
        raise InputError("word must have length >= 1")
    if space is not None and not space.contains(x):
        raise DomainError(f"point {x} outside vertex space [{space.lo}, {space.hi}]")
    return family.apply(tuple(word), x)


def derivative_norm(family, word) -> DerivativeNorm:
    """sup over the domain of |phi_word'|.

    Exact for similarities (constant derivative) and for continued-fraction
    words up to EXACT_CONTINUANT_CAP letters (sup = 1/q_n^2 at x = 0).
    """
    word = tuple(word)
    if not word:
        raise InputError("word must have length >= 1")
    if family.kind == "similarity":
        log_value = sum(family.one_step_log_norm(e) for e in word)
        return DerivativeNorm(word, log_value, True)
    if len(word) <= EXACT_CONTINUANT_CAP:
        _, _, q, _ = cf_continuants(word)
        return DerivativeNorm(word, -2.0 * math.log(q), True)
    lq, _ = cf_log_continuants(word)
    return DerivativeNorm(word, -2.0 * lq, False)


def distortion_constant(family) -> float:
    """Uniform bound K on sup|phi_word'| / inf|phi_word'| over all words.

    Similarities have constant derivatives (K = 1). For continued-fraction
    words the ratio is ((q_n + q_{n-1}) / q_n)^2 <= 4 since q_{n-1} <= q_n.
    """
    return 1.0 if family.kind == "similarity" else 4.0
