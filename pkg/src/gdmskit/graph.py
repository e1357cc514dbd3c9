"""Directed multigraph, incidence rules, admissible words and SCC structure.

The reachability analysis runs on the edge graph: its nodes are the edges of
the multigraph and there is an arrow a -> b whenever the incidence matrix
allows b to follow a.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

from .errors import InputError, NotApplicableError, ResourceGuardError

DEFAULT_COUNT_GUARD = 10_000_000
COUNT_GUARD_ENV = "GDMS_COUNT_GUARD"


def count_guard() -> int:
    raw = os.environ.get(COUNT_GUARD_ENV)
    if raw is None:
        return DEFAULT_COUNT_GUARD
    try:
        value = int(raw)
        if value <= 0:
            raise ValueError
    except ValueError:
        raise InputError(f"{COUNT_GUARD_ENV} must be a positive integer, got {raw!r}") from None
    return value


@dataclass(frozen=True)
class Edge:
    id: object
    src: object
    dst: object


@dataclass(frozen=True)
class MultiGraph:
    vertices: tuple
    edges: tuple  # tuple[Edge]

    def __post_init__(self):
        vset = set(self.vertices)
        seen = set()
        for e in self.edges:
            if e.src not in vset or e.dst not in vset:
                raise InputError(f"edge {e.id!r} references unknown vertex")
            if e.id in seen:
                raise InputError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)


FULL = "full"
BANDED = "banded"
UPPER = "upper"
EXPLICIT = "explicit"


@dataclass(frozen=True)
class IncidenceSpec:
    """Explicit 0/1 matrix over edge ids, or one of three named rules."""

    kind: str
    width: int = 0
    allowed: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.kind not in (FULL, BANDED, UPPER, EXPLICIT):
            raise InputError(f"unknown incidence kind {self.kind!r}")
        if self.kind == BANDED and self.width < 1:
            raise InputError("banded incidence needs width >= 1")

    def allows_labels(self, a, b) -> bool:
        """Rule check on raw labels; explicit matrices use the stored pairs."""
        if self.kind == FULL:
            return True
        if self.kind == BANDED:
            return abs(a - b) <= self.width
        if self.kind == UPPER:
            return a < b
        return (a, b) in self.allowed


def edge_allows(incidence: IncidenceSpec, a: Edge, b: Edge) -> bool:
    """True when b may follow a. Composition also needs t(a) = i(b)."""
    if a.dst != b.src:
        return False
    if incidence.kind == EXPLICIT:
        return (a.id, b.id) in incidence.allowed
    if incidence.kind == FULL:
        return True
    return incidence.allows_labels(a.id, b.id)


def is_admissible(system, word) -> bool:
    """True iff every consecutive pair of the word is allowed by A."""
    word = tuple(word)
    if not word:
        raise InputError("word must have length >= 1")
    if system.infinite:
        for e in word:
            if not isinstance(e, int) or e < 1:
                raise InputError(f"unknown edge id {e!r}")
        return all(system.incidence.allows_labels(a, b) for a, b in zip(word, word[1:]))
    by_id = system.edges_by_id
    for e in word:
        if e not in by_id:
            raise InputError(f"unknown edge id {e!r}")
    return all(edge_allows(system.incidence, by_id[a], by_id[b]) for a, b in zip(word, word[1:]))


def enumerate_words(system, n: int, limit: int | None = None):
    """Yield the admissible length-n words in lexicographic edge-list order.

    Dead prefixes are pruned depth-first. Raises ResourceGuardError once the
    stream exceeds `limit` (default: the global count guard).
    """
    if n < 1:
        raise InputError("word length must be >= 1")
    _require_finite(system)
    bound = count_guard() if limit is None else limit
    succ = system.successor_map
    ids = system.edge_ids
    emitted = 0

    def extend(prefix):
        nonlocal emitted
        if len(prefix) == n:
            emitted += 1
            if emitted > bound:
                raise ResourceGuardError(f"enumeration exceeded count guard of {bound}")
            yield tuple(prefix)
            return
        for nxt in succ[prefix[-1]]:
            prefix.append(nxt)
            yield from extend(prefix)
            prefix.pop()

    for first in ids:
        yield from extend([first])


@dataclass(frozen=True)
class SccReport:
    components: tuple        # tuple of frozensets of edge ids
    condensation: frozenset  # ordered pairs of component indices
    isolated: frozenset      # edge ids in no strongly connected component
    communication: frozenset  # ordered pairs of component indices


def _require_finite(system):
    if system.infinite:
        raise NotApplicableError("analysis needs a finite edge set; truncate the system first")


def tarjan_scc(nodes, succ):
    """Iterative Tarjan; returns SCCs in reverse topological order."""
    index, low = {}, {}
    onstack, stack, sccs = set(), [], []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack.add(root)
        work = [(root, iter(succ[root]))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    onstack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in onstack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def scc_decompose(system) -> SccReport:
    """Strongly connected structure of the edge graph.

    An edge belongs to a component only if some admissible cycle passes
    through it; a singleton {e} counts only when e may follow itself.
    Everything else lands in the isolated set.
    """
    _require_finite(system)
    ids = system.edge_ids
    succ = system.successor_map
    order = {e: k for k, e in enumerate(ids)}
    sccs = tarjan_scc(ids, succ)

    nontrivial = []
    for comp in sccs:
        if len(comp) > 1 or comp[0] in succ[comp[0]]:
            nontrivial.append(frozenset(comp))
    nontrivial.sort(key=lambda c: min(order[e] for e in c))
    comp_index = {}
    for k, comp in enumerate(nontrivial):
        for e in comp:
            comp_index[e] = k
    isolated = frozenset(e for e in ids if e not in comp_index)

    # Reachability over edges, collapsed to component pairs.
    reach = {e: set() for e in ids}
    for e in reversed(list(topo_order(ids, succ))):
        acc = set()
        for w in succ[e]:
            acc.add(w)
            acc |= reach[w]
        reach[e] = acc

    communication = set()
    condensation = set()
    for i, ci in enumerate(nontrivial):
        targets = set()
        for e in ci:
            targets |= reach[e]
        for j, cj in enumerate(nontrivial):
            if i != j and targets & cj:
                communication.add((i, j))
        # condensation arc: reachable directly or through isolated edges only
        frontier = set()
        for e in ci:
            frontier |= set(succ[e])
        seen = set()
        while frontier:
            w = frontier.pop()
            if w in seen:
                continue
            seen.add(w)
            j = comp_index.get(w)
            if j is None:
                frontier |= set(succ[w])
            elif j != i:
                condensation.add((i, j))
    return SccReport(tuple(nontrivial), frozenset(condensation), isolated, frozenset(communication))


def topo_order(nodes, succ):
    """DFS postorder; safe on cyclic graphs (used only for reachability)."""
    seen = set()
    post = []
    for root in nodes:
        if root in seen:
            continue
        stack = [(root, iter(succ[root]))]
        seen.add(root)
        while stack:
            v, it = stack[-1]
            pushed = False
            for w in it:
                if w not in seen:
                    seen.add(w)
                    stack.append((w, iter(succ[w])))
                    pushed = True
                    break
            if not pushed:
                post.append(v)
                stack.pop()
    return reversed(post)


@dataclass(frozen=True)
class MatrixProperties:
    irreducible: bool
    primitive: bool
    finitely_irreducible: bool
    witness: tuple | None  # connecting word set H, or None
    justification: dict


_RULE_VERDICTS = {
    FULL: (True, True, True,
           "every entry is 1, so any edge follows any edge"),
    BANDED: (True, False, False,
             "labels walk the band one step at a time, so any two labels are "
             "joined, but no finite word set connects arbitrarily distant labels"),
    UPPER: (False, False, False,
            "labels must strictly increase, so no label is ever revisited"),
}


def matrix_properties(system) -> MatrixProperties:
    """Irreducibility, primitivity and finite irreducibility.

    Finite explicit matrices are analysed directly; for a finite edge set,
    finitely irreducible coincides with irreducible (take one connecting word
    per ordered edge pair as the witness H). Named infinite rules get
    closed-form verdicts: truncation would change the answers.
    """
    if system.infinite:
        irr, prim, fin, why = _RULE_VERDICTS[system.incidence.kind]
        just = {"irreducible": why, "primitive": why, "finitely_irreducible": why}
        return MatrixProperties(irr, prim, fin, None, just)

    ids = system.edge_ids
    succ = system.successor_map
    sccs = tarjan_scc(ids, succ)
    irreducible = len(sccs) == 1 and (len(ids) > 1 or ids[0] in succ[ids[0]])
    if not irreducible:
        just = {"irreducible": "the edge graph is not strongly connected"}
        just["primitive"] = just["irreducible"]
        just["finitely_irreducible"] = just["irreducible"]
        return MatrixProperties(False, False, False, None, just)

    period = _graph_period(ids, succ)
    primitive = period == 1
    witness = _connecting_words(ids, succ, system)
    just = {
        "irreducible": "the edge graph is strongly connected",
        "primitive": (f"gcd of cycle lengths is {period}"
                      + ("" if primitive else ", so powers of A stay patterned")),
        "finitely_irreducible": "finite edge set: one connecting word per ordered pair",
    }
    return MatrixProperties(True, primitive, True, witness, just)


def _graph_period(ids, succ):
    """gcd of cycle lengths of a strongly connected graph."""
    root = ids[0]
    level = {root: 0}
    queue = [root]
    while queue:
        v = queue.pop(0)
        for w in succ[v]:
            if w not in level:
                level[w] = level[v] + 1
                queue.append(w)
    g = 0
    for v in ids:
        for w in succ[v]:
            g = math.gcd(g, level[v] + 1 - level[w])
    return abs(g) if g else 1


def _connecting_words(ids, succ, system):
    """Shortest word w per ordered edge pair (i, j) with i w j admissible."""
    words = set()
    for i in ids:
        # BFS over successors, tracking the connecting word (without endpoints)
        parents = {w: (i, None) for w in succ[i]}
        queue = list(succ[i])
        reached = dict(parents)
        while queue:
            v = queue.pop(0)
            for w in succ[v]:
                if w not in reached:
                    reached[w] = (v, None)
                    queue.append(w)
        for j in ids:
            if j in succ[i]:
                continue  # empty connecting word
            if j not in reached:
                return None
            path = []
            v = reached[j][0]
            while v != i:
                path.append(v)
                v = reached[v][0]
            words.add(tuple(reversed(path)))
    return tuple(sorted(words))
