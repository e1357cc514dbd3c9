import random

import pytest

import gdmskit as gk
from gdmskit import graph as gg
from gdmskit import maps as gm
from gdmskit import system as gs


def intra_full(ids):
    return {(a, b) for a in ids for b in ids}


def two_component_system(r1=1 / 3, r2=1 / 4, linked=False):
    """Two 2-edge Cantor blocks on one vertex; optional crossing pair (b, c)."""
    allowed = intra_full(["a", "b"]) | intra_full(["c", "d"])
    if linked:
        allowed.add(("b", "c"))
    space = gm.VertexSpace("v", 0.0, 1.0)
    edges = [
        ("a", "v", "v", gm.SimilarityMap(r1, 0.0)),
        ("b", "v", "v", gm.SimilarityMap(r1, 1.0 - r1)),
        ("c", "v", "v", gm.SimilarityMap(r2, 0.0)),
        ("d", "v", "v", gm.SimilarityMap(r2, 1.0 - r2)),
    ]
    return gs.similarity_system("two-component", ("v",), {"v": space}, edges,
                                gg.IncidenceSpec(gg.EXPLICIT, allowed=frozenset(allowed)))


def feeder_system():
    """One full 2-edge component plus two isolated edges chaining into it."""
    allowed = intra_full(["a", "b"]) | {("x1", "x2"), ("x2", "a")}
    space = gm.VertexSpace("v", 0.0, 1.0)
    edges = [
        ("a", "v", "v", gm.SimilarityMap(1 / 3, 0.0)),
        ("b", "v", "v", gm.SimilarityMap(1 / 3, 2 / 3)),
        ("x1", "v", "v", gm.SimilarityMap(1 / 2, 0.0)),
        ("x2", "v", "v", gm.SimilarityMap(1 / 2, 1 / 2)),
    ]
    return gs.similarity_system("feeder", ("v",), {"v": space}, edges,
                                gg.IncidenceSpec(gg.EXPLICIT, allowed=frozenset(allowed)))


def random_packed_system(rng, max_edges=6):
    """Random explicit-incidence similarity system with disjoint level-1 images."""
    n_vertices = rng.randint(1, 3)
    vertices = tuple(f"v{k}" for k in range(n_vertices))
    spaces = {v: gm.VertexSpace(v, 0.0, 1.0) for v in vertices}
    n_edges = rng.randint(2, max_edges)
    raw = [(f"e{k}", rng.choice(vertices), rng.choice(vertices))
           for k in range(n_edges)]
    edges = []
    cursor = {v: 0.0 for v in vertices}
    for eid, src, dst in raw:
        room = 1.0 - cursor[src]
        ratio = rng.uniform(0.15, 0.8) * room
        if ratio < 1e-3:
            continue
        edges.append((eid, src, dst, gm.SimilarityMap(ratio, cursor[src])))
        cursor[src] += ratio
    if len(edges) < 2:
        return None
    ids = [e[0] for e in edges]
    by_id = {e[0]: e for e in edges}
    compatible = [(a, b) for a in ids for b in ids
                  if by_id[a][2] == by_id[b][1]]
    allowed = {pair for pair in compatible if rng.random() < 0.7}
    if not allowed:
        return None
    return gs.similarity_system("random", vertices, spaces, edges,
                                gg.IncidenceSpec(gg.EXPLICIT, allowed=frozenset(allowed)))


def random_graph_complete_system(rng, max_edges=6):
    """Random multigraph system whose incidence is the full compatibility
    matrix (b may follow a exactly when t(a) = i(b)); retried until the edge
    graph is strongly connected."""
    n_vertices = rng.randint(1, 3)
    vertices = tuple(f"v{k}" for k in range(n_vertices))
    spaces = {v: gm.VertexSpace(v, 0.0, 1.0) for v in vertices}
    n_edges = rng.randint(max(2, n_vertices), max_edges)
    edges = []
    cursor = {v: 0.0 for v in vertices}
    for k in range(n_edges):
        src = rng.choice(vertices)
        dst = rng.choice(vertices)
        room = 1.0 - cursor[src]
        ratio = rng.uniform(0.15, 0.7) * room
        if ratio < 1e-3:
            continue
        edges.append((f"e{k}", src, dst, gm.SimilarityMap(ratio, cursor[src])))
        cursor[src] += ratio
    if len(edges) < 2:
        return None
    sys = gs.similarity_system("random-gc", vertices, spaces, edges,
                               gg.IncidenceSpec(gg.FULL))
    if not gk.matrix_properties(sys).irreducible:
        return None
    return sys


@pytest.fixture
def rng():
    return random.Random(20260826)
