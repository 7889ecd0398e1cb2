"""Truncated Cayley 2-complexes with exact sparse boundary maps.

A ball is built by BFS from the identity through generator moves on
normal forms, so BFS depth equals graph distance.  Cells are relator
loops based at ball vertices, kept only when the whole loop stays
inside the ball; the resulting column of the 2-boundary records signed
edge traversals.  Vertex, edge and cell indices are stable under radius
growth: enlarging the ball only appends.
"""

from __future__ import annotations

import hashlib
import json
import os
from collections import deque
from dataclasses import dataclass, field

from .errors import IncompleteSystemError, ResourceLimitError
from .presentation import GroupPresentation, Word, parse_word, word_to_text
from .rationals import Q
from .rewriting import RewritingSystem, normal_form

DEFAULT_VERTEX_CAP = 200_000
DEFAULT_WALK_CAP = 1_000_000


@dataclass(frozen=True)
class Chain:
    """Sparse exact-rational vector over cells of one dimension."""

    dimension: int
    entries: dict

    def __post_init__(self):
        clean = {i: Q(c) for i, c in self.entries.items() if c != 0}
        object.__setattr__(self, "entries", clean)

    def l1(self):
        total = Q(0)
        for c in self.entries.values():
            total += c if c > 0 else -c
        return total

    def scaled(self, r) -> "Chain":
        r = Q(r)
        return Chain(self.dimension, {i: r * c for i, c in self.entries.items()})

    def __neg__(self) -> "Chain":
        return Chain(self.dimension, {i: -c for i, c in self.entries.items()})

    def __add__(self, other: "Chain") -> "Chain":
        if self.dimension != other.dimension:
            raise ValueError("dimension mismatch")
        merged = dict(self.entries)
        for i, c in other.entries.items():
            merged[i] = merged.get(i, Q(0)) + c
        return Chain(self.dimension, merged)

    def is_zero(self) -> bool:
        return not self.entries

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.entries.values())

    def support(self):
        return sorted(self.entries)


@dataclass
class CayleyBall:
    """Truncated Cayley graph: vertex 0 is the identity."""

    radius: int
    vertices: list            # normal-form words
    depth: list               # BFS depth per vertex
    edges: list               # (source, generator, target) triples
    index: dict               # word -> vertex id
    neighbors: list           # per vertex: {signed letter: vertex id}
    edge_index: dict = field(default=None)

    def __post_init__(self):
        if self.edge_index is None:
            self.edge_index = {(s, g): i for i, (s, g, _) in enumerate(self.edges)}

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def d1_column(self, edge_id: int) -> dict:
        s, _, t = self.edges[edge_id]
        return {} if s == t else {t: 1, s: -1}

    def adjacency(self):
        """Per-vertex incident edge list: (edge id, sign, other endpoint)."""
        adj = [[] for _ in self.vertices]
        for e, (s, _, t) in enumerate(self.edges):
            adj[s].append((e, 1, t))
            adj[t].append((e, -1, s))
        for lst in adj:
            lst.sort()
        return adj


def build_ball(presentation: GroupPresentation, rws: RewritingSystem,
               radius: int, *, vertex_cap: int = DEFAULT_VERTEX_CAP) -> CayleyBall:
    """BFS ball of the given radius around the identity.

    Requires a confluent rewriting system; aborts with a resource error
    if the vertex cap is exceeded.
    """
    if not rws.confluent:
        raise IncompleteSystemError("ball construction requires a confluent system")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    ngens = presentation.num_generators
    letters = [g for g in range(1, ngens + 1)] + [-g for g in range(1, ngens + 1)]

    root: Word = ()
    vertices = [root]
    depth = [0]
    index = {root: 0}
    neighbors = [dict()]
    queue = deque([0])
    while queue:
        v = queue.popleft()
        if depth[v] >= radius:
            continue
        word = vertices[v]
        for x in letters:
            target = normal_form(word + (x,), rws)
            t = index.get(target)
            if t is None:
                t = len(vertices)
                if t >= vertex_cap:
                    raise ResourceLimitError(
                        f"ball exceeds vertex cap {vertex_cap}", limit=vertex_cap)
                vertices.append(target)
                depth.append(depth[v] + 1)
                index[target] = t
                neighbors.append(dict())
                queue.append(t)
            neighbors[v][x] = t
            neighbors[t][-x] = v

    # Boundary-layer vertices were never expanded; fill in their in-ball
    # neighbors so edges between two depth-R vertices are found.
    for v in range(len(vertices)):
        if depth[v] == radius and radius > 0:
            word = vertices[v]
            for x in letters:
                if x in neighbors[v]:
                    continue
                t = index.get(normal_form(word + (x,), rws))
                if t is not None:
                    neighbors[v][x] = t
                    neighbors[t][-x] = v

    raw_edges = []
    for v in range(len(vertices)):
        for g in range(1, ngens + 1):
            t = neighbors[v].get(g)
            if t is not None:
                raw_edges.append((max(depth[v], depth[t]), v, g, t))
    raw_edges.sort()
    edges = [(v, g, t) for _, v, g, t in raw_edges]
    return CayleyBall(radius, vertices, depth, edges, index, neighbors)


@dataclass
class TwoComplex:
    """Ball plus attached 2-cells and their exact boundary columns."""

    ball: CayleyBall
    presentation: GroupPresentation
    cells: list               # (base vertex, relator index) representatives
    d2: list                  # per cell: {edge id: int coefficient}

    @property
    def num_cells(self) -> int:
        return len(self.cells)

    def d2_column(self, cell_id: int) -> dict:
        return self.d2[cell_id]

    def apply_d2(self, chain: Chain) -> Chain:
        if chain.dimension != 2:
            raise ValueError("apply_d2 expects a 2-chain")
        out: dict = {}
        for cell, coeff in chain.entries.items():
            for e, inc in self.d2[cell].items():
                out[e] = out.get(e, Q(0)) + coeff * inc
        return Chain(1, out)

    def apply_d1(self, chain: Chain) -> Chain:
        if chain.dimension != 1:
            raise ValueError("apply_d1 expects a 1-chain")
        out: dict = {}
        for e, coeff in chain.entries.items():
            for v, inc in self.ball.d1_column(e).items():
                out[v] = out.get(v, Q(0)) + coeff * inc
        return Chain(0, out)


def _trace_relator(ball: CayleyBall, base: int, relator) -> dict | None:
    """Signed edge traversals of the relator loop at base, or None if
    the loop leaves the ball."""
    coeffs: dict = {}
    cur = base
    for x in relator:
        nxt = ball.neighbors[cur].get(x)
        if nxt is None:
            return None
        if x > 0:
            e = ball.edge_index[(cur, x)]
            coeffs[e] = coeffs.get(e, 0) + 1
        else:
            e = ball.edge_index[(nxt, -x)]
            coeffs[e] = coeffs.get(e, 0) - 1
        cur = nxt
    if cur != base:
        raise IncompleteSystemError(
            "relator loop does not close under this rewriting system; "
            "the rules and the relators disagree about the group")
    return {e: c for e, c in coeffs.items() if c}


def _sign_canonical(col: dict):
    items = tuple(sorted(col.items()))
    if items and items[0][1] < 0:
        items = tuple((e, -c) for e, c in items)
    return items


def attach_cells(ball: CayleyBall, presentation: GroupPresentation) -> TwoComplex:
    """One candidate cell per (vertex, relator); kept iff the loop stays
    in the ball; zero columns dropped; sign-duplicate columns merged."""
    candidates = []
    for v in range(ball.num_vertices):
        for ri, rel in enumerate(presentation.relators):
            col = _trace_relator(ball, v, rel)
            if not col:
                continue
            layer = max(max(ball.depth[ball.edges[e][0]],
                            ball.depth[ball.edges[e][2]]) for e in col)
            candidates.append((layer, v, ri, col))
    candidates.sort(key=lambda c: c[:3])
    cells, columns, seen = [], [], set()
    for _, v, ri, col in candidates:
        key = _sign_canonical(col)
        if key in seen:
            continue
        seen.add(key)
        cells.append((v, ri))
        columns.append(col)
    return TwoComplex(ball, presentation, cells, columns)


def boundary_matrices(complex_: TwoComplex):
    """Sparse boundary maps as column dictionaries: (d1, d2)."""
    d1 = [complex_.ball.d1_column(e) for e in range(complex_.ball.num_edges)]
    return d1, list(complex_.d2)


def d1_composed_with_d2_is_zero(complex_: TwoComplex) -> bool:
    for col in complex_.d2:
        acc: dict = {}
        for e, c in col.items():
            for v, inc in complex_.ball.d1_column(e).items():
                acc[v] = acc.get(v, 0) + c * inc
        if any(acc.values()):
            return False
    return True


@dataclass(frozen=True)
class Circuit:
    """Simple circuit through the identity as a signed edge chain."""

    chain: Chain
    letters: Word
    length: int


def enumerate_circuits(ball: CayleyBall, max_len: int,
                       *, walk_cap: int = DEFAULT_WALK_CAP) -> list:
    """All simple circuits based at the identity of length <= max_len,
    deduplicated up to orientation reversal, in a deterministic order."""
    if max_len < 3:
        raise ValueError("max_len must be at least 3")
    adj = ball.adjacency()
    depth = ball.depth
    results = {}
    steps = 0

    path_edges: list = []
    on_path = {0}

    def letters_of(edge_steps):
        out = []
        for e, sign in edge_steps:
            g = ball.edges[e][1]
            out.append(g if sign > 0 else -g)
        return tuple(out)

    def record():
        coeffs: dict = {}
        for e, sign in path_edges:
            coeffs[e] = coeffs.get(e, 0) + sign
        chain = Chain(1, coeffs)
        if chain.is_zero():
            return
        key = _sign_canonical({e: int(c) for e, c in chain.entries.items()})
        if key not in results:
            results[key] = Circuit(chain, letters_of(path_edges), len(path_edges))

    def dfs(v: int):
        nonlocal steps
        for e, sign, w in adj[v]:
            steps += 1
            if steps > walk_cap:
                raise ResourceLimitError(
                    f"circuit search exceeded walk cap {walk_cap}", limit=walk_cap)
            used = len(path_edges) + 1
            if w == 0:
                if used >= 3:
                    path_edges.append((e, sign))
                    record()
                    path_edges.pop()
                continue
            if w in on_path or used + depth[w] > max_len:
                continue
            on_path.add(w)
            path_edges.append((e, sign))
            dfs(w)
            path_edges.pop()
            on_path.remove(w)

    dfs(0)
    circuits = list(results.values())
    circuits.sort(key=lambda c: (c.length, c.letters))
    return circuits


def complex_to_json(complex_: TwoComplex) -> str:
    ball = complex_.ball
    gens = complex_.presentation.generators
    d1_coords = []
    for e in range(ball.num_edges):
        for v, c in sorted(ball.d1_column(e).items()):
            d1_coords.append([v, e, c, 1])
    d2_coords = []
    for ci, col in enumerate(complex_.d2):
        for e, c in sorted(col.items()):
            d2_coords.append([e, ci, c, 1])
    payload = {
        "radius": ball.radius,
        "generators": list(gens),
        "vertices": [word_to_text(w, gens) for w in ball.vertices],
        "depth": list(ball.depth),
        "edges": [list(e) for e in ball.edges],
        "cells": [list(c) for c in complex_.cells],
        "d1": d1_coords,
        "d2": d2_coords,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def complex_from_json(text: str, presentation: GroupPresentation) -> TwoComplex:
    data = json.loads(text)
    gens = presentation.generators
    if list(data["generators"]) != list(gens):
        raise ValueError("cached complex belongs to a different presentation")
    vertices = [parse_word(s, gens) for s in data["vertices"]]
    depth = list(data["depth"])
    edges = [tuple(e) for e in data["edges"]]
    index = {w: i for i, w in enumerate(vertices)}
    neighbors = [dict() for _ in vertices]
    for s, g, t in edges:
        neighbors[s][g] = t
        neighbors[t][-g] = s
    ball = CayleyBall(data["radius"], vertices, depth, edges, index, neighbors)
    cells = [tuple(c) for c in data["cells"]]
    d2 = [dict() for _ in cells]
    for e, ci, num, den in data["d2"]:
        if den != 1:
            raise ValueError("boundary coefficients must be integral")
        d2[ci][e] = num
    return TwoComplex(ball, presentation, cells, d2)


_MEMO: dict = {}


def _cache_key(presentation: GroupPresentation, rws: RewritingSystem, radius: int) -> str:
    digest = hashlib.sha256(
        (presentation.content_key() + "\n" + rws.rules_key()).encode()).hexdigest()[:16]
    return f"{digest}_r{radius}"


def get_complex(presentation: GroupPresentation, rws: RewritingSystem, radius: int,
                *, vertex_cap: int = DEFAULT_VERTEX_CAP,
                cache_dir: str | None = None) -> TwoComplex:
    """Build (or fetch) the truncated complex at the given radius.

    In-process memoization always applies; if ``cache_dir`` (or the
    FILLPROBE_CACHE_DIR environment variable) is set, complexes are also
    persisted as coordinate-form JSON.
    """
    key = _cache_key(presentation, rws, radius)
    complex_ = _MEMO.get(key)
    if complex_ is None:
        cache_dir = cache_dir or os.environ.get("FILLPROBE_CACHE_DIR")
        path = os.path.join(cache_dir, key + ".json") if cache_dir else None
        if path and os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                complex_ = complex_from_json(fh.read(), presentation)
        else:
            ball = build_ball(presentation, rws, radius, vertex_cap=vertex_cap)
            complex_ = attach_cells(ball, presentation)
            if path:
                os.makedirs(cache_dir, exist_ok=True)
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(complex_to_json(complex_))
        _MEMO[key] = complex_
    # cached copies must still honor the caller's cap, or results would
    # depend on what happened to be built earlier in the process
    if complex_.ball.num_vertices > vertex_cap:
        raise ResourceLimitError(
            f"ball exceeds vertex cap {vertex_cap}", limit=vertex_cap)
    return complex_


def clear_memo():
    _MEMO.clear()


def word_to_edge_chain(ball: CayleyBall, word) -> Chain:
    """Signed edge chain of the walk spelled by ``word`` from the identity.

    Every prefix of the walk must stay inside the ball.
    """
    coeffs: dict = {}
    cur = 0
    for x in word:
        nxt = ball.neighbors[cur].get(x)
        if nxt is None:
            raise ResourceLimitError("walk leaves the ball; enlarge the radius")
        if x > 0:
            e = ball.edge_index[(cur, x)]
            coeffs[e] = coeffs.get(e, 0) + 1
        else:
            e = ball.edge_index[(nxt, -x)]
            coeffs[e] = coeffs.get(e, 0) - 1
        cur = nxt
    return Chain(1, {e: Q(c) for e, c in coeffs.items()})
