"""Exact desk-scale hypergraph oracles: max independent set, 2-coloring,
and almost-2-coloring, over vertex weights kept as exact rationals."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

DEFAULT_NODE_BUDGET = 10**7
ALMOST_ENUM_CAP = 10**6


@dataclass(frozen=True)
class GenericHypergraph:
    """k-uniform hypergraph with positive rational vertex weights."""

    k: int
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, ...], ...]
    weights: dict[int, Fraction] = field(default_factory=dict)
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        norm_edges = []
        for e in self.edges:
            te = tuple(sorted(e))
            if len(set(te)) != self.k:
                raise ValueError(f"edge {e} does not have exactly {self.k} distinct vertices")
            if any(v not in vset for v in te):
                raise ValueError(f"edge {e} mentions an unknown vertex")
            norm_edges.append(te)
        object.__setattr__(self, "edges", tuple(norm_edges))
        weights = {v: Fraction(w) for v, w in self.weights.items()}
        for v in self.vertices:
            weights.setdefault(v, Fraction(1))
        if any(w <= 0 for w in weights.values()):
            raise ValueError("vertex weights must be positive")
        object.__setattr__(self, "weights", weights)

    @property
    def total_weight(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def weight_of(self, vertex_set) -> Fraction:
        return sum((self.weights[v] for v in vertex_set), Fraction(0))

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "vertices": [
                {"id": v, "weight": [self.weights[v].numerator, self.weights[v].denominator]}
                for v in self.vertices
            ],
            "edges": [list(e) for e in self.edges],
            "meta": self.meta,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "GenericHypergraph":
        vertices = tuple(v["id"] for v in d["vertices"])
        weights = {v["id"]: Fraction(v["weight"][0], v["weight"][1]) for v in d["vertices"]}
        return cls(d["k"], vertices, tuple(tuple(e) for e in d["edges"]),
                   weights, d.get("meta", {}))

    def to_edge_list(self) -> str:
        return "".join(" ".join(str(v) for v in e) + "\n" for e in self.edges)


@dataclass
class IndependentSetResult:
    vertices: frozenset[int]
    weight: Fraction
    optimal: bool
    nodes_expanded: int


def max_independent_set(h: GenericHypergraph, budget: int = DEFAULT_NODE_BUDGET) -> IndependentSetResult:
    """Branch and bound for the maximum-weight independent set.

    Branches on the highest-degree undecided vertex, seeds the incumbent
    with a greedy solution, and prunes with a fractional bound obtained
    from a packing of vertex-disjoint live edges. Exceeding the
    node-expansion budget degrades the result to best-found.
    """
    order = sorted(h.vertices,
                   key=lambda v: (-sum(1 for e in h.edges if v in e), v))
    pos = {v: i for i, v in enumerate(order)}
    edges = [tuple(sorted(e, key=lambda v: pos[v])) for e in h.edges]

    greedy: set[int] = set()
    for v in order:
        greedy.add(v)
        if any(all(u in greedy for u in e) for e in edges if v in e):
            greedy.remove(v)
    best_set = frozenset(greedy)
    best_weight = h.weight_of(greedy)

    nodes = 0
    exhausted = False

    def bound(idx: int, excluded: set[int], current: Fraction) -> Fraction:
        undecided = [v for v in order[idx:] if v not in excluded]
        optimistic = current + h.weight_of(undecided)
        undecided_set = set(undecided)
        used: set[int] = set()
        penalty = Fraction(0)
        for e in edges:
            if any(v in excluded for v in e):
                continue
            live = [v for v in e if v in undecided_set]
            if not live:
                continue
            if any(v in used for v in e):
                continue
            used.update(e)
            penalty += min(h.weights[v] for v in live)
        return optimistic - penalty

    def dfs(idx: int, included: set[int], excluded: set[int], current: Fraction) -> None:
        nonlocal best_set, best_weight, nodes, exhausted
        if exhausted:
            return
        nodes += 1
        if nodes > budget:
            exhausted = True
            return
        while idx < len(order) and order[idx] in excluded:
            idx += 1
        if idx == len(order):
            if current > best_weight:
                best_weight = current
                best_set = frozenset(included)
            return
        if bound(idx, excluded, current) <= best_weight:
            return
        v = order[idx]
        included.add(v)
        conflict = [e for e in edges if v in e and all(u in included for u in e)]
        if not conflict:
            dfs(idx + 1, included, excluded, current + h.weights[v])
        included.remove(v)
        excluded.add(v)
        dfs(idx + 1, included, excluded, current)
        excluded.remove(v)

    dfs(0, set(), set(), Fraction(0))
    return IndependentSetResult(best_set, best_weight, not exhausted, nodes)


@dataclass
class ColoringResult:
    colorable: bool
    coloring: dict[int, int] | None
    nodes: int
    max_depth: int


def two_colorable(h: GenericHypergraph) -> ColoringResult:
    """Backtracking 2-coloring with unit propagation on nearly
    monochromatic edges; UNSAT means the whole tree was exhausted."""
    order = sorted(h.vertices,
                   key=lambda v: (-sum(1 for e in h.edges if v in e), v))
    edges = list(h.edges)
    edges_of: dict[int, list[int]] = {v: [] for v in h.vertices}
    for ei, e in enumerate(edges):
        for v in e:
            edges_of[v].append(ei)
    color: dict[int, int] = {}
    nodes = 0
    max_depth = 0

    def propagate(trail: list[int]) -> bool:
        queue = list(trail)
        while queue:
            v = queue.pop()
            for ei in edges_of[v]:
                e = edges[ei]
                assigned = [color[u] for u in e if u in color]
                unassigned = [u for u in e if u not in color]
                if not unassigned:
                    if len(set(assigned)) == 1:
                        return False
                    continue
                if len(unassigned) == 1 and len(set(assigned)) == 1:
                    u = unassigned[0]
                    color[u] = 1 - assigned[0]
                    trail.append(u)
                    queue.append(u)
        return True

    def dfs(idx: int) -> bool:
        nonlocal nodes, max_depth
        while idx < len(order) and order[idx] in color:
            idx += 1
        max_depth = max(max_depth, len(color))
        if idx == len(order):
            return True
        v = order[idx]
        for c in (0, 1):
            nodes += 1
            color[v] = c
            trail = [v]
            if propagate(trail) and dfs(idx + 1):
                return True
            for u in trail:
                del color[u]
        return False

    ok = dfs(0)
    return ColoringResult(ok, dict(color) if ok else None, nodes, max_depth)


@dataclass
class AlmostColoringResult:
    success: bool
    removal: frozenset[int] | None
    coloring: dict[int, int] | None
    attempts: int
    best_residual_depth: int


def _induced(h: GenericHypergraph, survivors: set[int]) -> GenericHypergraph:
    return GenericHypergraph(
        h.k, tuple(sorted(survivors)),
        tuple(e for e in h.edges if all(v in survivors for v in e)),
        {v: h.weights[v] for v in survivors},
    )


def almost_two_colorable(h: GenericHypergraph, epsilon,
                         candidate_removal=None,
                         enum_cap: int = ALMOST_ENUM_CAP) -> AlmostColoringResult:
    """Search for a removal set of weight <= epsilon * total whose induced
    sub-hypergraph (edges fully inside the survivors) is 2-colorable.

    With a candidate removal supplied, only that candidate is verified.
    """
    epsilon = Fraction(epsilon)
    allowance = epsilon * h.total_weight
    if candidate_removal is not None:
        removal = set(candidate_removal)
        if h.weight_of(removal) > allowance:
            return AlmostColoringResult(False, None, None, 1, 0)
        res = two_colorable(_induced(h, set(h.vertices) - removal))
        return AlmostColoringResult(res.colorable, frozenset(removal) if res.colorable else None,
                                    res.coloring, 1, res.max_depth)

    removable = sorted((v for v in h.vertices if h.weights[v] <= allowance),
                       key=lambda v: (-h.weights[v], v))
    attempts = 0
    best_depth = -1
    for size in range(0, len(removable) + 1):
        for combo in itertools.combinations(removable, size):
            if h.weight_of(combo) > allowance:
                continue
            attempts += 1
            if attempts > enum_cap:
                return AlmostColoringResult(False, None, None, attempts - 1, best_depth)
            res = two_colorable(_induced(h, set(h.vertices) - set(combo)))
            best_depth = max(best_depth, res.max_depth)
            if res.colorable:
                return AlmostColoringResult(True, frozenset(combo), res.coloring,
                                            attempts, res.max_depth)
    return AlmostColoringResult(False, None, None, attempts, best_depth)


def min_vertex_cover_exhaustive(h: GenericHypergraph) -> tuple[frozenset[int], Fraction]:
    """Independent route for the duality cross-check: scan all vertex
    subsets for the covering property (every edge meets the cover)."""
    verts = list(h.vertices)
    n = len(verts)
    if n > 20:
        raise ValueError("exhaustive cover scan capped at 20 vertices")
    vpos = {v: i for i, v in enumerate(verts)}
    edge_masks = [sum(1 << vpos[v] for v in e) for e in h.edges]
    best_mask = (1 << n) - 1
    best_weight = h.total_weight
    for mask in range(1 << n):
        if all(mask & em for em in edge_masks):
            w = sum((h.weights[verts[i]] for i in range(n) if (mask >> i) & 1), Fraction(0))
            if w < best_weight:
                best_weight = w
                best_mask = mask
    cover = frozenset(verts[i] for i in range(n) if (best_mask >> i) & 1)
    return cover, best_weight
