"""Lipschitz observables on configuration spaces.

Counting functionals -- subgraph copies, directed triangles, permutation
pattern occurrences -- together with their claimed edge-Lipschitz constants
on the matching configuration spaces and an exhaustive/sampled verifier.
"""

from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb

import numpy as np

from .errors import (BadParams, IncompatiblePair, LipschitzViolation,
                     PatternTooLarge)
from .geometrize import (DigraphConfig, DOutRegularSpace, GeometrizedSpace,
                         GnmSpace, GraphConfig, PermInsertionSpace)

MAX_PATTERN_VERTICES = 8


@dataclass(frozen=True)
class SubgraphPattern:
    """Small undirected pattern graph; vertex_count covers isolated vertices."""

    vertex_count: int
    edges: tuple

    def __post_init__(self):
        if self.vertex_count > MAX_PATTERN_VERTICES:
            raise PatternTooLarge(f"pattern has {self.vertex_count} > {MAX_PATTERN_VERTICES} vertices")
        for u, v in self.edges:
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count) or u == v:
                raise BadParams(f"bad pattern edge ({u},{v})")

    def normalized_edges(self) -> frozenset:
        return frozenset((min(u, v), max(u, v)) for u, v in self.edges)


@dataclass(frozen=True)
class DirectedTrianglePattern:
    """Marker: count vertex triples carrying a directed 3-cycle."""


@dataclass(frozen=True)
class PermutationPattern:
    """Pattern permutation; occurrences are order-isomorphic subsequences."""

    tau: tuple

    def __post_init__(self):
        if sorted(self.tau) != list(range(min(self.tau), min(self.tau) + len(self.tau))):
            raise BadParams(f"{self.tau} is not a permutation pattern")
        if len(self.tau) > MAX_PATTERN_VERTICES:
            raise PatternTooLarge(f"pattern length {len(self.tau)} exceeds {MAX_PATTERN_VERTICES}")


def triangle_pattern() -> SubgraphPattern:
    return SubgraphPattern(3, ((0, 1), (1, 2), (0, 2)))


def automorphism_count(F: SubgraphPattern) -> int:
    """|Aut(F)| by brute force over vertex permutations."""
    target = F.normalized_edges()
    count = 0
    for sigma in permutations(range(F.vertex_count)):
        mapped = frozenset((min(sigma[u], sigma[v]), max(sigma[u], sigma[v]))
                           for u, v in target)
        if mapped == target:
            count += 1
    return count


def count_subgraph(G: GraphConfig, F: SubgraphPattern) -> int:
    """Copies of F in G: injective edge-preserving maps divided by |Aut(F)|.

    Backtracking over F's vertices with bitmask candidate pruning; copies
    are counted as subgraphs, not induced subgraphs.
    """
    k = F.vertex_count
    if k > G.n:
        return 0
    fedges = F.normalized_edges()
    # order F-vertices so each (after the first) prefers placed neighbors
    order = []
    placed = set()
    degs = [0] * k
    for u, v in fedges:
        degs[u] += 1
        degs[v] += 1
    while len(order) < k:
        best = None
        for v in range(k):
            if v in placed:
                continue
            anchors = sum(1 for u in order if (min(u, v), max(u, v)) in fedges)
            key = (anchors, degs[v], -v)
            if best is None or key > best[0]:
                best = (key, v)
        order.append(best[1])
        placed.add(best[1])
    pos = {v: i for i, v in enumerate(order)}
    # for each step, masks of earlier-placed pattern neighbors
    anchor_lists = []
    for i, v in enumerate(order):
        anchor_lists.append([pos[u] for u in order[:i] if (min(u, v), max(u, v)) in fedges])
    adj = G.adjacency_masks()
    full = (1 << G.n) - 1
    embeddings = 0
    assignment = [0] * k

    def backtrack(i, used_mask):
        nonlocal embeddings
        if i == k:
            embeddings += 1
            return
        cand = full & ~used_mask
        for a in anchor_lists[i]:
            cand &= adj[assignment[a]]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            assignment[i] = v
            backtrack(i + 1, used_mask | low)

    backtrack(0, 0)
    aut = automorphism_count(F)
    if embeddings % aut:
        raise AssertionError("embedding count not divisible by automorphism count")
    return embeddings // aut


def count_directed_triangles(G: DigraphConfig) -> int:
    """Vertex triples carrying a directed 3-cycle; a triple with both
    orientations counts twice."""
    n = G.n
    in_masks = [0] * n
    for v in range(n):
        m = G.outs[v]
        while m:
            low = m & -m
            in_masks[low.bit_length() - 1] |= 1 << v
            m ^= low
    total = 0
    for v in range(n):
        m = G.outs[v]
        while m:
            low = m & -m
            u = low.bit_length() - 1
            m ^= low
            total += (G.outs[u] & in_masks[v]).bit_count()
    if total % 3:
        raise AssertionError("directed 3-cycle incidence count not divisible by 3")
    return total // 3


def count_pattern(pi, tau: PermutationPattern) -> int:
    """Occurrences of tau in pi: index subsequences with tau's relative order."""
    t = tau.tau
    k = len(t)
    n = len(pi)
    if k > n:
        raise PatternTooLarge(f"pattern length {k} exceeds permutation length {n}")
    rel = tuple(sorted(range(k), key=lambda i: t[i]))
    count = 0
    for idx in combinations(range(n), k):
        vals = [pi[i] for i in idx]
        ok = True
        prev = None
        for r in rel:
            if prev is not None and vals[r] <= prev:
                ok = False
                break
            prev = vals[r]
        if ok:
            count += 1
    return count


def claimed_lipschitz_constant(obs, space: GeometrizedSpace) -> int:
    """Edge-Lipschitz constant claimed for the observable on its space.

    Subgraph counts on fixed-edge-count graph spaces: C(n, v(F)-2).
    Directed triangles on d-out-regular spaces: d^2.
    Pattern counts on reinsertion permutation spaces: C(n-1, |tau|-1).
    """
    if isinstance(obs, SubgraphPattern) and isinstance(space, GnmSpace):
        return comb(space.n, obs.vertex_count - 2)
    if isinstance(obs, DirectedTrianglePattern) and isinstance(space, DOutRegularSpace):
        return space.d**2
    if isinstance(obs, PermutationPattern) and isinstance(space, PermInsertionSpace):
        return comb(space.n - 1, len(obs.tau) - 1)
    raise IncompatiblePair(f"{type(obs).__name__} has no claimed constant on {space.model}")


def observable_for(obs):
    """Counting function for a pattern object."""
    if isinstance(obs, SubgraphPattern):
        return lambda cfg: count_subgraph(cfg, obs)
    if isinstance(obs, DirectedTrianglePattern):
        return count_directed_triangles
    if isinstance(obs, PermutationPattern):
        return lambda cfg: count_pattern(cfg, obs)
    raise IncompatiblePair(f"unknown observable {obs!r}")


@dataclass(frozen=True)
class LipschitzReport:
    checked_edges: int
    max_difference: float
    constant: float
    mode: str


def verify_lipschitz(space: GeometrizedSpace, f, c, mode: str = "exhaustive",
                     count: int = 1000, seed: int = 0) -> LipschitzReport:
    """Check |f(u) - f(v)| <= c over edges of the configuration graph.

    Exhaustive mode walks every edge (needs enumeration); sampled mode
    draws `count` random edges through the sampler and neighbor oracle, so
    it works past the enumeration cap.  Raises LipschitzViolation with the
    witness edge on failure.
    """
    worst = 0.0
    checked = 0

    def check(a, b):
        nonlocal worst, checked
        diff = abs(f(a) - f(b))
        checked += 1
        if diff > worst:
            worst = float(diff)
        if diff > c:
            raise LipschitzViolation(
                f"|f({a}) - f({b})| = {diff} exceeds {c}", witness=(a, b), diff=diff)

    if mode == "exhaustive":
        space.require_enumerable()
        values = {}
        for cfg in space.iter_configs():
            values[cfg] = f(cfg)
        for cfg, fa in values.items():
            for nbr in space.neighbor_configs(cfg):
                if space.encode(nbr) > space.encode(cfg):
                    checked += 1
                    diff = abs(fa - values[nbr])
                    if diff > worst:
                        worst = float(diff)
                    if diff > c:
                        raise LipschitzViolation(
                            f"|f({cfg}) - f({nbr})| = {diff} exceeds {c}",
                            witness=(cfg, nbr), diff=diff)
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        for _ in range(count):
            a = space.sample_config(rng)
            b = space.random_neighbor(a, rng)
            check(a, b)
    else:
        raise ValueError("mode must be 'exhaustive' or 'sampled'")
    return LipschitzReport(checked, worst, float(c), mode)


def expected_directed_triangles(n: int, d: int) -> float:
    """Mean directed-triangle count of a uniform d-out-regular digraph:
    2 C(n,3) (d/(n-1))^3 -- the three arcs of a cyclic triple come from
    three different vertices' independent out-sets."""
    if not 1 <= d <= n - 2:
        raise BadParams("need 1 <= d <= n - 2")
    return 2.0 * comb(n, 3) * (d / (n - 1)) ** 3
