"""Finite state spaces: graph metric, walk kernels, stationary distributions.

States are integers 0..state_count-1.  All edges have length 1; the metric
is the hop-count shortest-path distance.  Loops are allowed (they record
self-mass of a walk) but never contribute to distances.
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import Disconnected, IsolatedState, NotErgodic
from .numeric import FLOAT_TOL, Number, all_exact, is_exact, to_fraction


class StateGraph:
    """Finite undirected graph with unit edge lengths (loops permitted).

    Edges are stored as normalized (min, max) pairs; adjacency is
    precomputed once so instances behave as immutable values.
    """

    def __init__(self, state_count: int, edges, labels=None):
        if state_count <= 0:
            raise ValueError("state_count must be positive")
        norm = set()
        for u, v in edges:
            if not (0 <= u < state_count and 0 <= v < state_count):
                raise ValueError(f"edge ({u},{v}) out of range for {state_count} states")
            norm.add((u, v) if u <= v else (v, u))
        self.state_count = state_count
        self.edges = tuple(sorted(norm))
        self.labels = tuple(labels) if labels is not None else None
        nbrs = [[] for _ in range(state_count)]
        loops = [False] * state_count
        for u, v in self.edges:
            if u == v:
                loops[u] = True
            else:
                nbrs[u].append(v)
                nbrs[v].append(u)
        self._neighbors = tuple(tuple(sorted(a)) for a in nbrs)
        self._loops = tuple(loops)
        self._dist_cache = None

    def neighbors(self, x: int) -> tuple:
        """Open neighborhood of x (never contains x itself)."""
        return self._neighbors[x]

    def has_loop(self, x: int) -> bool:
        return self._loops[x]

    def degree(self, x: int) -> int:
        return len(self._neighbors[x])

    def proper_edges(self) -> tuple:
        """Edges with distinct endpoints (loops dropped)."""
        return tuple(e for e in self.edges if e[0] != e[1])

    def is_edge(self, x: int, y: int) -> bool:
        return x != y and y in self._neighbors[x]

    def distances_from(self, x: int) -> list:
        """BFS distance vector from x; None marks unreachable states."""
        if self._dist_cache is not None:
            return self._dist_cache[x]
        dist = [None] * self.state_count
        dist[x] = 0
        q = deque([x])
        while q:
            u = q.popleft()
            for v in self._neighbors[u]:
                if dist[v] is None:
                    dist[v] = dist[u] + 1
                    q.append(v)
        return dist

    def cache_all_pairs(self, cap: int = 5000) -> None:
        """Precompute all BFS vectors (read-only afterwards)."""
        if self._dist_cache is None and self.state_count <= cap:
            self._dist_cache = tuple(self.distances_from(x) for x in range(self.state_count))

    def is_connected(self) -> bool:
        return all(d is not None for d in self.distances_from(0))

    def is_bipartite(self) -> bool:
        """Two-colorability; a loop counts as an odd cycle."""
        if any(self._loops):
            return False
        color = [None] * self.state_count
        for s in range(self.state_count):
            if color[s] is not None:
                continue
            color[s] = 0
            q = deque([s])
            while q:
                u = q.popleft()
                for v in self._neighbors[u]:
                    if color[v] is None:
                        color[v] = 1 - color[u]
                        q.append(v)
                    elif color[v] == color[u]:
                        return False
        return True


def shortest_path_distance(g: StateGraph, x: int, y: int) -> int:
    """Hop count of a shortest x-y path; raises Disconnected if none."""
    if x == y:
        return 0
    d = g.distances_from(x)[y]
    if d is None:
        raise Disconnected(f"no path between states {x} and {y}")
    return d


def diameter(g: StateGraph) -> int:
    """Largest pairwise distance; raises Disconnected on a disconnected graph."""
    best = 0
    for x in range(g.state_count):
        dist = g.distances_from(x)
        for d in dist:
            if d is None:
                raise Disconnected("graph is not connected")
            if d > best:
                best = d
    return best


class SparseDistribution:
    """Probability distribution with explicit support.

    Weights are positive and sum to one -- exactly when all weights are
    rational, within FLOAT_TOL otherwise.
    """

    def __init__(self, entries):
        items = sorted(entries, key=lambda e: e[0])
        states = [s for s, _ in items]
        if len(set(states)) != len(states):
            raise ValueError("duplicate states in distribution support")
        for s, w in items:
            if s < 0:
                raise ValueError("negative state index")
            if not w > 0:
                raise ValueError(f"non-positive weight {w} at state {s}")
        self.entries = tuple((s, w) for s, w in items)
        self.is_exact = all_exact(w for _, w in items)
        total = sum(to_fraction(w) for _, w in items)
        if self.is_exact:
            if total != 1:
                raise ValueError(f"weights sum to {total}, expected 1")
        elif abs(float(total) - 1.0) > FLOAT_TOL:
            raise ValueError(f"weights sum to {float(total)!r}, expected 1 within {FLOAT_TOL}")
        self._mass = dict(self.entries)

    def support(self) -> tuple:
        return tuple(s for s, _ in self.entries)

    def mass(self, state: int) -> Number:
        return self._mass.get(state, 0)

    def items(self) -> tuple:
        return self.entries

    @staticmethod
    def delta(state: int) -> "SparseDistribution":
        return SparseDistribution([(state, 1)])

    @staticmethod
    def from_dense(values) -> "SparseDistribution":
        return SparseDistribution([(i, w) for i, w in enumerate(values) if w > 0])

    def __eq__(self, other):
        return isinstance(other, SparseDistribution) and self.entries == other.entries

    def __repr__(self):
        return f"SparseDistribution({list(self.entries)!r})"


class WalkKernel:
    """One distribution per state; row x is the one-step law from x."""

    def __init__(self, rows):
        self.rows = tuple(rows)
        self.state_count = len(self.rows)
        self.is_exact = all(r.is_exact for r in self.rows)

    def row(self, x: int) -> SparseDistribution:
        return self.rows[x]

    def validate_support(self, g: StateGraph) -> None:
        """Each row must live on the closed neighborhood of its state."""
        if self.state_count != g.state_count:
            raise ValueError("kernel/graph state counts differ")
        for x, row in enumerate(self.rows):
            allowed = set(g.neighbors(x)) | {x}
            for s, _ in row.items():
                if s not in allowed:
                    raise ValueError(f"row {x} places mass on non-neighbor {s}")

    def support_arcs(self):
        for x, row in enumerate(self.rows):
            for y, _ in row.items():
                yield x, y


@dataclass(frozen=True)
class StateFunction:
    """Real-valued function on the states, optionally with a declared Lipschitz constant."""

    values: tuple
    lipschitz_c: Number | None = None

    def __call__(self, x: int) -> Number:
        return self.values[x]

    @staticmethod
    def from_callable(state_count: int, f) -> "StateFunction":
        return StateFunction(tuple(f(x) for x in range(state_count)))


def edge_lipschitz_constant(g: StateGraph, f: StateFunction) -> Number:
    """Largest |f(u)-f(v)| over proper edges (0 on edgeless graphs)."""
    best = 0
    for u, v in g.proper_edges():
        d = abs(f.values[u] - f.values[v])
        if d > best:
            best = d
    return best


@dataclass(frozen=True)
class ErgodicityVerdict:
    ergodic: bool
    strongly_connected: bool
    aperiodic: bool
    period: int | None
    connected_non_bipartite: bool
    reason: str


def _strongly_connected(arcs_out, n: int) -> bool:
    # Kernel support arcs; two BFS sweeps (forward and reverse) from state 0.
    rev = [[] for _ in range(n)]
    for u in range(n):
        for v in arcs_out[u]:
            rev[v].append(u)

    def reaches_all(adj):
        seen = [False] * n
        seen[0] = True
        q = deque([0])
        count = 1
        while q:
            u = q.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    q.append(v)
        return count == n

    return reaches_all(arcs_out) and reaches_all(rev)


def _period(arcs_out, n: int) -> int:
    # gcd of (level(u) + 1 - level(v)) over support arcs, levels from BFS;
    # valid once the support digraph is strongly connected.
    import math

    level = [None] * n
    level[0] = 0
    q = deque([0])
    while q:
        u = q.popleft()
        for v in arcs_out[u]:
            if level[v] is None:
                level[v] = level[u] + 1
                q.append(v)
    g = 0
    for u in range(n):
        for v in arcs_out[u]:
            g = math.gcd(g, level[u] + 1 - level[v])
    return abs(g) if g else 0


def check_ergodic(g: StateGraph, m: WalkKernel) -> ErgodicityVerdict:
    """Ergodicity of the kernel's support digraph: strong connectivity + aperiodicity.

    The classical sufficient condition for neighborhood walks (underlying
    graph connected and non-bipartite) is reported as a separate flag; the
    verdict itself is computed from the kernel actually supplied.
    """
    m.validate_support(g)
    n = m.state_count
    arcs_out = [[] for _ in range(n)]
    for x, y in m.support_arcs():
        arcs_out[x].append(y)
    strong = _strongly_connected(arcs_out, n)
    if not strong:
        return ErgodicityVerdict(False, False, False, None,
                                 g.is_connected() and not g.is_bipartite(),
                                 "support digraph is not strongly connected")
    period = _period(arcs_out, n)
    aperiodic = period == 1
    reason = "strongly connected and aperiodic" if aperiodic else f"periodic with period {period}"
    return ErgodicityVerdict(aperiodic, True, aperiodic, period,
                             g.is_connected() and not g.is_bipartite(), reason)


def _transition_matrix(m: WalkKernel) -> np.ndarray:
    n = m.state_count
    P = np.zeros((n, n))
    for x, row in enumerate(m.rows):
        for y, w in row.items():
            P[x, y] = float(w)
    return P


#: Largest state count solved by a direct dense method.
DENSE_SOLVE_LIMIT = 5000


def stationary_distribution(m: WalkKernel, *, graph: StateGraph | None = None,
                            tol: float = 1e-12) -> SparseDistribution:
    """Unique invariant distribution of an ergodic kernel.

    Dense LU on (P^T - I) with a normalization row up to DENSE_SOLVE_LIMIT
    states, power iteration (tol 1e-13, at most 1e6 sweeps) above.  The
    result satisfies ||nu P - nu||_inf <= tol.
    """
    g = graph if graph is not None else _support_graph(m)
    verdict = check_ergodic(g, m)
    if not verdict.ergodic:
        raise NotErgodic(verdict.reason)
    P = _transition_matrix(m)
    n = m.state_count
    if n <= DENSE_SOLVE_LIMIT:
        A = P.T - np.eye(n)
        A[-1, :] = 1.0
        b = np.zeros(n)
        b[-1] = 1.0
        nu = np.linalg.solve(A, b)
    else:
        nu = np.full(n, 1.0 / n)
        for _ in range(10**6):
            nxt = nu @ P
            if np.abs(nxt - nu).max() < 1e-13:
                nu = nxt
                break
            nu = nxt
        nu = nu / nu.sum()
    residual = np.abs(nu @ P - nu).max()
    if residual > tol:
        raise NotErgodic(f"stationary solve residual {residual:.3e} exceeds {tol}")
    if nu.min() <= 0:
        raise NotErgodic("stationary solve produced a non-positive mass")
    return SparseDistribution([(i, float(w)) for i, w in enumerate(nu)])


def _support_graph(m: WalkKernel) -> StateGraph:
    edges = set()
    for x, y in m.support_arcs():
        edges.add((min(x, y), max(x, y)))
    return StateGraph(m.state_count, edges)


def invariance_residual(m: WalkKernel, nu) -> float:
    """||nu P - nu||_inf for a candidate invariant distribution.

    Accepts a SparseDistribution or a dense sequence; useful for walks that
    fix a distribution without being ergodic (periodic kernels).
    """
    n = m.state_count
    if isinstance(nu, SparseDistribution):
        dense = [0.0] * n
        for s, w in nu.items():
            dense[s] = float(w)
    else:
        dense = [float(w) for w in nu]
    out = [0.0] * n
    for x, row in enumerate(m.rows):
        px = dense[x]
        for y, w in row.items():
            out[y] += px * float(w)
    return max(abs(a - b) for a, b in zip(out, dense))


def apply_averaging(m: WalkKernel, f: StateFunction) -> StateFunction:
    """One-step expectation operator: (Mf)(x) = sum_y f(y) m_x(y).

    Exact when both the kernel and f carry rational values.
    """
    vals = []
    for row in m.rows:
        acc = 0
        for y, w in row.items():
            acc += f.values[y] * w
        vals.append(acc)
    return StateFunction(tuple(vals))


def expectation(dist: SparseDistribution, f: StateFunction) -> Number:
    return sum(f.values[s] * w for s, w in dist.items())


def delta_kernel(g: StateGraph) -> WalkKernel:
    """Identity walk: all mass stays in place."""
    return WalkKernel([SparseDistribution.delta(x) for x in range(g.state_count)])


def simple_random_walk(g: StateGraph) -> WalkKernel:
    """Uniform step to an open neighbor; requires no isolated states."""
    rows = []
    for x in range(g.state_count):
        nbrs = g.neighbors(x)
        if not nbrs:
            raise IsolatedState(f"state {x} has no neighbors")
        w = Fraction(1, len(nbrs))
        rows.append(SparseDistribution([(y, w) for y in nbrs]))
    return WalkKernel(rows)
