"""Exact Wasserstein-1 distance over the graph metric.

The transportation problem is solved as a min-cost flow on the bipartite
support graph by successive shortest paths.  All mass arithmetic runs over
exact rationals -- float inputs are lifted losslessly (floats are dyadic
rationals) and converted back on output -- while path costs stay integer
(hop distances), so Dijkstra runs on ints and the optimum is exact in both
arithmetic modes.  Optimal couplings and dual 1-Lipschitz potentials are
returned as certificates.
"""

import heapq
from dataclasses import dataclass
from fractions import Fraction

from .errors import Disconnected
from .numeric import Number, all_exact, as_mode, to_fraction
from .state_space import SparseDistribution, StateFunction, StateGraph


@dataclass(frozen=True)
class Coupling:
    """Joint measure with prescribed marginals; pairs are ((x, y), weight)."""

    pairs: tuple

    def items(self):
        return self.pairs

    @property
    def is_exact(self):
        return all_exact(w for _, w in self.pairs)

    @staticmethod
    def from_triples(triples) -> "Coupling":
        return Coupling(tuple(((x, y), w) for x, y, w in triples))

    def triples(self):
        return tuple((x, y, w) for (x, y), w in self.pairs)


@dataclass(frozen=True)
class CouplingVerdict:
    ok: bool
    first_violation: str | None
    max_residual: float


@dataclass(frozen=True)
class TransportResult:
    distance: Number
    optimal_coupling: Coupling
    dual_potential: StateFunction | None = None


def product_coupling(m1: SparseDistribution, m2: SparseDistribution) -> Coupling:
    """Independent coupling m1 (x) m2; always valid, rarely optimal."""
    return Coupling(tuple(((x, y), wx * wy) for x, wx in m1.items() for y, wy in m2.items()))


def validate_coupling(A: Coupling, m1: SparseDistribution, m2: SparseDistribution,
                      tol: float = 1e-12) -> CouplingVerdict:
    """Check nonnegativity and both marginal constraints.

    Exact equality is demanded when every weight involved is rational;
    otherwise each residual must stay within `tol`.
    """
    exact = A.is_exact and m1.is_exact and m2.is_exact
    rows: dict = {}
    cols: dict = {}
    for (x, y), w in A.pairs:
        if w < 0:
            return CouplingVerdict(False, f"negative weight at pair ({x},{y})", float(-w))
        rows[x] = rows.get(x, 0) + w
        cols[y] = cols.get(y, 0) + w
    worst = 0.0
    for label, sums, marg in (("row", rows, m1), ("column", cols, m2)):
        states = sorted(set(sums) | set(marg.support()))
        for s in states:
            have = to_fraction(sums.get(s, 0))
            want = to_fraction(marg.mass(s))
            res = abs(have - want)
            worst = max(worst, float(res))
            bad = res != 0 if exact else float(res) > tol
            if bad:
                return CouplingVerdict(
                    False, f"{label} marginal at state {s}: residual {float(res):.3e}", float(res))
    return CouplingVerdict(True, None, worst)


def coupling_cost(A: Coupling, g: StateGraph) -> Number:
    """Transport cost sum of weight * distance; exact if the weights are."""
    dists: dict = {}
    total = Fraction(0)
    for (x, y), w in A.pairs:
        if x not in dists:
            dists[x] = g.distances_from(x)
        d = dists[x][y]
        if d is None:
            raise Disconnected(f"coupling pair ({x},{y}) spans components")
        total += to_fraction(w) * d
    return as_mode(total, A.is_exact)


def _reduce_common_mass(m1: SparseDistribution, m2: SparseDistribution):
    """Strip pointwise-min mass (kept in place at cost 0); returns
    (diagonal pairs, residual supply list, residual demand list)."""
    diag = []
    supply = []
    demand = []
    states = sorted(set(m1.support()) | set(m2.support()))
    for s in states:
        a = to_fraction(m1.mass(s))
        b = to_fraction(m2.mass(s))
        c = min(a, b)
        if c > 0:
            diag.append(((s, s), c))
        if a > c:
            supply.append((s, a - c))
        if b > c:
            demand.append((s, b - c))
    return diag, supply, demand


def _support_distances(g: StateGraph, sources, targets):
    """Hop distances source x target via one BFS per source."""
    cost = []
    for s in sources:
        vec = g.distances_from(s)
        row = []
        for t in targets:
            d = vec[t]
            if d is None:
                raise Disconnected(f"supports of the two distributions are not connected ({s} vs {t})")
            row.append(d)
        cost.append(row)
    return cost


def _min_cost_transport(supply, demand, cost):
    """Successive shortest paths on the bipartite transportation network.

    supply/demand are lists of Fractions, cost an integer matrix.  Returns
    (flow dict (i,j)->Fraction, source potentials, sink potentials) with
    the usual optimality certificate: for all arcs
    pot_sink[j] - pot_src[i] <= cost[i][j], with equality wherever flow is
    positive.
    """
    a, b = len(supply), len(demand)
    remaining_supply = list(supply)
    remaining_demand = list(demand)
    flow: dict = {}
    # Node ids: sources 0..a-1, sinks a..a+b-1.  Potentials stay integer.
    pi = [0] * (a + b)
    INF = float("inf")
    total_left = sum(remaining_supply)
    while total_left > 0:
        dist = [INF] * (a + b)
        parent = [None] * (a + b)
        heap = []
        for i in range(a):
            if remaining_supply[i] > 0:
                dist[i] = 0
                heapq.heappush(heap, (0, i))
        while heap:
            d, node = heapq.heappop(heap)
            if d > dist[node]:
                continue
            if node < a:
                i = node
                for j in range(b):
                    nd = d + cost[i][j] + pi[i] - pi[a + j]
                    if nd < dist[a + j]:
                        dist[a + j] = nd
                        parent[a + j] = i
                        heapq.heappush(heap, (nd, a + j))
            else:
                j = node - a
                for i in range(a):
                    if flow.get((i, j), 0) > 0:
                        nd = d - cost[i][j] + pi[a + j] - pi[i]
                        if nd < dist[i]:
                            dist[i] = nd
                            parent[i] = a + j
                            heapq.heappush(heap, (nd, i))
        best_j, best_d = None, INF
        for j in range(b):
            if remaining_demand[j] > 0 and dist[a + j] < best_d:
                best_d = dist[a + j]
                best_j = j
        if best_j is None:
            raise Disconnected("transportation network admits no augmenting path")
        # Walk back to the originating source, recording the path.
        path = []
        node = a + best_j
        while parent[node] is not None:
            prev = parent[node]
            path.append((prev, node))
            node = prev
        src = node
        bottleneck = min(remaining_supply[src], remaining_demand[best_j])
        for u, v in path:
            if u >= a:  # backward arc: limited by the flow it cancels
                bottleneck = min(bottleneck, flow[(v, u - a)])
        for u, v in path:
            if u < a:
                key = (u, v - a)
                flow[key] = flow.get(key, 0) + bottleneck
            else:
                key = (v, u - a)
                flow[key] -= bottleneck
                if flow[key] == 0:
                    del flow[key]
        remaining_supply[src] -= bottleneck
        remaining_demand[best_j] -= bottleneck
        total_left -= bottleneck
        # Johnson potential update keeps every reduced cost nonnegative.
        for node in range(a + b):
            pi[node] += min(dist[node], best_d) if dist[node] is not INF else best_d
    return flow, pi[:a], pi[a:]


@dataclass(frozen=True)
class _ExactSolution:
    total: Fraction
    pairs: tuple          # optimal coupling, exact weights
    sinks: tuple
    sink_potentials: tuple


def _solve(m1: SparseDistribution, m2: SparseDistribution, g: StateGraph) -> _ExactSolution:
    diag, supply_pairs, demand_pairs = _reduce_common_mass(m1, m2)
    if not supply_pairs:
        return _ExactSolution(Fraction(0), tuple(diag), (), ())
    sources = [s for s, _ in supply_pairs]
    sinks = [s for s, _ in demand_pairs]
    cost = _support_distances(g, sources, sinks)
    flow, _, v_pot = _min_cost_transport([w for _, w in supply_pairs],
                                         [w for _, w in demand_pairs], cost)
    total = Fraction(0)
    pairs = list(diag)
    for (i, j), w in sorted(flow.items()):
        total += w * cost[i][j]
        pairs.append(((sources[i], sinks[j]), w))
    pairs.sort(key=lambda e: e[0])
    return _ExactSolution(total, tuple(pairs), tuple(sinks), tuple(v_pot))


def _render_coupling(pairs, exact: bool) -> Coupling:
    if exact:
        return Coupling(tuple(pairs))
    return Coupling(tuple((p, float(w)) for p, w in pairs))


def wasserstein(m1: SparseDistribution, m2: SparseDistribution, g: StateGraph,
                *, want_potential: bool = False) -> TransportResult:
    """Exact transportation distance with an optimal coupling certificate.

    The optimum keeps common mass in place (metric costs make that lossless)
    and routes the rest by successive shortest paths.  Set `want_potential`
    to also receive an optimal dual 1-Lipschitz potential.
    """
    exact = m1.is_exact and m2.is_exact
    sol = _solve(m1, m2, g)
    potential = _dual_potential(g, sol) if want_potential else None
    return TransportResult(as_mode(sol.total, exact),
                           _render_coupling(sol.pairs, exact), potential)


def _dual_potential(g: StateGraph, sol: _ExactSolution) -> StateFunction:
    """1-Lipschitz potential f(z) = min_j (d(z, sink_j) - v_j).

    A minimum of shifted distance functions is globally 1-Lipschitz; the
    shifts come from the flow's sink potentials, so f attains the optimum.
    States the sinks cannot reach sit in other components and get 0.
    """
    if not sol.sinks:
        return StateFunction(tuple([0] * g.state_count))
    best = [None] * g.state_count
    for j, t in enumerate(sol.sinks):
        vec = g.distances_from(t)
        v_j = sol.sink_potentials[j]
        for z in range(g.state_count):
            if vec[z] is None:
                continue
            cand = vec[z] - v_j
            if best[z] is None or cand < best[z]:
                best[z] = cand
    return StateFunction(tuple(b if b is not None else 0 for b in best))


def kantorovich_dual(m1: SparseDistribution, m2: SparseDistribution,
                     g: StateGraph) -> tuple[Number, StateFunction]:
    """Optimal dual pair: value sup_f sum f (m1 - m2) over 1-Lipschitz f.

    The returned value equals the primal optimum exactly; both sides come
    from one flow whose optimality certificate is the potential itself,
    and the equality is re-verified in exact arithmetic before returning.
    """
    exact = m1.is_exact and m2.is_exact
    sol = _solve(m1, m2, g)
    f = _dual_potential(g, sol)
    value = sum(to_fraction(f.values[s]) * to_fraction(w) for s, w in m1.items())
    value -= sum(to_fraction(f.values[s]) * to_fraction(w) for s, w in m2.items())
    if value != sol.total:
        raise AssertionError(f"dual value {value} does not certify primal {sol.total}")
    return as_mode(value, exact), f
