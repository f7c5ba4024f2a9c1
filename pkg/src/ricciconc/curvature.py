"""Ollivier-Ricci curvature of a walk on a graph.

kappa(x, y) = 1 - W(m_x, m_y) / d(x, y).  The global lower bound is the
minimum over edges; curvature of non-adjacent pairs can only be larger, a
reduction that ricci_lower_bound re-validates on sampled pairs.  Lazy-walk
curvature, the alpha -> 1 limit estimate, and the structural checks
(diameter bound, Lipschitz contraction of the averaging operator) live
here as well.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (BoundViolation, ContractionViolation, BadGrid, Disconnected,
                     InputNotLipschitz, IsolatedState, LemmaViolation, NotAnEdge,
                     NotDistinct)
from .numeric import Number, to_fraction
from .state_space import (SparseDistribution, StateFunction, StateGraph, WalkKernel,
                          apply_averaging, diameter, edge_lipschitz_constant,
                          shortest_path_distance)
from .transport import Coupling, wasserstein


def ricci_edge(g: StateGraph, m: WalkKernel, x: int, y: int) -> Number:
    """Curvature across an edge: 1 - W(m_x, m_y)."""
    if not g.is_edge(x, y):
        raise NotAnEdge(f"({x},{y}) is not an edge")
    return 1 - wasserstein(m.row(x), m.row(y), g).distance


def ricci_pair(g: StateGraph, m: WalkKernel, x: int, y: int) -> Number:
    """Curvature of an arbitrary distinct pair: 1 - W(m_x, m_y) / d(x, y)."""
    if x == y:
        raise NotDistinct("curvature needs two distinct states")
    d = shortest_path_distance(g, x, y)
    w = wasserstein(m.row(x), m.row(y), g).distance
    if isinstance(w, float):
        return 1 - w / d
    return 1 - Fraction(w, 1) / d


@dataclass
class CurvatureReport:
    per_edge: dict
    global_lb: Number
    argmin_edge: tuple
    certificates: dict = field(default_factory=dict)
    alpha: Number | None = None
    sampled_pairs_checked: int = 0


def _edge_kappa_worker(args):
    g, m, e = args
    return e, ricci_edge(g, m, e[0], e[1])


def ricci_lower_bound(g: StateGraph, m: WalkKernel, sample_pairs: int = 100, *,
                      seed: int = 0, certificates: bool = False,
                      threads: int = 1) -> CurvatureReport:
    """Minimum edge curvature, certified and cross-checked.

    Sweeps every proper edge (optionally in a thread pool; the reduction is
    order-independent), then samples `sample_pairs` non-adjacent pairs and
    asserts their curvature does not undercut the edge minimum -- a failure
    there would signal an implementation bug, so it raises LemmaViolation.
    """
    edges = g.proper_edges()
    if not edges:
        raise Disconnected("graph has no proper edges")
    if not g.is_connected():
        raise Disconnected("graph is not connected")
    jobs = [(g, m, e) for e in edges]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_edge_kappa_worker, jobs))
    else:
        results = [_edge_kappa_worker(j) for j in jobs]
    per_edge = dict(results)
    argmin_edge = min(per_edge, key=lambda e: (to_fraction(per_edge[e]), e))
    global_lb = per_edge[argmin_edge]
    for k in per_edge.values():
        if to_fraction(k) > 1:
            raise AssertionError(f"edge curvature {k} exceeds 1")
    checked = 0
    if sample_pairs > 0:
        non_adjacent = [(x, y) for x in range(g.state_count)
                        for y in range(x + 1, g.state_count) if not g.is_edge(x, y)]
        if non_adjacent:
            rng = np.random.default_rng(seed)
            count = min(sample_pairs, len(non_adjacent))
            idx = rng.choice(len(non_adjacent), size=count, replace=False)
            for i in sorted(int(v) for v in idx):
                x, y = non_adjacent[i]
                k = ricci_pair(g, m, x, y)
                checked += 1
                if float(k) < float(global_lb) - 1e-9:
                    raise LemmaViolation(
                        f"pair ({x},{y}) curvature {float(k)} below edge minimum {float(global_lb)}")
    cert = {}
    if certificates:
        from .transport import kantorovich_dual

        x, y = argmin_edge
        res = wasserstein(m.row(x), m.row(y), g, want_potential=True)
        cert[argmin_edge] = {"coupling": res.optimal_coupling,
                             "potential": res.dual_potential}
    return CurvatureReport(per_edge, global_lb, argmin_edge, cert,
                           sampled_pairs_checked=checked)


def lazy_kernel(g: StateGraph, alpha: Number) -> WalkKernel:
    """alpha-lazy walk: stay with probability alpha, else a uniform neighbor.

    Loops in the graph are ignored (laziness is the only self-mass).
    """
    if not (0 <= alpha < 1):
        raise ValueError("alpha must lie in [0, 1)")
    rows = []
    for x in range(g.state_count):
        nbrs = g.neighbors(x)
        if not nbrs:
            raise IsolatedState(f"state {x} has no neighbors")
        step = (1 - to_fraction(alpha)) / len(nbrs)
        entries = [(y, step) for y in nbrs]
        if alpha > 0:
            entries.append((x, to_fraction(alpha)))
        exact_alpha = not isinstance(alpha, float)
        if not exact_alpha:
            entries = [(s, float(w)) for s, w in entries]
        rows.append(SparseDistribution(entries))
    return WalkKernel(rows)


def ricci_alpha(g: StateGraph, alpha: Number, x: int, y: int) -> Number:
    """Curvature of the alpha-lazy simple random walk at a pair."""
    return ricci_pair(g, lazy_kernel(g, alpha), x, y)


def lazy_limit_estimate(g: StateGraph, x: int, y: int, alphas) -> tuple[Number, bool]:
    """Estimate of lim_{alpha->1} kappa_alpha / (1 - alpha) at (x, y).

    Returns the ratio at the largest supplied alpha together with a
    midpoint-concavity verdict for kappa_alpha over the grid.  This is an
    estimate: on finite graphs kappa_alpha is piecewise linear in alpha,
    so the ratio near 1 is typically already the limit, but no exactness
    is claimed.
    """
    alphas = list(alphas)
    if len(alphas) < 3:
        raise BadGrid("need at least three laziness values")
    if any(not (0 <= a < 1) for a in alphas):
        raise BadGrid("laziness values must lie in [0, 1)")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise BadGrid("laziness values must be strictly increasing")
    if alphas[-1] < 0.9:
        raise BadGrid("largest laziness value must be at least 0.9")
    kappas = [to_fraction(ricci_alpha(g, a, x, y)) for a in alphas]
    concave = True
    pts = list(zip([to_fraction(a) for a in alphas], kappas))
    for (a, ka), (b, kb), (c, kc) in zip(pts, pts[1:], pts[2:]):
        chord = (kc * (b - a) + ka * (c - b)) / (c - a)
        if float(kb) < float(chord) - 1e-9:
            concave = False
    a_top = alphas[-1]
    estimate = kappas[-1] / (1 - to_fraction(a_top))
    if isinstance(a_top, float):
        estimate = float(estimate)
    return estimate, concave


def check_diameter_bound(g: StateGraph, m: WalkKernel, kappa_lb: Number) -> str:
    """Positive global curvature forces kappa <= 2 / diam.

    With uniform self-mass alpha on every row the sharper
    kappa <= (1 - alpha) * 2 / diam is asserted too.  Returns "ok", or
    "not applicable" when kappa_lb <= 0; violations raise BoundViolation
    (they indicate a computation bug, not a property of the input).
    """
    if not to_fraction(kappa_lb) > 0:
        return "not applicable"
    dia = diameter(g)
    if dia == 0:
        return "not applicable"
    lb = to_fraction(kappa_lb)
    if lb > Fraction(2, dia):
        raise BoundViolation(f"kappa {float(lb)} exceeds 2/diam = {2 / dia}")
    self_masses = {to_fraction(m.row(x).mass(x)) for x in range(m.state_count)}
    if len(self_masses) == 1:
        alpha = next(iter(self_masses))
        if lb > (1 - alpha) * Fraction(2, dia):
            raise BoundViolation(
                f"kappa {float(lb)} exceeds (1-alpha)*2/diam with alpha={float(alpha)}")
    return "ok"


def check_lipschitz_contraction(g: StateGraph, m: WalkKernel, f: StateFunction,
                                k: Number, kappa_lb: Number, tol: float = 1e-12) -> dict:
    """Averaging must shrink a k-Lipschitz f to k(1-kappa)-Lipschitz.

    Verifies the precondition on f first, then checks Mf on every edge.
    Returns the observed constants; raises ContractionViolation on failure.
    """
    cf = edge_lipschitz_constant(g, f)
    if float(cf) > float(k) + tol:
        raise InputNotLipschitz(f"f has edge variation {float(cf)} > k = {float(k)}")
    mf = apply_averaging(m, f)
    target = to_fraction(k) * (1 - to_fraction(kappa_lb))
    worst = to_fraction(edge_lipschitz_constant(g, mf))
    if float(worst) > float(target) + tol:
        raise ContractionViolation(
            f"Mf varies by {float(worst)} on an edge; allowed {float(target)}")
    return {"input_constant": cf, "output_constant": worst, "allowed": target}
