"""Configuration spaces as walk-equipped graphs with known invariant laws.

Each builder wraps a classical random model as a graph H on configurations
plus a walk whose invariant distribution is the model's law:

  * gnp               -- all graphs on n labeled vertices; step: pick a
                         vertex uniformly, resample its incident pairs with
                         independent p-coins; invariant law is the product
                         (binomial) measure.
  * gnm / hypergraph  -- all (hyper)graphs with exactly M edges; step: swap
                         an edge with a non-edge, uniformly over the closed
                         neighborhood; invariant law is uniform.
  * dout_regular      -- all d-out-regular digraphs; step: redraw one
                         vertex's out-neighborhood; invariant law is uniform.
  * perm_insertion    -- permutations under single-element reinsertion;
                         uniform kernel over the closed neighborhood;
                         invariant law is uniform.
  * perm_transposition-- permutations under transpositions (no self-mass);
                         uniform invariant law, but the walk is periodic.

Spaces stay usable far beyond the enumeration cap: exact samplers, kernel
rows, neighbor oracles and the rank codec are all arithmetic in the
configuration, while the dense graph/kernel views raise TooLarge past the
cap.  Every space carries an exact rational curvature lower bound (where
one is claimed) and can emit an explicit matching-based coupling across
any edge certifying it.
"""

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (BadParams, CouplingConstructionError, NotAnEdge, TooLarge,
                     UnsupportedModel)
from .numeric import to_fraction
from .state_space import SparseDistribution, StateGraph, WalkKernel
from .transport import Coupling

DEFAULT_CAP = 2**20


def resolve_cap(cap: int | None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get("RICCI_CONC_CAP")
    return int(env) if env else DEFAULT_CAP


# ---------------------------------------------------------------------------
# configuration payloads

@lru_cache(maxsize=None)
def pair_slots(n: int) -> tuple:
    """Vertex pairs of [n] in lexicographic order; slot index = bit index."""
    return tuple((u, v) for u in range(n) for v in range(u + 1, n))


@lru_cache(maxsize=None)
def pair_slot_index(n: int) -> dict:
    return {p: i for i, p in enumerate(pair_slots(n))}


@lru_cache(maxsize=None)
def incident_slots(n: int, v: int) -> tuple:
    """Slots of the n-1 pairs touching vertex v."""
    idx = pair_slot_index(n)
    return tuple(idx[(min(v, u), max(v, u))] for u in range(n) if u != v)


@dataclass(frozen=True)
class GraphConfig:
    """Labeled graph on n vertices, edges packed as a bitmask over pair slots."""

    n: int
    mask: int

    def edge_count(self) -> int:
        return self.mask.bit_count()

    def edge_pairs(self) -> tuple:
        slots = pair_slots(self.n)
        return tuple(slots[i] for i in _bits(self.mask))

    def adjacency_masks(self) -> list:
        adj = [0] * self.n
        slots = pair_slots(self.n)
        for i in _bits(self.mask):
            u, v = slots[i]
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj

    def degree(self, v: int) -> int:
        acc = 0
        for i in incident_slots(self.n, v):
            if self.mask >> i & 1:
                acc += 1
        return acc


@lru_cache(maxsize=None)
def kset_slots(n: int, k: int) -> tuple:
    """k-subsets of [n] in lexicographic order (hyperedge universe)."""
    from itertools import combinations

    return tuple(combinations(range(n), k))


@dataclass(frozen=True)
class HypergraphConfig:
    """k-uniform hypergraph, hyperedges packed as a bitmask over k-set slots."""

    n: int
    k: int
    mask: int

    def hyperedges(self) -> tuple:
        slots = kset_slots(self.n, self.k)
        return tuple(slots[i] for i in _bits(self.mask))


@dataclass(frozen=True)
class DigraphConfig:
    """Digraph given by per-vertex out-neighborhood bitmasks."""

    n: int
    outs: tuple

    def out_degree(self, v: int) -> int:
        return self.outs[v].bit_count()


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _scatter(bits_value: int, positions) -> int:
    out = 0
    for j, pos in enumerate(positions):
        if bits_value >> j & 1:
            out |= 1 << pos
    return out


# ---------------------------------------------------------------------------
# rank codecs

def subset_rank(subset: tuple, universe: int) -> int:
    """Lexicographic rank of a sorted k-subset of range(universe)."""
    r = 0
    prev = -1
    k = len(subset)
    for i, v in enumerate(subset):
        for u in range(prev + 1, v):
            r += math.comb(universe - u - 1, k - i - 1)
        prev = v
    return r


def subset_unrank(rank: int, universe: int, k: int) -> tuple:
    out = []
    u = 0
    while k > 0:
        block = math.comb(universe - u - 1, k - 1)
        if rank < block:
            out.append(u)
            k -= 1
        else:
            rank -= block
        u += 1
    return tuple(out)


def perm_rank(perm: tuple) -> int:
    n = len(perm)
    r = 0
    for i in range(n):
        smaller = sum(1 for j in range(i + 1, n) if perm[j] < perm[i])
        r += smaller * math.factorial(n - 1 - i)
    return r


def perm_unrank(rank: int, n: int) -> tuple:
    avail = list(range(n))
    out = []
    for i in range(n):
        f = math.factorial(n - 1 - i)
        idx, rank = divmod(rank, f)
        out.append(avail.pop(idx))
    return tuple(out)


# ---------------------------------------------------------------------------
# base space

class GeometrizedSpace:
    """A configuration graph, its walk, and the claimed invariant law.

    Subclasses implement the config-level oracles; the dense StateGraph /
    WalkKernel / distribution views are derived lazily and refuse to
    materialize past the enumeration cap.
    """

    model: str

    def __init__(self, params: dict, state_count: int, claimed_kappa_lb, cap: int | None):
        self.params = dict(params)
        self.state_count = state_count
        self.claimed_kappa_lb = claimed_kappa_lb
        self.cap = resolve_cap(cap)
        self._graph = None
        self._kernel = None
        self._index_of = None

    # -- config-level API (no enumeration required) --
    def sample_config(self, rng: np.random.Generator):
        raise NotImplementedError

    def neighbor_configs(self, cfg) -> list:
        """Distinct adjacent configurations (never contains cfg)."""
        raise NotImplementedError

    def random_neighbor(self, cfg, rng: np.random.Generator):
        nbrs = self.neighbor_configs(cfg)
        return nbrs[int(rng.integers(0, len(nbrs)))]

    def kernel_row_config(self, cfg) -> list:
        """One-step law from cfg as [(config, Fraction weight)]."""
        raise NotImplementedError

    def claimed_nu_config(self, cfg) -> Fraction:
        raise NotImplementedError

    def encode(self, cfg) -> int:
        raise NotImplementedError

    def decode(self, index: int):
        raise NotImplementedError

    def iter_configs(self):
        """All configurations in rank order; guarded by the cap."""
        raise NotImplementedError

    # -- enumerated views --
    def require_enumerable(self) -> None:
        if self.state_count > self.cap:
            raise TooLarge(
                f"{self.model} space has {self.state_count} states, cap is {self.cap}")

    def graph(self) -> StateGraph:
        """Configuration graph with a loop wherever the walk has self-mass."""
        if self._graph is None:
            self.require_enumerable()
            edges = set()
            for cfg in self.iter_configs():
                x = self.encode(cfg)
                for tgt, w in self.kernel_row_config(cfg):
                    y = self.encode(tgt)
                    if w > 0:
                        edges.add((min(x, y), max(x, y)))
            self._graph = StateGraph(self.state_count, edges)
        return self._graph

    def kernel(self) -> WalkKernel:
        if self._kernel is None:
            self.require_enumerable()
            rows = [None] * self.state_count
            for cfg in self.iter_configs():
                row = [(self.encode(t), w) for t, w in self.kernel_row_config(cfg)]
                rows[self.encode(cfg)] = SparseDistribution(row)
            self._kernel = WalkKernel(rows)
        return self._kernel

    def claimed_nu_dense(self) -> SparseDistribution:
        self.require_enumerable()
        entries = []
        for cfg in self.iter_configs():
            entries.append((self.encode(cfg), self.claimed_nu_config(cfg)))
        return SparseDistribution(entries)

    def matching_coupling_configs(self, c1, c2) -> list:
        raise UnsupportedModel(f"no explicit coupling for model {self.model}")

    def summary(self) -> dict:
        return {"model": self.model, "params": self.params,
                "state_count": self.state_count,
                "claimed_kappa_lb": self.claimed_kappa_lb}


def direct_sampler(space: GeometrizedSpace, rng) -> object:
    """One exact draw from the claimed invariant law (no walk mixing)."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return space.sample_config(rng)


def matching_coupling(space: GeometrizedSpace, x: int, y: int) -> Coupling:
    """Explicit coupling of the kernel rows across edge (x, y).

    Built from the model's neighbor matching (fixed points plus re-routed
    neighbors at distance <= 1), independently of the transport solver; its
    cost certifies W(m_x, m_y) <= 1 - claimed curvature bound.
    """
    c1, c2 = space.decode(x), space.decode(y)
    pairs = space.matching_coupling_configs(c1, c2)
    return Coupling(tuple(((space.encode(a), space.encode(b)), w) for a, b, w in pairs))


# ---------------------------------------------------------------------------
# vertex-resampling graph space (binomial law)

class GnpSpace(GeometrizedSpace):
    model = "gnp"

    def __init__(self, n: int, p, cap: int | None = None):
        if n < 2:
            raise BadParams("need at least two vertices")
        p = to_fraction(p) if not isinstance(p, float) else p
        pf = to_fraction(p)
        if not 0 < pf < 1:
            raise BadParams("p must lie strictly between 0 and 1")
        self.n = n
        self.p = p
        self._pf = pf
        self._qf = 1 - pf
        self.pair_count = math.comb(n, 2)
        super().__init__({"n": n, "p": p}, 2**self.pair_count, Fraction(1, n), cap)

    def sample_config(self, rng):
        num, den = self._pf.numerator, self._pf.denominator
        draws = rng.integers(0, den, size=self.pair_count)
        mask = 0
        for i in range(self.pair_count):
            if draws[i] < num:
                mask |= 1 << i
        return GraphConfig(self.n, mask)

    def _resample_targets(self, cfg: GraphConfig, v: int):
        positions = incident_slots(self.n, v)
        base = cfg.mask & ~_scatter((1 << len(positions)) - 1, positions)
        for s in range(1 << len(positions)):
            yield s.bit_count(), GraphConfig(self.n, base | _scatter(s, positions))

    def neighbor_configs(self, cfg):
        out = set()
        for v in range(self.n):
            for _, tgt in self._resample_targets(cfg, v):
                if tgt != cfg:
                    out.add(tgt)
        return sorted(out, key=lambda c: c.mask)

    def random_neighbor(self, cfg, rng):
        # rejection over (vertex, incident assignment); every neighbor is hit
        while True:
            v = int(rng.integers(0, self.n))
            s = int(rng.integers(0, 1 << (self.n - 1)))
            positions = incident_slots(self.n, v)
            base = cfg.mask & ~_scatter((1 << len(positions)) - 1, positions)
            tgt = GraphConfig(self.n, base | _scatter(s, positions))
            if tgt != cfg:
                return tgt

    def kernel_row_config(self, cfg):
        acc: dict = {}
        inv_n = Fraction(1, self.n)
        for v in range(self.n):
            for deg, tgt in self._resample_targets(cfg, v):
                w = inv_n * self._pf**deg * self._qf**(self.n - 1 - deg)
                acc[tgt] = acc.get(tgt, Fraction(0)) + w
        return sorted(acc.items(), key=lambda e: e[0].mask)

    def claimed_nu_config(self, cfg):
        e = cfg.edge_count()
        return self._pf**e * self._qf**(self.pair_count - e)

    def encode(self, cfg):
        return cfg.mask

    def decode(self, index):
        return GraphConfig(self.n, index)

    def iter_configs(self):
        self.require_enumerable()
        for mask in range(self.state_count):
            yield GraphConfig(self.n, mask)

    def matching_coupling_configs(self, c1, c2):
        """Synchronous resampling: both walks redraw the same vertex with the
        same coins.  Aggregated over (vertex, assignment), the marginals are
        exactly the two kernel rows, and results differ only at the vertex
        separating c1 from c2, so every off-diagonal atom has distance 1."""
        if c1 == c2 or c2 not in set(self.neighbor_configs(c1)):
            raise NotAnEdge("configurations are not adjacent")
        acc: dict = {}
        inv_n = Fraction(1, self.n)
        for v in range(self.n):
            positions = incident_slots(self.n, v)
            wipe = _scatter((1 << len(positions)) - 1, positions)
            base1 = c1.mask & ~wipe
            base2 = c2.mask & ~wipe
            for s in range(1 << len(positions)):
                add = _scatter(s, positions)
                w = inv_n * self._pf**s.bit_count() * self._qf**(self.n - 1 - s.bit_count())
                key = (GraphConfig(self.n, base1 | add), GraphConfig(self.n, base2 | add))
                acc[key] = acc.get(key, Fraction(0)) + w
        return [(a, b, w) for (a, b), w in sorted(acc.items(),
                                                  key=lambda e: (e[0][0].mask, e[0][1].mask))]


# ---------------------------------------------------------------------------
# uniform edge-swap spaces (fixed edge count; covers graphs and hypergraphs)

class _UniformSwapSpace(GeometrizedSpace):
    """M-subsets of a slot universe; neighbors swap one member for a
    non-member; kernel uniform over the closed neighborhood."""

    def __init__(self, universe: int, M: int, params, cap):
        if not 1 <= M <= universe - 1:
            raise BadParams(f"edge count M={M} must lie in [1, {universe - 1}]")
        self.universe = universe
        self.M = M
        self.weight = Fraction(1, M * (universe - M) + 1)
        kappa = Fraction(universe, M * (universe - M) + 1)
        super().__init__(params, math.comb(universe, M), kappa, cap)

    def _wrap(self, mask: int):
        raise NotImplementedError

    def _mask(self, cfg) -> int:
        raise NotImplementedError

    def sample_config(self, rng):
        # partial Fisher-Yates: uniform M-subset of the slot universe
        arr = list(range(self.universe))
        js = rng.integers(np.arange(self.M), self.universe)
        mask = 0
        for i in range(self.M):
            j = int(js[i])
            arr[i], arr[j] = arr[j], arr[i]
            mask |= 1 << arr[i]
        return self._wrap(mask)

    def neighbor_configs(self, cfg):
        mask = self._mask(cfg)
        full = (1 << self.universe) - 1
        out = []
        for rem in _bits(mask):
            for add in _bits(full & ~mask):
                out.append(self._wrap(mask ^ (1 << rem) | (1 << add)))
        return sorted(out, key=self._mask)

    def random_neighbor(self, cfg, rng):
        mask = self._mask(cfg)
        ins = [i for i in _bits(mask)]
        outs = [i for i in _bits(((1 << self.universe) - 1) & ~mask)]
        rem = ins[int(rng.integers(0, len(ins)))]
        add = outs[int(rng.integers(0, len(outs)))]
        return self._wrap(mask ^ (1 << rem) | (1 << add))

    def kernel_row_config(self, cfg):
        row = [(cfg, self.weight)]
        row.extend((t, self.weight) for t in self.neighbor_configs(cfg))
        return sorted(row, key=lambda e: self._mask(e[0]))

    def claimed_nu_config(self, cfg):
        return Fraction(1, self.state_count)

    def encode(self, cfg):
        return subset_rank(tuple(_bits(self._mask(cfg))), self.universe)

    def decode(self, index):
        mask = 0
        for i in subset_unrank(index, self.universe, self.M):
            mask |= 1 << i
        return self._wrap(mask)

    def iter_configs(self):
        from itertools import combinations

        self.require_enumerable()
        for subset in combinations(range(self.universe), self.M):
            mask = 0
            for i in subset:
                mask |= 1 << i
            yield self._wrap(mask)

    def matching_coupling_configs(self, c1, c2):
        """Swap-transfer matching.  With c2 = c1 - e1 + e2, a neighbor
        c1 - rem + add stays put when rem = e1 or add = e2 (it already
        neighbors c2) and is re-routed to c2 - rem + add otherwise; the
        re-routed images differ from their sources by the e1/e2 swap, so
        each costs one step."""
        m1, m2 = self._mask(c1), self._mask(c2)
        diff_out = m1 & ~m2
        diff_in = m2 & ~m1
        if c1 == c2 or diff_out.bit_count() != 1 or diff_in.bit_count() != 1:
            raise NotAnEdge("configurations are not adjacent")
        e1 = diff_out.bit_length() - 1
        e2 = diff_in.bit_length() - 1
        w = self.weight
        pairs = [(c1, c1, w), (c2, c2, w)]
        for x1 in self.neighbor_configs(c1):
            if x1 == c2:
                continue
            xm = self._mask(x1)
            rem = (m1 & ~xm).bit_length() - 1
            add = (xm & ~m1).bit_length() - 1
            if rem == e1 or add == e2:
                pairs.append((x1, x1, w))
            else:
                pairs.append((x1, self._wrap(m2 ^ (1 << rem) | (1 << add)), w))
        return pairs


class GnmSpace(_UniformSwapSpace):
    model = "gnm"

    def __init__(self, n: int, M: int, cap: int | None = None):
        if n < 2:
            raise BadParams("need at least two vertices")
        self.n = n
        super().__init__(math.comb(n, 2), M, {"n": n, "M": M}, cap)

    def _wrap(self, mask):
        return GraphConfig(self.n, mask)

    def _mask(self, cfg):
        return cfg.mask


class HypergraphSpace(_UniformSwapSpace):
    model = "hypergraph"

    def __init__(self, n: int, k: int, M: int, cap: int | None = None):
        if not 2 <= k <= n:
            raise BadParams("need 2 <= k <= n")
        self.n = n
        self.k = k
        super().__init__(math.comb(n, k), M, {"n": n, "k": k, "M": M}, cap)

    def _wrap(self, mask):
        return HypergraphConfig(self.n, self.k, mask)

    def _mask(self, cfg):
        return cfg.mask


# ---------------------------------------------------------------------------
# d-out-regular digraphs

class DOutRegularSpace(GeometrizedSpace):
    model = "dout_regular"

    def __init__(self, n: int, d: int, cap: int | None = None):
        if not 1 <= d <= n - 2:
            raise BadParams("need 1 <= d <= n - 2")
        self.n = n
        self.d = d
        self.choices = math.comb(n - 1, d)
        self.weight = Fraction(1, n * (self.choices - 1) + 1)
        kappa = Fraction(self.choices, n * (self.choices - 1) + 1)
        super().__init__({"n": n, "d": d}, self.choices**n, kappa, cap)
        # per-vertex candidate out-sets (bitmasks), lexicographic by subset
        self._cands = []
        for v in range(n):
            others = [w for w in range(n) if w != v]
            masks = []
            for subset in _ksubsets(others, d):
                m = 0
                for w in subset:
                    m |= 1 << w
                masks.append(m)
            self._cands.append(tuple(masks))
        self._cand_rank = [
            {m: i for i, m in enumerate(cands)} for cands in self._cands]

    def sample_config(self, rng):
        outs = []
        for v in range(self.n):
            outs.append(self._cands[v][int(rng.integers(0, self.choices))])
        return DigraphConfig(self.n, tuple(outs))

    def neighbor_configs(self, cfg):
        out = []
        for v in range(self.n):
            cur = cfg.outs[v]
            for m in self._cands[v]:
                if m != cur:
                    outs = list(cfg.outs)
                    outs[v] = m
                    out.append(DigraphConfig(self.n, tuple(outs)))
        return out

    def random_neighbor(self, cfg, rng):
        while True:
            v = int(rng.integers(0, self.n))
            m = self._cands[v][int(rng.integers(0, self.choices))]
            if m != cfg.outs[v]:
                outs = list(cfg.outs)
                outs[v] = m
                return DigraphConfig(self.n, tuple(outs))

    def kernel_row_config(self, cfg):
        row = [(cfg, self.weight)]
        row.extend((t, self.weight) for t in self.neighbor_configs(cfg))
        return row

    def claimed_nu_config(self, cfg):
        return Fraction(1, self.state_count)

    def encode(self, cfg):
        r = 0
        for v in range(self.n):
            r = r * self.choices + self._cand_rank[v][cfg.outs[v]]
        return r

    def decode(self, index):
        digits = []
        for _ in range(self.n):
            index, rem = divmod(index, self.choices)
            digits.append(rem)
        digits.reverse()
        return DigraphConfig(self.n, tuple(self._cands[v][digits[v]] for v in range(self.n)))

    def iter_configs(self):
        from itertools import product

        self.require_enumerable()
        for outs in product(*self._cands):
            yield DigraphConfig(self.n, outs)

    def matching_coupling_configs(self, c1, c2):
        """Out-set-transfer matching: neighbors that redraw the separating
        vertex already neighbor c2 and stay put; a neighbor redrawing some
        other vertex u is matched to c2 with the same out-set installed at
        u, one step away."""
        diff = [v for v in range(self.n) if c1.outs[v] != c2.outs[v]]
        if len(diff) != 1:
            raise NotAnEdge("configurations are not adjacent")
        v = diff[0]
        w = self.weight
        pairs = [(c1, c1, w), (c2, c2, w)]
        for x1 in self.neighbor_configs(c1):
            if x1 == c2:
                continue
            u = next(a for a in range(self.n) if x1.outs[a] != c1.outs[a])
            if u == v:
                pairs.append((x1, x1, w))
            else:
                outs = list(c2.outs)
                outs[u] = x1.outs[u]
                pairs.append((x1, DigraphConfig(self.n, tuple(outs)), w))
        return pairs


def _ksubsets(items, k):
    from itertools import combinations

    return combinations(items, k)


# ---------------------------------------------------------------------------
# permutations under single-element reinsertion

def _remove_value(perm: tuple, val: int) -> tuple:
    return tuple(x for x in perm if x != val)


def _insert_after(reduced: tuple, val: int, slot: int) -> tuple:
    return reduced[:slot] + (val,) + reduced[slot:]


def insertion_moves(perm: tuple):
    """All distinct results of moving one value elsewhere (excludes perm)."""
    n = len(perm)
    out = set()
    for val in perm:
        reduced = _remove_value(perm, val)
        for slot in range(n):
            cand = _insert_after(reduced, val, slot)
            if cand != perm:
                out.add(cand)
    return out


def are_insertion_alike(a: tuple, b: tuple) -> bool:
    """Distinct permutations related by moving a single value."""
    if a == b:
        return False
    return any(_remove_value(a, v) == _remove_value(b, v) for v in a)


class PermInsertionSpace(GeometrizedSpace):
    model = "perm_insertion"

    def __init__(self, n: int, cap: int | None = None):
        if n < 2:
            raise BadParams("need at least two elements")
        self.n = n
        self.weight = Fraction(1, (n - 1) ** 2 + 1)
        kappa = Fraction(n, (n - 1) ** 2 + 1)
        super().__init__({"n": n}, math.factorial(n), kappa, cap)

    def sample_config(self, rng):
        return tuple(int(v) for v in rng.permutation(self.n))

    def neighbor_configs(self, cfg):
        return sorted(insertion_moves(cfg))

    def random_neighbor(self, cfg, rng):
        while True:
            val = int(rng.integers(0, self.n))
            slot = int(rng.integers(0, self.n))
            cand = _insert_after(_remove_value(cfg, val), val, slot)
            if cand != cfg:
                return cand

    def kernel_row_config(self, cfg):
        row = [(cfg, self.weight)]
        row.extend((t, self.weight) for t in self.neighbor_configs(cfg))
        return row

    def claimed_nu_config(self, cfg):
        return Fraction(1, self.state_count)

    def encode(self, cfg):
        return perm_rank(cfg)

    def decode(self, index):
        return perm_unrank(index, self.n)

    def iter_configs(self):
        from itertools import permutations

        self.require_enumerable()
        return permutations(range(self.n))

    def matching_coupling_configs(self, c1, c2):
        """Reinsertion matching: a bijection of the two closed neighborhoods
        built from fixed points and re-routed neighbors.

        First tries the strict form -- only fixed points (cost 0) and
        insertion-alike pairs (cost 1), keeping as many permutations in
        place as possible; with at least n fixed points its cost meets
        1 - n/((n-1)^2 + 1).  Where that form does not exist (it can fail
        from n = 5 on), a minimum-total-distance bijection is tried
        instead.  Raises CouplingConstructionError when no bijection
        reaches the claimed bound; the exact curvature sweep shows the
        bound itself fails on such edges."""
        if not are_insertion_alike(c1, c2):
            raise NotAnEdge("permutations are not insertion-alike")
        left = sorted({c1} | insertion_moves(c1))
        right = sorted({c2} | insertion_moves(c2))
        right_index = {p: i for i, p in enumerate(right)}
        size = len(left)
        budget = (self.n - 1) * (self.n - 2)  # steps allowed by the claimed bound
        w = self.weight

        big = 10 * size + 1  # sentinel: forbidden pair
        cost = [[big] * size for _ in range(size)]
        for i, x in enumerate(left):
            j = right_index.get(x)
            if j is not None:
                cost[i][j] = 0
            for y in right:
                if are_insertion_alike(x, y):
                    cost[i][right_index[y]] = 1
        col_of_row = _min_cost_assignment(cost)
        total = sum(cost[i][col_of_row[i]] for i in range(size))
        if total <= budget:
            return [(left[i], right[col_of_row[i]], w) for i in range(size)]

        # strict matching misses the bound; re-route at true graph distance
        g = self.graph()
        right_codes = [self.encode(y) for y in right]
        cost = [[g.distances_from(self.encode(x))[c] for c in right_codes] for x in left]
        col_of_row = _min_cost_assignment(cost)
        total = sum(cost[i][col_of_row[i]] for i in range(size))
        if total > budget:
            raise CouplingConstructionError(
                f"no neighbor bijection certifies the claimed bound at {c1} ~ {c2} "
                f"(best total distance {total} exceeds {budget})")
        return [(left[i], right[col_of_row[i]], w) for i in range(size)]


# ---------------------------------------------------------------------------
# permutations under transpositions (comparison model; no self-mass)

class PermTranspositionSpace(GeometrizedSpace):
    model = "perm_transposition"

    def __init__(self, n: int, cap: int | None = None):
        if n < 2:
            raise BadParams("need at least two elements")
        self.n = n
        self.weight = Fraction(2, n * (n - 1))
        super().__init__({"n": n}, math.factorial(n), None, cap)

    def sample_config(self, rng):
        return tuple(int(v) for v in rng.permutation(self.n))

    def neighbor_configs(self, cfg):
        out = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                out.append(_swap_values(cfg, i, j))
        return sorted(out)

    def random_neighbor(self, cfg, rng):
        i = int(rng.integers(0, self.n))
        j = int(rng.integers(0, self.n - 1))
        if j >= i:
            j += 1
        return _swap_values(cfg, i, j)

    def kernel_row_config(self, cfg):
        return [(t, self.weight) for t in self.neighbor_configs(cfg)]

    def claimed_nu_config(self, cfg):
        return Fraction(1, self.state_count)

    def encode(self, cfg):
        return perm_rank(cfg)

    def decode(self, index):
        return perm_unrank(index, self.n)

    def iter_configs(self):
        from itertools import permutations

        self.require_enumerable()
        return permutations(range(self.n))


def _swap_values(perm: tuple, a: int, b: int) -> tuple:
    # left-composition with the transposition (a b): swap the two values
    return tuple(b if x == a else a if x == b else x for x in perm)


def _min_cost_assignment(cost) -> list:
    """Minimum-cost perfect matching on a square integer matrix.

    Shortest augmenting paths with potentials; O(n^3), deterministic.
    Returns col_of_row.  Used only for the small neighbor-matching
    certificates, independently of the transport solver.
    """
    n = len(cost)
    INF = float("inf")
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)  # p[j] = row matched to column j (1-indexed; 0 = none)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = INF
            j1 = -1
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col_of_row = [0] * n
    for j in range(1, n + 1):
        if p[j]:
            col_of_row[p[j] - 1] = j - 1
    return col_of_row


# ---------------------------------------------------------------------------
# builders

def build_gnp(n: int, p, cap: int | None = None) -> GnpSpace:
    return GnpSpace(n, p, cap)


def build_gnm(n: int, M: int, cap: int | None = None) -> GnmSpace:
    return GnmSpace(n, M, cap)


def build_hypergraph(n: int, k: int, M: int, cap: int | None = None) -> HypergraphSpace:
    return HypergraphSpace(n, k, M, cap)


def build_doutregular(n: int, d: int, cap: int | None = None) -> DOutRegularSpace:
    return DOutRegularSpace(n, d, cap)


def build_permutation_insertion(n: int, cap: int | None = None) -> PermInsertionSpace:
    return PermInsertionSpace(n, cap)


def build_permutation_transposition(n: int, cap: int | None = None) -> PermTranspositionSpace:
    return PermTranspositionSpace(n, cap)


MODEL_BUILDERS = {
    "gnp": build_gnp,
    "gnm": build_gnm,
    "hypergraph": build_hypergraph,
    "dout_regular": build_doutregular,
    "perm_insertion": build_permutation_insertion,
    "perm_transposition": build_permutation_transposition,
}
