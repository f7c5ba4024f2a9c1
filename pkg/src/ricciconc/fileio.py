"""File formats: edge lists, kernel/distribution/coupling JSON, reports.

Edge lists are plain text, one `u v` pair per line with 0-based indices
and `#` comments.  Kernel JSON is an array of rows, each an array of
[state, weight] pairs; distributions use the same pair-array shape;
couplings are arrays of [x, y, weight] triples.  Weights serialize as
floats, or as "p/q" strings in rational mode.
"""

import json

from .numeric import number_from_json, number_to_json
from .state_space import SparseDistribution, StateGraph, WalkKernel
from .transport import Coupling


def load_edge_list(path) -> StateGraph:
    """Graph from text; state count is the largest endpoint + 1."""
    edges = []
    top = -1
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {raw!r}")
            u, v = int(parts[0]), int(parts[1])
            edges.append((u, v))
            top = max(top, u, v)
    if top < 0:
        raise ValueError(f"{path}: no edges found")
    return StateGraph(top + 1, edges)


def save_edge_list(path, g: StateGraph) -> None:
    with open(path, "w") as fh:
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")


def distribution_to_obj(dist: SparseDistribution):
    return [[s, number_to_json(w)] for s, w in dist.items()]


def distribution_from_obj(obj) -> SparseDistribution:
    return SparseDistribution([(int(s), number_from_json(w)) for s, w in obj])


def load_distribution(path) -> SparseDistribution:
    with open(path) as fh:
        return distribution_from_obj(json.load(fh))


def save_distribution(path, dist: SparseDistribution) -> None:
    write_json(path, distribution_to_obj(dist))


def kernel_to_obj(m: WalkKernel):
    return [distribution_to_obj(row) for row in m.rows]


def kernel_from_obj(obj) -> WalkKernel:
    return WalkKernel([distribution_from_obj(row) for row in obj])


def load_kernel(path) -> WalkKernel:
    with open(path) as fh:
        return kernel_from_obj(json.load(fh))


def save_kernel(path, m: WalkKernel) -> None:
    write_json(path, kernel_to_obj(m))


def coupling_to_obj(A: Coupling):
    return [[x, y, number_to_json(w)] for (x, y), w in A.items()]


def coupling_from_obj(obj) -> Coupling:
    return Coupling.from_triples([(int(x), int(y), number_from_json(w)) for x, y, w in obj])


def load_coupling(path) -> Coupling:
    with open(path) as fh:
        return coupling_from_obj(json.load(fh))


def save_coupling(path, A: Coupling) -> None:
    write_json(path, coupling_to_obj(A))


def dumps_json(obj) -> str:
    """Canonical rendering: sorted keys, stable separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_json(obj))
