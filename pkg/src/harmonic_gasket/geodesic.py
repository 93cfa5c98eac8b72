"""Cell-level geodesic arcs, the level-m geodesic graph, shortest paths,
and the metric-weighted length integral.

Every arc is an affine image of the single boundary arc: the arc between
vertices j and k is its image under the orthogonal vertex permutation, and
the arc inside cell w is the further image under S_w.  Arc addresses
(word, (j, k)) order paths deterministically when lengths tie.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import derham, energy, geometry, kusuoka
from .errors import InvalidPairError, ResourceGuardError

#: cap on n^m * C(n,2) arcs in one graph
EDGE_CAP = 500_000


def _perm_index(n: int, j: int, k: int) -> np.ndarray:
    """Coordinate gather indices realizing the vertex permutation with
    sigma(1) = j, sigma(2) = k on float point arrays."""
    sigma = geometry.symmetry_permutation(n, j, k)
    inv = np.empty(n, dtype=np.int64)
    for i, target in enumerate(sigma):
        inv[target - 1] = i
    return inv


def arc_gamma_jk(n: int, j: int, k: int, depth: int) -> np.ndarray:
    """Polyline of the geodesic arc from p_k to p_j: the image of the
    boundary arc under the orthogonal symmetry taking (p_1, p_2) to
    (p_j, p_k).  Shape (2^depth + 1, N), ambient actual coordinates."""
    if j == k:
        raise InvalidPairError("need j != k")
    base = derham.gamma_polyline(n, depth)
    return base[:, _perm_index(n, j, k)]


def cell_arc(n: int, word, j: int, k: int, depth: int) -> np.ndarray:
    """Polyline of S_w(arc from p_k to p_j)."""
    word = geometry.check_word(n, word)
    arc = arc_gamma_jk(n, j, k, depth)
    for letter in reversed(word):
        a, b = geometry.s_map(n, letter).as_float()
        arc = arc @ a.T + b
    return arc


def cell_arc_length(n: int, word, j: int, k: int, depth: int) -> float:
    return derham.polyline_length(cell_arc(n, word, j, k, depth))


@dataclass(frozen=True)
class GraphEdge:
    u: int
    v: int          # vertex indices with arc running from u (= p_k side) to v
    weight: float
    word: tuple[int, ...]
    pair: tuple[int, int]   # (j, k) with j < k


@dataclass
class GeodesicGraph:
    n: int
    m: int
    depth: int
    vertices: list[tuple]    # exact stored harmonic coordinates
    coords: np.ndarray       # (V, N) float actual coordinates
    edges: list[GraphEdge]
    adj: dict[int, list[tuple[int, float, tuple, bool]]]
    # adj entries: (neighbor, weight, address=(word, pair), traversed_reversed)

    @property
    def index(self) -> dict:
        return {key: i for i, key in enumerate(self.vertices)}

    def vertex_of(self, word, j: int) -> int:
        """Index of S_w(p_j) in this graph."""
        word = geometry.check_word(self.n, word)
        pt = geometry.compose_word(self.n, word, "S")(geometry.vertex(self.n, j))
        return self.index[geometry.vec_key(pt)]


def build_geodesic_graph(n: int, m: int, depth: int) -> GeodesicGraph:
    """Level-m geodesic graph on the harmonic scale-m vertices: one edge per
    (cell, vertex pair), weighted by the depth-refined arc length."""
    if m < 0:
        raise ValueError("level m must be >= 0")
    n_edges = n ** m * n * (n - 1) // 2
    if n_edges > EDGE_CAP:
        raise ResourceGuardError(f"{n_edges} arcs exceed the cap")
    cells = energy.exact_cells(n, m, "harmonic")
    words = list(itertools.product(range(1, n + 1), repeat=m))
    index: dict[tuple, int] = {}
    cell_idx = np.empty((len(cells), n), dtype=np.int64)
    for ci, cell in enumerate(cells):
        for vi, pt in enumerate(cell):
            cell_idx[ci, vi] = index.setdefault(geometry.vec_key(pt), len(index))
    vertices = [None] * len(index)
    for key, i in index.items():
        vertices[i] = key
    coords = np.stack(
        [geometry.to_float_point(np.array(v, dtype=object)) for v in vertices]
    )
    # arc lengths: map the base-arc chords through the cell's linear part
    base_diffs = {
        (j, k): np.diff(arc_gamma_jk(n, j, k, depth), axis=0)
        for j, k in itertools.combinations(range(1, n + 1), 2)
    }
    linear_parts = [np.eye(n)]
    for letter_block in range(m):
        mats = [geometry.s_map(n, j).as_float()[0] for j in range(1, n + 1)]
        linear_parts = [a @ lp for a in mats for lp in linear_parts]
    # first-letter-major ordering above matches the lexicographic word order
    edges: list[GraphEdge] = []
    adj: dict[int, list] = {i: [] for i in range(len(vertices))}
    for ci, word in enumerate(words):
        lp = linear_parts[ci]
        for (j, k), diffs in base_diffs.items():
            length = float(np.sum(np.linalg.norm(diffs @ lp.T, axis=1)))
            u = int(cell_idx[ci, k - 1])   # arc runs p_k -> p_j
            v = int(cell_idx[ci, j - 1])
            edge = GraphEdge(u=u, v=v, weight=length, word=word, pair=(j, k))
            edges.append(edge)
            addr = (word, (j, k))
            adj[u].append((v, length, addr, False))
            adj[v].append((u, length, addr, True))
    return GeodesicGraph(n=n, m=m, depth=depth, vertices=vertices,
                         coords=coords, edges=edges, adj=adj)


@dataclass(frozen=True)
class GeodesicPath:
    """Shortest path as an ordered list of oriented arcs."""

    length: float
    vertex_indices: tuple[int, ...]
    arcs: tuple[tuple[tuple[int, ...], tuple[int, int], bool], ...]
    # each arc: (word, (j, k), reversed) -- reversed means traversed p_j -> p_k


def shortest_path(graph: GeodesicGraph, src: int, dst: int) -> GeodesicPath:
    """Dijkstra with deterministic tie-breaking: among equal-length paths
    the lexicographically smallest arc-address sequence wins."""
    if not (0 <= src < len(graph.vertices) and 0 <= dst < len(graph.vertices)):
        raise KeyError("vertex not present at this level")
    if src == dst:
        return GeodesicPath(length=0.0, vertex_indices=(src,), arcs=())
    best: dict[int, tuple[float, tuple]] = {}
    heap = [(0.0, (), src, (src,), ())]
    while heap:
        dist, addrs, u, vseq, arcs = heapq.heappop(heap)
        if u == dst:
            return GeodesicPath(length=dist, vertex_indices=vseq, arcs=arcs)
        if u in best and (best[u][0], best[u][1]) < (dist, addrs):
            continue
        for v, w, addr, rev in graph.adj[u]:
            cand = (dist + w, addrs + (addr,))
            if v not in best or cand < best[v]:
                best[v] = cand
                heapq.heappush(
                    heap,
                    (cand[0], cand[1], v, vseq + (v,), arcs + ((addr[0], addr[1], rev),)),
                )
    raise KeyError("no path found (graph should be connected)")


def distance_matrix(graph: GeodesicGraph) -> np.ndarray:
    """All-pairs shortest-path distances over the arc weights."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path as sp

    nv = len(graph.vertices)
    rows = [e.u for e in graph.edges] + [e.v for e in graph.edges]
    cols = [e.v for e in graph.edges] + [e.u for e in graph.edges]
    data = [e.weight for e in graph.edges] * 2
    dmat = sp(csr_matrix((data, (rows, cols)), shape=(nv, nv)), method="D",
              directed=False)
    # summation order can differ per direction; restore exact symmetry
    return np.minimum(dmat, dmat.T)


def path_polyline(n: int, path: GeodesicPath, depth: int) -> np.ndarray:
    """Densified polyline of a path at the given per-arc refinement depth."""
    pieces = []
    for word, (j, k), rev in path.arcs:
        arc = cell_arc(n, word, j, k, depth)
        if rev:
            arc = arc[::-1]
        pieces.append(arc if not pieces else arc[1:])
    return np.concatenate(pieces)


def junction_angles(n: int, path: GeodesicPath, depth: int) -> np.ndarray:
    """Angle between incoming and outgoing one-sided chord tangents at every
    interior junction of a path, at the given refinement depth."""
    angles = []
    prev_dir = None
    for word, (j, k), rev in path.arcs:
        arc = cell_arc(n, word, j, k, depth)
        if rev:
            arc = arc[::-1]
        first = arc[1] - arc[0]
        last = arc[-1] - arc[-2]
        if prev_dir is not None:
            cosang = np.clip(
                prev_dir @ first / (np.linalg.norm(prev_dir) * np.linalg.norm(first)),
                -1.0, 1.0,
            )
            angles.append(float(np.arccos(cosang)))
        prev_dir = last
    return np.array(angles)


def gamma_junction_angle(n: int, depth: int) -> float:
    """C1-junction diagnostic inside the boundary arc itself: the angle at
    the common point of its two half-arcs at the given depth."""
    pts = derham.gamma_polyline(n, depth)
    mid = len(pts) // 2
    incoming = pts[mid] - pts[mid - 1]
    outgoing = pts[mid + 1] - pts[mid]
    cosang = np.clip(
        incoming @ outgoing / (np.linalg.norm(incoming) * np.linalg.norm(outgoing)),
        -1.0, 1.0,
    )
    return float(np.arccos(cosang))


# ---------------------------------------------------------------------------
# the metric-weighted length integral

def _segment_word(n: int, pair: tuple[int, int], seg_index: int, digits: int) -> tuple:
    """Word address (letters of the pair) of dyadic segment seg_index among
    2^digits, ordered from the p_k end of the arc."""
    j, k = pair
    word = []
    for bit in range(digits - 1, -1, -1):
        word.append(j if (seg_index >> bit) & 1 else k)
    return tuple(word)


def arc_metric_integral(n: int, word, j: int, k: int, depth: int,
                        panels: int, use_identity: bool = False) -> float:
    """Composite approximation of the length integral
    int <g'(t), Z(g(t)) g'(t)>^{1/2} dt along the arc S_w(arc_jk): the
    depth-refined polyline chords are weighted by Z evaluated at the word
    address of the panel containing each chord.  With use_identity the
    metric is replaced by the identity, which reduces to the polyline
    length."""
    word = geometry.check_word(n, word)
    digits = int(round(math.log2(panels)))
    if 2 ** digits != panels or digits > depth:
        raise ValueError("panels must be a power of two, at most 2^depth")
    arc = cell_arc(n, word, j, k, depth)
    diffs = np.diff(arc, axis=0)
    q = geometry.y_basis(n)
    diffs_b = diffs @ q
    per_panel = 2 ** (depth - digits)
    terms = []
    for p in range(panels):
        seg = diffs_b[p * per_panel:(p + 1) * per_panel]
        if use_identity:
            terms.extend(np.linalg.norm(seg, axis=1).tolist())
            continue
        z_word = word + _segment_word(n, (j, k), p, digits)
        z = kusuoka.z_approx(n, z_word).matrix
        terms.extend(np.sqrt(np.einsum("si,ij,sj->s", seg, z, seg)).tolist())
    return math.fsum(terms)


def gamma_metric_integral(n: int, depth: int, panels: int,
                          use_identity: bool = False) -> float:
    """Metric-integral length of the boundary arc itself."""
    return arc_metric_integral(n, (), 1, 2, depth, panels,
                               use_identity=use_identity)


def path_metric_integral(n: int, path: GeodesicPath, depth: int,
                         panels: int) -> float:
    """Metric-integral length of a concatenated geodesic path."""
    if not path.arcs:
        raise ValueError("path has no arcs")
    return math.fsum(
        arc_metric_integral(n, word, j, k, depth, panels)
        for word, (j, k), _rev in path.arcs
    )
