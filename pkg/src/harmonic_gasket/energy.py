"""Level-m vertex sets, graph energies, harmonic extension, and the
harmonic embedding of the gasket.

Vertex identity is exact: two word addresses name the same vertex iff the
rational coordinates of their images coincide.  Cells are enumerated in
word-lexicographic order throughout, which fixes the traversal order of all
floating-point sums.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import geometry
from .errors import ResourceGuardError

#: cap on n^m * n exact points built at once
CELL_POINT_CAP = 2_000_000


def _guard(n: int, m: int) -> None:
    if m < 0:
        raise ValueError("level m must be >= 0")
    if n ** m * n > CELL_POINT_CAP:
        raise ResourceGuardError(f"level {m} needs {n ** m} cells of {n} points")


def energy_scale(n: int, m: int) -> float:
    return ((n + 2) / n) ** m


@dataclass
class LevelGraph:
    """Deduplicated scale-m vertices with the intra-cell adjacency."""

    n: int
    m: int
    coords: str
    vertices: list[tuple]            # exact stored coordinates, keyed order
    cell_vertices: np.ndarray        # (n^m, n) vertex indices, lex word order
    edges: np.ndarray                # (n_edges, 2) unique vertex-index pairs

    @property
    def index(self) -> dict:
        return {key: i for i, key in enumerate(self.vertices)}

    def float_points(self) -> np.ndarray:
        return np.stack(
            [geometry.to_float_point(np.array(v, dtype=object)) for v in self.vertices]
        )


def exact_cells(n: int, m: int, coords: str = "euclidean") -> list[list[np.ndarray]]:
    """Exact vertex images [F_w(p_1)..F_w(p_N)] (or S_w) for all |w| = m,
    in word-lexicographic order."""
    _guard(n, m)
    make = geometry.f_map if coords == "euclidean" else geometry.s_map
    if coords not in ("euclidean", "harmonic"):
        raise ValueError(f"unknown coordinate system {coords!r}")
    cells = [[geometry.vertex(n, j) for j in range(1, n + 1)]]
    for _ in range(m):
        maps = [make(n, j) for j in range(1, n + 1)]
        cells = [[f(pt) for pt in cell] for f in maps for cell in cells]
    return cells


def vertices_at_level(n: int, m: int, coords: str = "euclidean") -> LevelGraph:
    """Deduplicated V_m with the ~_m relation; asserts no vertex pair is
    shared by two cells (true for gaskets)."""
    cells = exact_cells(n, m, coords)
    index: dict[tuple, int] = {}
    cell_vertices = np.empty((len(cells), n), dtype=np.int64)
    for ci, cell in enumerate(cells):
        for vi, pt in enumerate(cell):
            key = geometry.vec_key(pt)
            cell_vertices[ci, vi] = index.setdefault(key, len(index))
    edges_seen: dict[tuple[int, int], int] = {}
    for row in cell_vertices:
        for a, b in itertools.combinations(sorted(row.tolist()), 2):
            edges_seen[(a, b)] = edges_seen.get((a, b), 0) + 1
    assert all(c == 1 for c in edges_seen.values()), "cells share an edge"
    vertices = [None] * len(index)
    for key, i in index.items():
        vertices[i] = key
    edges = np.array(sorted(edges_seen), dtype=np.int64).reshape(-1, 2)
    return LevelGraph(n=n, m=m, coords=coords, vertices=vertices,
                      cell_vertices=cell_vertices, edges=edges)


def energy(graph: LevelGraph, u: np.ndarray, v: np.ndarray | None = None) -> float:
    """Graph energy ((N+2)/N)^m sum_{p ~_m q} (u(p)-u(q)) (v(p)-v(q)),
    with compensated summation over the fixed edge order."""
    u = np.asarray(u, dtype=float)
    v = u if v is None else np.asarray(v, dtype=float)
    if u.shape != (len(graph.vertices),) or v.shape != u.shape:
        raise ValueError("function not defined on all scale-m vertices")
    a, b = graph.edges[:, 0], graph.edges[:, 1]
    terms = (u[a] - u[b]) * (v[a] - v[b])
    return energy_scale(graph.n, graph.m) * math.fsum(terms.tolist())


def harmonic_cell_values(n: int, boundary: np.ndarray, m: int) -> np.ndarray:
    """Values of the harmonic extension on every scale-m cell.

    boundary has shape (n,) or (n, k) for a batch; the result has shape
    (n^m, n) or (n^m, n, k), rows in word-lexicographic order, with
    values(w.j) = H_j values(w).
    """
    _guard(n, m)
    h = [np.array([[float(x) for x in row] for row in geometry.h_matrix(n, j)])
         for j in range(1, n + 1)]
    vals = np.asarray(boundary, dtype=float)[None, ...]
    for _ in range(m):
        vals = np.stack([np.einsum("ab,wb...->wa...", hj, vals) for hj in h],
                        axis=1).reshape((-1,) + vals.shape[1:])
    return vals


def cell_energy(n: int, m: int, cell_values: np.ndarray) -> np.ndarray:
    """Energy from per-cell values of shape (n^m, n) or (n^m, n, k); no
    vertex deduplication is needed because edges are intra-cell."""
    total = np.zeros(cell_values.shape[2:])
    for a, b in itertools.combinations(range(n), 2):
        diff = cell_values[:, a, ...] - cell_values[:, b, ...]
        total = total + np.sum(diff * diff, axis=0)
    return energy_scale(n, m) * total


def harmonic_extend(n: int, boundary, m: int,
                    graph: LevelGraph | None = None) -> np.ndarray:
    """Harmonic extension of boundary values to V_m, returned aligned with
    graph.vertices; shared vertices are checked for consistency."""
    if graph is None:
        graph = vertices_at_level(n, m)
    cell_vals = harmonic_cell_values(n, np.asarray(boundary, dtype=float), m)
    out = np.full(len(graph.vertices), np.nan)
    for ci in range(cell_vals.shape[0]):
        for vi in range(n):
            idx = graph.cell_vertices[ci, vi]
            val = cell_vals[ci, vi]
            if np.isnan(out[idx]):
                out[idx] = val
            elif abs(out[idx] - val) > 1e-9 * max(1.0, abs(val)):
                raise AssertionError("harmonic extension inconsistent on shared vertex")
    return out


def restrict(coarse: LevelGraph, fine: LevelGraph, u_fine: np.ndarray) -> np.ndarray:
    """Restriction of a function on V_{m'} to V_m, matching exact coordinates."""
    fine_index = fine.index
    return np.array([u_fine[fine_index[key]] for key in coarse.vertices])


# ---------------------------------------------------------------------------
# the harmonic embedding

def psi_cells_exact(n: int, m: int) -> list[list[np.ndarray]]:
    """Exact stored harmonic coordinates of every scale-m cell vertex,
    assembled from rows of the H-matrix products (the indicator harmonic
    functions), in word-lexicographic order."""
    _guard(n, m)
    h = [geometry.h_matrix(n, j) for j in range(1, n + 1)]
    third = Fraction(1, n)
    # values on cell w.j are H_j (values on cell w): append the last letter,
    # which is the lexicographically least significant position
    mats = [geometry.frac_eye(n)]
    for _ in range(m):
        mats = [hj @ mw for mw in mats for hj in h]
    out = []
    for mw in mats:
        out.append([mw[i, :] - third for i in range(n)])
    return out


def psi_embed(n: int, m: int) -> dict[tuple, tuple]:
    """Map from exact Euclidean vertex coordinates on V_m to exact stored
    harmonic coordinates; consistency across shared vertices is asserted."""
    euclid = exact_cells(n, m, "euclidean")
    psi = psi_cells_exact(n, m)
    out: dict[tuple, tuple] = {}
    for cell_e, cell_p in zip(euclid, psi):
        for pt_e, pt_p in zip(cell_e, cell_p):
            key = geometry.vec_key(pt_e)
            val = geometry.vec_key(pt_p)
            if out.setdefault(key, val) != val:
                raise AssertionError("harmonic embedding inconsistent on shared vertex")
    return out


def psi_conjugacy_exact(n: int, m: int) -> bool:
    """Exact check that the harmonic embedding of F_w(p_i) equals S_w(p_i)
    for every |w| <= m."""
    for level in range(m + 1):
        harm = exact_cells(n, level, "harmonic")
        psi = psi_cells_exact(n, level)
        for cell_s, cell_p in zip(harm, psi):
            for pt_s, pt_p in zip(cell_s, cell_p):
                if not np.array_equal(pt_s, pt_p):
                    return False
    return True
