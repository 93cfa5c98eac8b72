"""Exact simplex geometry in the zero-sum hyperplane Y.

Points and directions are stored as sqrt(2)-scaled rational coordinate
vectors: the actual point in R^N is the stored vector divided by sqrt(2).
With that convention the vertices, the Euclidean maps F_j, the harmonic
affine maps S_j, the contraction matrices T_j and the harmonic-extension
matrices H_j all have exact rational coefficients, so compositions along
words and the conjugacy identities can be checked without drift.

Inner products of actual points are stored dot products divided by 2.
Word composition follows F_w = F_{w_1} o ... o F_{w_m} and
T_w = T_{w_1} ... T_{w_m}; H products run in the opposite order because
values on cell w.j are H_j applied to values on cell w.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    AmbiguousAddressError,
    InvalidDimensionError,
    InvalidLetterError,
    InvalidPairError,
)

SQRT2 = float(np.sqrt(2.0))

Word = tuple[int, ...]


def check_dimension(n: int) -> None:
    if n < 2:
        raise InvalidDimensionError("N must be >= 2")


def check_letter(n: int, j: int) -> None:
    if not 1 <= j <= n:
        raise InvalidLetterError(f"letter {j} outside 1..{n}")


def check_word(n: int, word) -> Word:
    word = tuple(int(j) for j in word)
    for j in word:
        check_letter(n, j)
    return word


# ---------------------------------------------------------------------------
# exact rational vectors / matrices (numpy object arrays of Fraction)

def frac_vec(values) -> np.ndarray:
    return np.array([Fraction(v) for v in values], dtype=object)


def frac_eye(n: int) -> np.ndarray:
    m = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        m[i, i] = Fraction(1)
    return m


def frac_zeros(n: int) -> np.ndarray:
    return np.full(n, Fraction(0), dtype=object)


def dot_actual(u: np.ndarray, v: np.ndarray) -> Fraction:
    """Actual-unit inner product of two stored vectors."""
    return Fraction(np.dot(u, v)) / 2


def to_float_point(u: np.ndarray) -> np.ndarray:
    """Stored rational vector -> actual-unit float coordinates."""
    return np.array([float(x) for x in u], dtype=float) / SQRT2


def vec_key(u: np.ndarray) -> tuple:
    """Hashable exact identity of a stored vector."""
    return tuple(u)


@dataclass(frozen=True)
class AffineMapQ:
    """Exact affine map x -> linear @ x + translation on stored coordinates."""

    linear: np.ndarray
    translation: np.ndarray

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.linear @ x + self.translation

    def compose(self, other: "AffineMapQ") -> "AffineMapQ":
        """self o other."""
        return AffineMapQ(
            self.linear @ other.linear,
            self.linear @ other.translation + self.translation,
        )

    def as_float(self) -> tuple[np.ndarray, np.ndarray]:
        a = np.array([[float(x) for x in row] for row in self.linear])
        b = np.array([float(x) for x in self.translation]) / SQRT2
        return a, b


def identity_map(n: int) -> AffineMapQ:
    return AffineMapQ(frac_eye(n), frac_zeros(n))


# ---------------------------------------------------------------------------
# simplex vertices and the four map families

@lru_cache(maxsize=None)
def _vertices(n: int) -> tuple[np.ndarray, ...]:
    check_dimension(n)
    out = []
    for j in range(n):
        v = np.full(n, Fraction(-1, n), dtype=object)
        v[j] = v[j] + 1
        out.append(v)
    return tuple(out)


def simplex_vertices(n: int) -> list[np.ndarray]:
    """Stored coordinates of the N regular-simplex vertices (unit side)."""
    return [v.copy() for v in _vertices(n)]


def vertex(n: int, j: int) -> np.ndarray:
    check_letter(n, j)
    return _vertices(n)[j - 1].copy()


@lru_cache(maxsize=None)
def _t_matrix(n: int, j: int) -> np.ndarray:
    check_letter(n, j)
    p = _vertices(n)[j - 1]
    m = frac_eye(n) * Fraction(1, n + 2)
    scale = Fraction(n, n + 2)
    for a in range(n):
        for b in range(n):
            m[a, b] += scale * p[a] * p[b]
    return m


def t_matrix(n: int, j: int) -> np.ndarray:
    """Exact ambient matrix of T_j: eigenvalue N/(N+2) on span(p_j),
    1/(N+2) on its orthogonal complement in Y."""
    return _t_matrix(n, j).copy()


def f_map(n: int, j: int) -> AffineMapQ:
    """F_j(x) = (x - p_j)/2 + p_j."""
    check_letter(n, j)
    p = _vertices(n)[j - 1]
    half = Fraction(1, 2)
    return AffineMapQ(frac_eye(n) * half, p * half)


def s_map(n: int, j: int) -> AffineMapQ:
    """S_j(x) = T_j(x - p_j) + p_j."""
    check_letter(n, j)
    p = _vertices(n)[j - 1]
    t = _t_matrix(n, j)
    return AffineMapQ(t, p - t @ p)


def s_apply_closed_form(n: int, j: int, x: np.ndarray) -> np.ndarray:
    """The equivalent closed form of S_j, used to cross-check s_map."""
    check_letter(n, j)
    p = _vertices(n)[j - 1]
    coef = 2 + (n - 1) * dot_actual(x, p) / dot_actual(p, p)
    return (x + coef * p) / (n + 2)


@lru_cache(maxsize=None)
def _h_matrix(n: int, j: int) -> np.ndarray:
    check_letter(n, j)
    m = np.full((n, n), Fraction(1, n + 2), dtype=object)
    m[0, :] = Fraction(0)
    m[0, 0] = Fraction(1)
    for a in range(1, n):
        m[a, 0] = Fraction(2, n + 2)
        m[a, a] += Fraction(1, n + 2)
    if j == 1:
        return m
    # conjugate with the cyclic permutation sending vertex 1 to vertex j
    shift = j - 1
    out = np.full((n, n), Fraction(0), dtype=object)
    for a in range(n):
        for b in range(n):
            out[(a + shift) % n, (b + shift) % n] = m[a, b]
    return out


def h_matrix(n: int, j: int) -> np.ndarray:
    """Row-stochastic matrix sending boundary values on V_0 to values on
    F_j(V_0); H_1 is the (1/(N+2)) [[N+2, 0], [2, I+J]] block matrix and the
    others are its cyclic conjugates."""
    return _h_matrix(n, j).copy()


def compose_word(n: int, word, family: str):
    """Compose maps/matrices along a word.

    family 'F'/'S' returns an AffineMapQ with F_w = F_{w_1} o ... o F_{w_m};
    'T' returns the matrix product T_{w_1} ... T_{w_m};
    'H' returns H_{w_m} ... H_{w_1} (values on cell w from boundary values).
    """
    word = check_word(n, word)
    if family in ("F", "S"):
        make = f_map if family == "F" else s_map
        out = identity_map(n)
        for j in word:
            out = out.compose(make(n, j))
        return out
    if family == "T":
        out = frac_eye(n)
        for j in word:
            out = out @ _t_matrix(n, j)
        return out
    if family == "H":
        out = frac_eye(n)
        for j in word:
            out = _h_matrix(n, j) @ out
        return out
    raise ValueError(f"unknown family {family!r}")


def point_of_word(n: int, word, coords: str = "euclidean") -> np.ndarray:
    """Image of the simplex barycenter under F_w or S_w (stored coords)."""
    word = check_word(n, word)
    if not word:
        raise AmbiguousAddressError("empty word does not address a point")
    if coords not in ("euclidean", "harmonic"):
        raise ValueError(f"unknown coordinate system {coords!r}")
    family = "F" if coords == "euclidean" else "S"
    return compose_word(n, word, family)(frac_zeros(n))


# ---------------------------------------------------------------------------
# the fixed orthonormal basis of Y and operators expressed in it

@lru_cache(maxsize=None)
def y_basis(n: int) -> np.ndarray:
    """Orthonormal basis of Y as columns of an N x (N-1) float matrix,
    built by orthonormalizing p_1 - p_N, ..., p_{N-1} - p_N."""
    check_dimension(n)
    verts = [to_float_point(v) for v in _vertices(n)]
    diffs = np.stack([verts[i] - verts[n - 1] for i in range(n - 1)], axis=1)
    q, r = np.linalg.qr(diffs)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs
    q.setflags(write=False)
    return q


def operator_in_basis(n: int, ambient: np.ndarray) -> np.ndarray:
    """(N-1) x (N-1) matrix of an ambient-coordinate linear map restricted
    to Y, in the fixed orthonormal basis."""
    q = y_basis(n)
    a = np.array([[float(x) for x in row] for row in ambient])
    return q.T @ a @ q


@lru_cache(maxsize=None)
def _t_operator(n: int, j: int) -> np.ndarray:
    m = operator_in_basis(n, _t_matrix(n, j))
    m.setflags(write=False)
    return m


def t_operator(n: int, j: int) -> np.ndarray:
    """Float matrix of T_j in the fixed orthonormal basis of Y."""
    check_letter(n, j)
    return _t_operator(n, j).copy()


def point_in_basis(n: int, stored: np.ndarray) -> np.ndarray:
    """Basis coordinates of a stored rational point."""
    return y_basis(n).T @ to_float_point(stored)


def hs_norm_sq_exact(n: int, ambient: np.ndarray) -> Fraction:
    """Exact squared Hilbert-Schmidt norm over Y of an exact ambient matrix
    that preserves Y: trace(Pi_Y M^t M) with Pi_Y = I - J/N."""
    mt_m = ambient.T @ ambient
    total = Fraction(0)
    colsum = Fraction(0)
    for a in range(n):
        total += mt_m[a, a]
        for b in range(n):
            colsum += mt_m[a, b]
    return total - colsum / n


# ---------------------------------------------------------------------------
# the plane P through p_1, p_2 and the projection Pi

@dataclass(frozen=True)
class PlaneP:
    """Plane spanned by p_1, p_2 with orthonormal axes e1 = p_1 - p_2 and
    e2 = sqrt(N/(N-2)) (p_1 + p_2); for N = 2 the plane degenerates to the
    line through p_1, p_2 and e2 is absent."""

    n: int
    e1: np.ndarray
    e2: np.ndarray | None
    p: np.ndarray | None  # common projection of p_3..p_N, in P coordinates

    def project(self, points: np.ndarray) -> np.ndarray:
        """Actual-unit ambient points (..., N) -> P coordinates (..., 2)."""
        pts = np.asarray(points, dtype=float)
        c1 = pts @ self.e1
        if self.e2 is None:
            return np.stack([c1, np.zeros_like(c1)], axis=-1)
        return np.stack([c1, pts @ self.e2], axis=-1)


@lru_cache(maxsize=None)
def plane_p(n: int) -> PlaneP:
    check_dimension(n)
    p1 = to_float_point(_vertices(n)[0])
    p2 = to_float_point(_vertices(n)[1])
    e1 = p1 - p2
    if n == 2:
        return PlaneP(n=2, e1=e1, e2=None, p=None)
    e2 = np.sqrt(n / (n - 2)) * (p1 + p2)
    p3 = to_float_point(_vertices(n)[2])
    p = np.array([p3 @ e1, p3 @ e2])
    return PlaneP(n=n, e1=e1, e2=e2, p=p)


# ---------------------------------------------------------------------------
# orthogonal symmetries permuting the vertices

def symmetry_permutation(n: int, j: int, k: int) -> tuple[int, ...]:
    """Deterministic permutation sigma of {1..N} with sigma(1) = j,
    sigma(2) = k; remaining letters in increasing order."""
    check_letter(n, j)
    check_letter(n, k)
    if j == k:
        raise InvalidPairError("need j != k")
    rest = [i for i in range(1, n + 1) if i not in (j, k)]
    return (j, k, *rest)


def symmetry_transform(n: int, j: int, k: int) -> np.ndarray:
    """Exact orthogonal map of Y (ambient permutation matrix) taking
    p_1 -> p_j and p_2 -> p_k while permuting the vertex set."""
    sigma = symmetry_permutation(n, j, k)
    m = np.full((n, n), Fraction(0), dtype=object)
    for i, target in enumerate(sigma):
        m[target - 1, i] = Fraction(1)
    return m
