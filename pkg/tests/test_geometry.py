"""Exact simplex geometry, map families, and basis utilities."""
import itertools
from fractions import Fraction

import numpy as np
import pytest

from harmonic_gasket import geometry
from harmonic_gasket.errors import (
    AmbiguousAddressError,
    InvalidDimensionError,
    InvalidLetterError,
    InvalidPairError,
)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_vertices_centered_unit_simplex(n):
    verts = geometry.simplex_vertices(n)
    total = sum(verts)
    assert all(x == 0 for x in total)
    for i, j in itertools.combinations(range(n), 2):
        diff = verts[i] - verts[j]
        assert geometry.dot_actual(diff, diff) == 1  # side length 1


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_t_matrix_spectral_action(n):
    # T_j has eigenvalue N/(N+2) along p_j and 1/(N+2) on the rest of Y
    for j in range(1, n + 1):
        t = geometry.t_matrix(n, j)
        pj = geometry.vertex(n, j)
        assert np.array_equal(t @ pj, geometry.frac_vec(
            [Fraction(n, n + 2) * x for x in pj]))
        if n >= 3:  # Y has no direction transverse to p_j when N = 2
            other = geometry.vertex(n, j % n + 1) - geometry.vertex(n, (j + 1) % n + 1)
            assert np.array_equal(t @ other, geometry.frac_vec(
                [Fraction(1, n + 2) * x for x in other]))


@pytest.mark.parametrize("n", range(2, 9))
def test_hs_norm_exact(n):
    for j in range(1, n + 1):
        norm_sq = geometry.hs_norm_sq_exact(n, geometry.t_matrix(n, j))
        assert norm_sq == Fraction(n - 1, n + 2)


@pytest.mark.parametrize("n", range(2, 9))
def test_partition_identity_exact_on_y(n):
    # ((N+2)/N) sum_j T_j T_j^t acts as the identity on Y
    acc = geometry.frac_zeros(n) @ geometry.frac_zeros(n)
    acc = np.full((n, n), Fraction(0), dtype=object)
    for j in range(1, n + 1):
        t = geometry.t_matrix(n, j)
        acc = acc + t @ t.T
    acc = acc * Fraction(n + 2, n)
    eye = geometry.frac_eye(n)
    proj_y = eye - np.full((n, n), Fraction(1, n), dtype=object)
    assert np.array_equal(acc @ proj_y, proj_y)


def test_f_map_fixed_points_and_contraction():
    n = 3
    for j in range(1, n + 1):
        f = geometry.f_map(n, j)
        pj = geometry.vertex(n, j)
        assert np.array_equal(f(pj), pj)
        # ratio 1/2 toward p_j
        other = geometry.vertex(n, j % n + 1)
        mid = geometry.frac_vec([(a + b) / 2 for a, b in zip(pj, other)])
        assert np.array_equal(f(other), mid)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_s_map_matches_closed_form(n):
    rng = np.random.default_rng(0)
    for j in range(1, n + 1):
        for _ in range(5):
            x = geometry.frac_vec(
                [Fraction(int(v), 64) for v in rng.integers(-64, 64, n)])
            x = x - geometry.frac_vec([sum(x) / n] * n)  # project into Y
            assert np.array_equal(
                geometry.s_map(n, j)(x), geometry.s_apply_closed_form(n, j, x))


def test_s_map_known_values():
    # S_1 p_2 = (p_1 + p_2)/(N+2) and S_1 0 = 2 p_1/(N+2)
    for n in (2, 3, 4):
        p1, p2 = geometry.vertex(n, 1), geometry.vertex(n, 2)
        s1 = geometry.s_map(n, 1)
        assert np.array_equal(
            s1(p2), geometry.frac_vec([(a + b) / (n + 2) for a, b in zip(p1, p2)]))
        assert np.array_equal(
            s1(geometry.frac_zeros(n)),
            geometry.frac_vec([2 * a / (n + 2) for a in p1]))


def test_h1_block_form():
    n = 3
    h1 = geometry.h_matrix(n, 1)
    expected = np.array([
        [Fraction(1), Fraction(0), Fraction(0)],
        [Fraction(2, 5), Fraction(2, 5), Fraction(1, 5)],
        [Fraction(2, 5), Fraction(1, 5), Fraction(2, 5)],
    ], dtype=object)
    assert np.array_equal(h1, expected)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_h_matrices_cyclic_conjugation(n):
    # H_j = P H_1 P^{-1} for the cyclic vertex permutation sending 1 to j
    h1 = geometry.h_matrix(n, 1)
    for j in range(2, n + 1):
        perm = [(i + j - 1) % n for i in range(n)]
        p = np.full((n, n), Fraction(0), dtype=object)
        for i, target in enumerate(perm):
            p[target, i] = Fraction(1)
        assert np.array_equal(geometry.h_matrix(n, j), p @ h1 @ p.T)
    for j in range(1, n + 1):
        rows = geometry.h_matrix(n, j).sum(axis=1)
        assert all(x == 1 for x in rows)  # row-stochastic


def test_compose_word_order():
    # F_w = F_{w_1} o F_{w_2} o ... o F_{w_m}
    n, word = 3, (1, 2, 3)
    f = geometry.compose_word(n, word, "F")
    x = geometry.vertex(n, 2)
    by_hand = geometry.f_map(n, 1)(geometry.f_map(n, 2)(geometry.f_map(n, 3)(x)))
    assert np.array_equal(f(x), by_hand)
    t = geometry.compose_word(n, word, "T")
    by_hand_t = geometry.t_matrix(n, 1) @ geometry.t_matrix(n, 2) @ geometry.t_matrix(n, 3)
    assert np.array_equal(t, by_hand_t)


def test_point_of_word_addresses():
    n = 3
    assert np.array_equal(
        geometry.point_of_word(n, (1,)),
        geometry.f_map(n, 1)(geometry.frac_zeros(n)))
    with pytest.raises(AmbiguousAddressError):
        geometry.point_of_word(n, ())


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_y_basis_orthonormal(n):
    q = geometry.y_basis(n)
    assert q.shape == (n, n - 1)
    assert np.allclose(q.T @ q, np.eye(n - 1), atol=1e-14)
    assert np.allclose(q.sum(axis=0), 0.0, atol=1e-13)  # columns lie in Y


def test_t_operator_matches_ambient():
    n = 4
    q = geometry.y_basis(n)
    for j in range(1, n + 1):
        amb = np.array([[float(x) for x in row] for row in geometry.t_matrix(n, j)])
        assert np.allclose(geometry.t_operator(n, j), q.T @ amb @ q, atol=1e-14)


def test_symmetry_transform_permutes_vertices():
    n = 4
    for j, k in itertools.permutations(range(1, n + 1), 2):
        mat = geometry.symmetry_transform(n, j, k)
        assert np.array_equal(mat @ geometry.vertex(n, 1), geometry.vertex(n, j))
        assert np.array_equal(mat @ geometry.vertex(n, 2), geometry.vertex(n, k))
        assert np.array_equal(mat @ mat.T, geometry.frac_eye(n))


def test_plane_p_frame():
    n = 3
    pp = geometry.plane_p(n)
    assert np.isclose(np.linalg.norm(pp.e1), 1.0, atol=1e-14)
    assert np.isclose(np.linalg.norm(pp.e2), 1.0, atol=1e-14)
    assert abs(pp.e1 @ pp.e2) < 1e-14
    assert geometry.plane_p(2).e2 is None


def test_validation_errors():
    with pytest.raises(InvalidDimensionError):
        geometry.check_dimension(1)
    with pytest.raises(InvalidLetterError):
        geometry.check_letter(3, 4)
    with pytest.raises(InvalidLetterError):
        geometry.check_word(3, (1, 0))
    with pytest.raises(InvalidPairError):
        geometry.symmetry_permutation(3, 2, 2)
