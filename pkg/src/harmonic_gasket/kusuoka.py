"""Kusuoka cylinder measure, the matrix metric approximants Z_m, and the
energy-vs-metric identity for harmonic functions.

Long matrix products are renormalized by their Hilbert-Schmidt norm at each
step with the log-scale tracked separately, so cylinder masses and Z_m stay
well defined far beyond float underflow depth.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import geometry
from .errors import DepthLimitError

#: documented cap on word length for Z / mass evaluation
MAX_WORD_LEN = 200


def _t_ops(n: int) -> list[np.ndarray]:
    return [geometry.t_operator(n, j) for j in range(1, n + 1)]


def _product_scaled(n: int, word) -> tuple[np.ndarray, float]:
    """(T_w rescaled to unit HS norm, log ||T_w||_HS)."""
    word = geometry.check_word(n, word)
    if len(word) > MAX_WORD_LEN:
        raise DepthLimitError(f"word length {len(word)} exceeds {MAX_WORD_LEN}")
    ops = _t_ops(n)
    m = np.eye(n - 1)
    log_hs = 0.0
    for j in word:
        m = m @ ops[j - 1]
        norm = np.linalg.norm(m)
        m = m / norm
        log_hs += math.log(norm)
    return m, log_hs


def hs_norm_sq_word_exact(n: int, word) -> Fraction:
    """Exact ||T_w||^2_HS over Y; only practical for short words."""
    return geometry.hs_norm_sq_exact(n, geometry.compose_word(n, word, "T"))


def nu_mass(n: int, word) -> float:
    """Kusuoka cylinder mass (1/(N-1)) ((N+2)/N)^|w| ||T_w||^2_HS."""
    word = geometry.check_word(n, word)
    if not word:
        return 1.0
    _, log_hs = _product_scaled(n, word)
    return math.exp(
        2.0 * log_hs + len(word) * math.log((n + 2) / n) - math.log(n - 1)
    )


def nu_mass_exact(n: int, word) -> Fraction:
    """Exact cylinder mass for short words; oracle for nu_mass."""
    word = geometry.check_word(n, word)
    return (
        Fraction(1, n - 1)
        * Fraction(n + 2, n) ** len(word)
        * hs_norm_sq_word_exact(n, word)
    )


@dataclass(frozen=True)
class MetricApprox:
    """Finite-depth metric approximant Z_m(w) with convergence diagnostics."""

    word: tuple[int, ...]
    matrix: np.ndarray
    trace: float
    idempotency_residual: float
    eigenvalues: np.ndarray  # descending
    log_hs_norm: float

    @property
    def top_two(self) -> tuple[float, float]:
        return float(self.eigenvalues[0]), float(self.eigenvalues[1]) if len(
            self.eigenvalues
        ) > 1 else 0.0


def z_approx(n: int, word) -> MetricApprox:
    """Z_m(w) = T_w T_w^t / ||T_w||^2_HS with diagnostics."""
    word = geometry.check_word(n, word)
    if not word:
        raise ValueError("Z_m needs a nonempty word")
    m, log_hs = _product_scaled(n, word)
    z = m @ m.T  # HS norm already factored out
    eigs = np.linalg.eigvalsh(z)[::-1]
    return MetricApprox(
        word=word,
        matrix=z,
        trace=float(np.trace(z)),
        idempotency_residual=float(np.linalg.norm(z @ z - z)),
        eigenvalues=eigs,
        log_hs_norm=log_hs,
    )


@dataclass
class WordSampler:
    """Grows nu-distributed words letter by letter using the conditional
    cylinder ratios; deterministic under a fixed seed.  Single-owner mutable
    state: use one sampler per thread, clone() for derived streams."""

    n: int
    seed: int = 0
    alphabet: tuple[int, ...] | None = None
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if self.alphabet is None:
            self.alphabet = tuple(range(1, self.n + 1))
        self.alphabet = tuple(self.alphabet)
        for j in self.alphabet:
            geometry.check_letter(self.n, j)
        self._rng = np.random.default_rng(self.seed)

    def clone(self, stream: int) -> "WordSampler":
        return WordSampler(self.n, seed=(self.seed, stream), alphabet=self.alphabet)

    def step_probabilities(self, scaled_product: np.ndarray) -> np.ndarray:
        """Conditional probabilities nu(wj)/nu(w) over the alphabet, given
        T_w rescaled to unit HS norm."""
        ops = _t_ops(self.n)
        ratio = np.array(
            [
                np.linalg.norm(scaled_product @ ops[j - 1]) ** 2
                for j in self.alphabet
            ]
        ) * ((self.n + 2) / self.n)
        return ratio / ratio.sum()

    def sample(self, m: int) -> tuple[int, ...]:
        if m < 1:
            raise ValueError("word length must be >= 1")
        if m > MAX_WORD_LEN:
            raise DepthLimitError(f"word length {m} exceeds {MAX_WORD_LEN}")
        ops = _t_ops(self.n)
        prod = np.eye(self.n - 1)
        word = []
        for _ in range(m):
            probs = self.step_probabilities(prod)
            # renormalized over the restricted alphabet when one is set
            j = self.alphabet[self._rng.choice(len(self.alphabet), p=probs)]
            word.append(j)
            prod = prod @ ops[j - 1]
            prod = prod / np.linalg.norm(prod)
        return tuple(word)


def energy_via_metric(n: int, a, b, m: int) -> float:
    """sum_{|w|=m} <a, Z_m(w) b> nu(w Sigma) for directions a, b given in
    the fixed orthonormal basis of Y; by the partition identity this equals
    <a, b>/(N-1) at every m (evaluated here by brute-force enumeration)."""
    if m < 0:
        raise ValueError("level m must be >= 0")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ops = np.stack(_t_ops(n))
    scale = ((n + 2) / n) ** m / (n - 1)
    prods = np.eye(n - 1)[None]
    for _ in range(m):
        prods = (prods[:, None] @ ops[None]).reshape(-1, n - 1, n - 1)
    ta = np.einsum("wji,j->wi", prods, a)
    tb = np.einsum("wji,j->wi", prods, b)
    return scale * math.fsum((ta * tb).sum(axis=1).tolist())


def harmonic_energy_ratio(n: int, a, m: int) -> float:
    """E_0 of the boundary values of x -> <a, x> divided by
    energy_via_metric(a, a, m); equals N(N-1)/2 for every N (the kappa_N
    constant relating the graph energy to the metric integral under this
    package's coordinate conventions)."""
    a = np.asarray(a, dtype=float)
    q = geometry.y_basis(n)
    boundary = np.array(
        [a @ (q.T @ geometry.to_float_point(geometry.vertex(n, j)))
         for j in range(1, n + 1)]
    )
    e0 = math.fsum(
        ((boundary[i] - boundary[j]) ** 2
         for i in range(n) for j in range(i + 1, n))
    )
    return e0 / energy_via_metric(n, a, a, m)
