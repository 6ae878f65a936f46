"""Symmetric-group characters and numeric evaluation of symmetric functions.

Characters come from the Murnaghan-Nakayama rule in exact integer arithmetic;
Schur polynomials are evaluated through the Frobenius character expansion over
conjugacy classes, with a semistandard-tableaux monomial sum available as an
independent check.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .partitions import (
    Partition,
    add_box,
    as_partition,
    dim_specht,
    enumerate_partitions,
    semistandard_tableaux,
)

SPECTRUM_TOL = 1e-10


def spectrum(eta: Iterable[float], tol: float = SPECTRUM_TOL) -> np.ndarray:
    """Validate a nonnegative spectrum, clamping round-off negatives to zero."""
    eta = np.asarray(list(eta), dtype=float)
    if eta.ndim != 1 or eta.size == 0:
        raise DomainError("spectrum must be a nonempty 1-d sequence")
    scale = max(1.0, float(np.max(np.abs(eta))))
    if np.any(eta < -tol * scale):
        raise DomainError(f"spectrum has negative entries: {eta}")
    return np.clip(eta, 0.0, None)


def multiplicities(c: Iterable[int]) -> dict[int, int]:
    """Cycle-length multiplicities ``{i: m_i}`` of a cycle type."""
    return dict(Counter(as_partition(c)))


@lru_cache(maxsize=None)
def _mn(lam: tuple[int, ...], rho: tuple[int, ...]) -> int:
    if not rho:
        return 1 if not lam else 0
    r, rest = rho[0], rho[1:]
    L = len(lam)
    beta = [lam[i] + L - 1 - i for i in range(L)]
    beta_set = set(beta)
    total = 0
    # removing a rim hook of size r = moving one bead r steps down
    for b in beta:
        nb = b - r
        if nb < 0 or nb in beta_set:
            continue
        height = sum(1 for x in beta if nb < x < b)
        new_beta = sorted((nb if x == b else x for x in beta), reverse=True)
        new_lam = tuple(p for p in (new_beta[j] - (L - 1 - j) for j in range(L)) if p > 0)
        total += (-1) ** height * _mn(new_lam, rest)
    return total


def sn_character(mu: Iterable[int], c: Iterable[int]) -> int:
    """Irreducible character ``χ_μ`` of ``S_N`` on the class with cycle type ``c``."""
    mu, c = as_partition(mu), as_partition(c)
    if mu.size != c.size:
        raise DomainError(f"|μ|={mu.size} differs from |c|={c.size}")
    return _mn(tuple(mu), tuple(c))


def class_weight(c: Iterable[int]) -> int:
    """Centralizer order ``z_c = ∏ i^{m_i} m_i!``."""
    return prod(i ** m * factorial(m) for i, m in multiplicities(c).items())


def class_size(c: Iterable[int]) -> int:
    c = as_partition(c)
    return factorial(c.size) // class_weight(c)


def power_sum_eval(c: Iterable[int], eta: Sequence[float]) -> float:
    """``p_c(η) = ∏_parts Σ_i η_i^part``."""
    eta = spectrum(eta)
    return float(prod(float(np.sum(eta ** part)) for part in as_partition(c)))


@lru_cache(maxsize=None)
def _frobenius_coefficients(mu: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], Fraction], ...]:
    N = sum(mu)
    out = []
    for c in enumerate_partitions(N):
        chi = _mn(mu, tuple(c))
        if chi:
            out.append((tuple(c), Fraction(chi, class_weight(c))))
    return tuple(out)


def schur_eval(mu: Iterable[int], eta: Sequence[float]) -> float:
    """Schur polynomial ``s_μ(η_1, …, η_k)`` via the Frobenius formula."""
    mu = as_partition(mu)
    eta = spectrum(eta)
    if mu.length > eta.size:
        return 0.0
    if mu.size == 0:
        return 1.0
    power = {}
    total = 0.0
    for c, coeff in _frobenius_coefficients(tuple(mu)):
        for part in c:
            if part not in power:
                power[part] = float(np.sum(eta ** part))
        total += float(coeff) * prod(power[p] for p in c)
    return total


def schur_eval_tableaux(mu: Iterable[int], eta: Sequence[float]) -> float:
    """Schur polynomial as the sum of ``η^T`` over semistandard tableaux (slow oracle)."""
    mu = as_partition(mu)
    eta = spectrum(eta)
    total = 0.0
    for tab in semistandard_tableaux(mu, eta.size):
        total += prod(float(eta[v - 1]) for row in tab for v in row)
    return total


def projected_trace(mu: Iterable[int], eta: Sequence[float]) -> float:
    """``tr(ℙ_μ η^{⊗N}) = dim 𝕐_μ · s_μ(η)``."""
    return dim_specht(mu) * schur_eval(mu, eta)


def pieri_one_box(lam_minus: Iterable[int], k: int, eta: Sequence[float]) -> tuple[float, float, float]:
    """Both sides of ``s_{λ⁻}·p_1 = Σ_{ν ↘ λ⁻, ℓ(ν) ≤ k} s_ν`` and their absolute difference."""
    lam_minus = as_partition(lam_minus)
    eta = spectrum(eta)
    if eta.size != k:
        raise DomainError(f"spectrum length {eta.size} differs from k={k}")
    lhs = schur_eval(lam_minus, eta) * float(np.sum(eta))
    rhs = 0.0
    for row in range(1, lam_minus.length + 2):
        nu = add_box(lam_minus, row)
        if nu is not None and nu.length <= k:
            rhs += schur_eval(nu, eta)
    return lhs, rhs, abs(lhs - rhs)


def symmetric_power_dim(m: int, N: int) -> int:
    return comb(m + N - 1, N)


__all__ = [
    "Partition",
    "class_size",
    "class_weight",
    "multiplicities",
    "pieri_one_box",
    "power_sum_eval",
    "projected_trace",
    "schur_eval",
    "schur_eval_tableaux",
    "sn_character",
    "spectrum",
    "symmetric_power_dim",
]
