"""Size of the reduced SDP blocks and its asymptotics.

All formula evaluation is exact (``int`` / ``Fraction``); floats appear only
in the log-log exponent fit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ResourceError, check_cap
from .partitions import (
    Partition,
    admissible_mus,
    as_partition,
    complement_in_rectangle,
    contains,
    dim_unitary_irrep,
    enumerate_partitions,
    rectangle,
    standard_tableaux,
)
from .symfun import class_weight, sn_character
from .tensor_lab import perm_matrix


def _check_dk(d: int, k: int) -> None:
    if k < 1 or d < 1:
        raise DomainError("d and k must be positive")
    if k > d:
        raise DomainError(f"k={k} exceeds d={d}")


def complexity_rectangular(d: int, k: int, n: int) -> int:
    """``𝒞_{(n^k)} = d · k(d+n-1)/(k+n-1) · ∏_{r=1}^k (d+n-r-1)!(k-r)! / ((k+n-r-1)!(d-r)!)``."""
    _check_dk(d, k)
    if n < 1:
        raise DomainError("n must be positive")
    f = math.factorial
    value = Fraction(d * k * (d + n - 1), k + n - 1)
    for r in range(1, k + 1):
        value *= Fraction(f(d + n - r - 1) * f(k - r), f(k + n - r - 1) * f(d - r))
    if value.denominator != 1:
        raise ArithmeticError(f"non-integer complexity {value}")
    return int(value)


def complexity_general(lam: Sequence[int], d: int, k: int, N: int | None = None) -> int:
    """``𝒞_λ = d · Σ_{μ admissible} dim 𝕌^d_μ``."""
    lam = as_partition(lam)
    if N is not None and lam.size != N + k - 1:
        raise DomainError(f"{list(lam)} is not a partition of N+k-1={N + k - 1}")
    return d * sum(dim_unitary_irrep(mu, d) for mu in admissible_mus(lam, k))


def unreduced_complexity(d: int, k: int, N: int) -> int:
    """Baseline ``(kd)^{N+1}``."""
    return (k * d) ** (N + 1)


# ------------------------------------------------------------------ oracles


def _vertical_strips(mu: Partition, boxes: int, max_rows: int) -> list[Partition]:
    """Diagrams obtained from ``mu`` by adding ``boxes`` boxes, no two in one row."""
    out = []
    rows = max(mu.length + boxes, 1)
    base = list(mu) + [0] * (rows - mu.length)
    for chosen in _subsets(rows, boxes):
        parts = base[:]
        for r in chosen:
            parts[r] += 1
        if all(parts[i] >= parts[i + 1] for i in range(len(parts) - 1)):
            nu = Partition(parts)
            if nu.length <= max_rows:
                out.append(nu)
    return out


def _subsets(n: int, r: int):
    from itertools import combinations

    return combinations(range(n), r)


def branching_multiplicity(lam: Sequence[int], mu: Sequence[int], k: int) -> int:
    """Multiplicity of ``λ`` in ``(1^{k-1}) ⊗ μ`` with at most ``k`` rows, by exhaustive Pieri expansion."""
    lam, mu = as_partition(lam), as_partition(mu)
    return sum(1 for nu in _vertical_strips(mu, k - 1, k) if nu == lam)


def character_multiplicity(lam: Sequence[int], mu: Sequence[int], k: int) -> Fraction:
    """``⟨Res^{S_{N+k-1}}_{S_{k-1}×S_N} χ_λ, sgn ⊗ χ_μ⟩`` by class sums."""
    lam, mu = as_partition(lam), as_partition(mu)
    total = Fraction(0)
    for c1 in enumerate_partitions(k - 1):
        sign = (-1) ** (c1.size - c1.length)
        for c2 in enumerate_partitions(mu.size):
            joint = Partition(sorted(list(c1) + list(c2), reverse=True))
            total += Fraction(sign * sn_character(lam, joint) * sn_character(mu, c2),
                              class_weight(c1) * class_weight(c2))
    return total


def complexity_by_branching(lam: Sequence[int], d: int, k: int) -> dict[str, int]:
    """``d Σ_{μ ⊢ N} m(λ,μ) dim 𝕌^d_μ`` with ``m`` from Pieri strips and from characters."""
    lam = as_partition(lam)
    N = lam.size - k + 1
    pieri = characters = 0
    for mu in enumerate_partitions(N, k):
        dim = dim_unitary_irrep(mu, d)
        pieri += branching_multiplicity(lam, mu, k) * dim
        m = character_multiplicity(lam, mu, k)
        if m.denominator != 1:
            raise ArithmeticError(f"non-integer multiplicity {m}")
        characters += int(m) * dim
    return {"pieri": d * pieri, "characters": d * characters}


def young_orthogonal_form(lam: Sequence[int]) -> list[np.ndarray]:
    """Matrices of ``s_1 … s_{n-1}`` on the Specht module of ``λ`` in Young's orthogonal basis."""
    lam = as_partition(lam)
    tableaux = standard_tableaux(lam)
    index = {t: i for i, t in enumerate(tableaux)}
    pos = []
    for t in tableaux:
        where = {}
        for r, row in enumerate(t):
            for c, v in enumerate(row):
                where[v] = (r, c)
        pos.append(where)
    n = lam.size
    gens = []
    for i in range(1, n):
        S = np.zeros((len(tableaux), len(tableaux)))
        for j, t in enumerate(tableaux):
            (r1, c1), (r2, c2) = pos[j][i], pos[j][i + 1]
            axial = (c2 - r2) - (c1 - r1)
            S[j, j] = 1.0 / axial
            if abs(axial) > 1:
                swapped = tuple(tuple(i + 1 if v == i else i if v == i + 1 else v for v in row) for row in t)
                S[index[swapped], j] = math.sqrt(1.0 - 1.0 / axial ** 2)
        gens.append(S)
    return gens


def _kernel_dim(A: np.ndarray, tol: float = 1e-9) -> int:
    if A.shape[0] == 0:
        return A.shape[1]
    s = np.linalg.svd(A, compute_uv=False)
    return A.shape[1] - int(np.sum(s > tol * max(1.0, s[0] if s.size else 1.0)))


def hom_dimension(lam: Sequence[int], d: int, k: int) -> int:
    """``dim Hom_{S_N}(Z_λ, C^d ⊗ (C^d)^{⊗N})`` solved as a linear system.

    ``Z_λ`` is the ``S_{k-1}``-sign-isotypic part of the Specht module of
    ``λ`` (letters ``1..k-1``), acted on by ``S_N`` on the remaining letters.
    Unknowns are the entries of ``K`` in ``(1 ⊗ Perm(s_i)) K = K ρ(s_i)``.
    """
    lam = as_partition(lam)
    N = lam.size - k + 1
    if lam.length > k or N < 1:
        raise DomainError(f"{list(lam)} is not a valid block for k={k}")
    gens = young_orthogonal_form(lam)
    n_dim = gens[0].shape[0] if gens else 1
    sign_eqs = [gens[j] + np.eye(n_dim) for j in range(k - 2)]
    if sign_eqs:
        A = np.vstack(sign_eqs)
        _, s, vh = np.linalg.svd(A)
        Z = vh[int(np.sum(s > 1e-9)):].T
    else:
        Z = np.eye(n_dim)
    z = Z.shape[1]
    if z == 0:
        return 0
    out_dim = d ** (N + 1)
    unknowns = out_dim * z
    check_cap(unknowns, "Hom linear system")
    if unknowns > 10_000:
        raise ResourceError(f"Hom linear system has {unknowns} unknowns")
    blocks = []
    for i in range(N - 1):
        rho = Z.T @ gens[k - 1 + i] @ Z
        swap = list(range(N))
        swap[i], swap[i + 1] = i + 1, i
        P = np.kron(np.eye(d), perm_matrix(swap, d))
        # row-major vec(K) for K of shape (out_dim, z): vec(P K) - vec(K ρ)
        blocks.append(np.kron(P, np.eye(z)) - np.kron(np.eye(out_dim), rho.T))
    if not blocks:
        return unknowns
    return _kernel_dim(np.vstack(blocks))


# ------------------------------------------------------------- corollaries


@dataclass
class ComplexityReport:
    d: int
    k: int
    n: int
    value: int
    general: int
    hook_content: int
    branching_pieri: int
    branching_characters: int
    hom_linear_system: int | None
    collapse: bool

    @property
    def consistent(self) -> bool:
        vals = [self.general, self.hook_content, self.branching_pieri, self.branching_characters]
        if self.hom_linear_system is not None:
            vals.append(self.hom_linear_system)
        return all(v == self.value for v in vals)

    def to_json(self) -> dict:
        return {**asdict(self), "consistent": self.consistent}


def complexity_report(d: int, k: int, n: int, hom_oracle: bool = False) -> ComplexityReport:
    lam = rectangle(n, k)
    value = complexity_rectangular(d, k, n)
    mu = Partition([n] + [n - 1] * (k - 1))
    br = complexity_by_branching(lam, d, k)
    hom = None
    if hom_oracle:
        try:
            hom = hom_dimension(lam, d, k)
        except ResourceError:
            hom = None
    return ComplexityReport(d, k, n, value, complexity_general(lam, d, k), d * dim_unitary_irrep(mu, d),
                            br["pieri"], br["characters"], hom, k == d)


def collapse_check(d: int, n_range: Iterable[int]) -> dict:
    """``𝒞_{(n^d)}`` across ``n``; constant ``d²`` when the hierarchy collapses."""
    values = {n: complexity_rectangular(d, d, n) for n in n_range}
    return {"d": d, "values": values, "expected": d * d, "holds": all(v == d * d for v in values.values())}


def ratio_diagnostics(d: int, k: int, k_prime: int, n_list: Sequence[int]) -> dict:
    """Exact ``𝒞_{(n^k)}/𝒞_{(n^{k'})}`` and the predicted limiting behaviour.

    The sign of ``(k-k')(d-k-k')`` decides: 0 gives the finite limit ``k/(d-k)``,
    positive diverges, negative vanishes.
    """
    if not 1 <= k_prime <= k <= d:
        raise DomainError("need 1 <= k' <= k <= d")
    ratios = [Fraction(complexity_rectangular(d, k, n), complexity_rectangular(d, k_prime, n)) for n in n_list]
    sign = (k - k_prime) * (d - k - k_prime)
    if sign == 0:
        if k == k_prime:
            limit = Fraction(1)
        else:
            limit = Fraction(k, d - k)
        classification = "converges"
    elif sign > 0:
        limit, classification = None, "diverges"
    else:
        limit, classification = Fraction(0), "vanishes"
    report = {
        "d": d, "k": k, "k_prime": k_prime, "n": list(n_list),
        "ratios": ratios, "classification": classification, "limit": limit,
    }
    if limit is not None:
        dev = [abs(float(r - limit)) for r in ratios]
        report["deviation"] = dev
        report["relative_deviation"] = [x / float(limit) if limit else x for x in dev]
        report["monotone"] = all(dev[i + 1] <= dev[i] for i in range(len(dev) - 1))
    else:
        report["monotone"] = all(ratios[i + 1] >= ratios[i] for i in range(len(ratios) - 1))
    return report


def asymptotic_exponent(d: int, k: int, n_lo: int, n_hi: int) -> float:
    """Least-squares slope of ``log 𝒞_{(n^k)}`` against ``log n`` for integer ``n`` in ``[n_lo, n_hi]``."""
    if not (n_hi > n_lo >= 8):
        raise DomainError("need n_hi > n_lo >= 8")
    ns = np.arange(n_lo, n_hi + 1)
    logs = np.array([math.log(complexity_rectangular(d, k, int(n))) for n in ns])
    slope, _ = np.polyfit(np.log(ns), logs, 1)
    return float(slope)


def skew_dim_check(mu: Sequence[int], n: int, d: int) -> bool:
    """``dim 𝕌^d_μ == dim 𝕌^d`` of the complement of ``μ`` in ``(n^d)``."""
    mu = as_partition(mu)
    if not contains(mu, rectangle(n, d)):
        raise DomainError(f"{list(mu)} does not fit in ({n}^{d})")
    return dim_unitary_irrep(mu, d) == dim_unitary_irrep(complement_in_rectangle(mu, n, d), d)


# ---------------------------------------------------------------- tables


TABLE_COLUMNS = ("d", "k", "n", "C", "C_unreduced", "collapse")


def complexity_table(d: int, k: int, n_range: Iterable[int]) -> list[dict]:
    rows = []
    for n in n_range:
        rows.append({
            "d": d, "k": k, "n": n,
            "C": complexity_rectangular(d, k, n),
            "C_unreduced": unreduced_complexity(d, k, k * n - k + 1),
            "collapse": k == d,
        })
    return rows


def table_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: row[c] for c in TABLE_COLUMNS})
    return buf.getvalue()


def table_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, indent=2)
