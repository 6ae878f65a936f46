"""Dense desk-scale constructions of the operators behind the hierarchy.

Global factor ordering for every composite object built here is::

    [aux-dual (k-1 factors of C^k), aux-ext (N factors of C^k),
     Alice (C^d), Bob (N factors of C^d)]

Permutations are tuples ``perm`` with ``perm[a] = π(a)`` (0-based); the
tensor factor in input position ``a`` lands in output position ``π(a)``, so
``perm_matrix(compose(p, q)) == perm_matrix(p) @ perm_matrix(q)``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from .errors import DomainError, check_cap
from .partitions import Partition, admissible_mus, as_partition, dim_specht, remove_first_column
from .symfun import schur_eval, sn_character

HERMITICITY_TOL = 1e-10

Perm = tuple[int, ...]


# ---------------------------------------------------------------- permutations


def compose(p: Perm, q: Perm) -> Perm:
    """``p ∘ q`` (apply ``q`` first)."""
    return tuple(p[q[a]] for a in range(len(q)))


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for a, b in enumerate(p):
        inv[b] = a
    return tuple(inv)


def cycle_type(p: Perm) -> Partition:
    seen = [False] * len(p)
    lengths = []
    for start in range(len(p)):
        if seen[start]:
            continue
        j, n = start, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            n += 1
        lengths.append(n)
    return Partition(sorted(lengths, reverse=True))


def transposition(N: int, a: int, b: int) -> Perm:
    p = list(range(N))
    p[a], p[b] = p[b], p[a]
    return tuple(p)


def _validate_perm(perm: Sequence[int]) -> Perm:
    perm = tuple(int(a) for a in perm)
    if sorted(perm) != list(range(len(perm))):
        raise DomainError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
    return perm


def perm_source_index(perm: Sequence[int], m: int) -> np.ndarray:
    """``src[j]`` = flat input index sent to flat output index ``j`` by ``Perm(π)``."""
    perm = _validate_perm(perm)
    N = len(perm)
    if N == 0:
        return np.zeros(1, dtype=np.int64)
    grid = np.arange(m ** N, dtype=np.int64).reshape((m,) * N)
    return np.transpose(grid, inverse(perm)).reshape(-1)


def perm_matrix(perm: Sequence[int], m: int) -> np.ndarray:
    """The ``m^N × m^N`` 0/1 matrix permuting tensor factors."""
    N = len(perm)
    D = m ** N
    check_cap(D, "permutation matrix")
    src = perm_source_index(perm, m)
    P = np.zeros((D, D))
    P[np.arange(D), src] = 1.0
    return P


def permute_factors(vec: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Apply a factor permutation to a vector (or to the rows of a matrix) with mixed local dims.

    ``perm`` moves factor ``a`` (of dimension ``dims[a]``) to position ``perm[a]``.
    """
    perm = _validate_perm(perm)
    dims = tuple(dims)
    if len(dims) != len(perm):
        raise DomainError("dims and permutation lengths differ")
    tail = vec.shape[1:]
    t = vec.reshape(dims + tail)
    axes = list(inverse(perm)) + list(range(len(dims), len(dims) + len(tail)))
    return np.transpose(t, axes).reshape(vec.shape)


# ------------------------------------------------------------------ projectors


@lru_cache(maxsize=64)
def _central(mu: tuple[int, ...], m: int) -> np.ndarray:
    N = sum(mu)
    if N == 0:
        return np.eye(1)
    D = m ** N
    rows = np.arange(D)
    P = np.zeros((D, D))
    for perm in itertools.permutations(range(N)):
        chi = sn_character(mu, cycle_type(perm))
        if chi:
            np.add.at(P, (rows, perm_source_index(perm, m)), chi)
    P *= dim_specht(mu) / math.factorial(N)
    P.setflags(write=False)
    return P


def central_projector(mu: Sequence[int], m: int) -> np.ndarray:
    """Isotypic projector ``(dim 𝕐_μ / N!) Σ_π χ_μ(π) Perm(π)`` on ``(C^m)^{⊗N}``."""
    mu = as_partition(mu)
    check_cap(m ** mu.size, "central projector")
    return _central(tuple(mu), m).copy()


@lru_cache(maxsize=None)
def _levi_civita(k: int) -> np.ndarray:
    eps = np.zeros((k,) * k)
    for p in itertools.permutations(range(k)):
        inversions = sum(1 for a in range(k) for b in range(a + 1, k) if p[a] > p[b])
        eps[p] = (-1) ** inversions
    eps.setflags(write=False)
    return eps


def antisymmetrizer_top(k: int) -> np.ndarray:
    """Rank-one projector ``Π_k`` onto the top antisymmetric line of ``(C^k)^{⊗k}``."""
    if k < 1:
        raise DomainError("k must be positive")
    check_cap(k ** k, "top antisymmetrizer")
    e = _levi_civita(k).reshape(-1)
    return np.outer(e, e) / math.factorial(k)


def dualization_map(k: int) -> np.ndarray:
    """The isometry ``ℰ: C^k → (C^k)^{⊗(k-1)}``, rows indexed by ``(a_2 … a_k)``."""
    if k < 1:
        raise DomainError("k must be positive")
    check_cap(k ** k, "dualization map")
    return _levi_civita(k).reshape(k ** (k - 1), k) / math.sqrt(math.factorial(k - 1))


def max_entangled(k: int, normalized: bool = False) -> np.ndarray:
    """``|φ_k⟩ = Σ_i |ii⟩``, optionally divided by ``√k``."""
    v = np.eye(k).reshape(-1)
    return v / math.sqrt(k) if normalized else v


def dualization_residual(k: int) -> float:
    """``max|k (ℰ⊗1)† Π_k (ℰ⊗1) − |φ_k⟩⟨φ_k||``."""
    E1 = np.kron(dualization_map(k), np.eye(k))
    lhs = k * E1.conj().T @ antisymmetrizer_top(k) @ E1
    phi = max_entangled(k)
    return float(np.max(np.abs(lhs - np.outer(phi, phi))))


def verify_projection_equality(lam: Sequence[int], k: int) -> float:
    """``max|Π_k ⊗ ℙ_{λ⁻} − (Π_k⊗1) ℙ_λ (Π_k⊗1)|`` on ``(C^k)^{⊗|λ|}``."""
    lam = as_partition(lam)
    if lam.length != k:
        raise DomainError(f"{list(lam)} must have exactly k={k} rows")
    rest = k ** (lam.size - k)
    Pi = np.kron(antisymmetrizer_top(k), np.eye(rest))
    lhs = np.kron(antisymmetrizer_top(k), central_projector(remove_first_column(lam), k))
    rhs = Pi @ central_projector(lam, k) @ Pi
    return float(np.max(np.abs(lhs - rhs)))


# ------------------------------------------------------------------- operators


@dataclass(frozen=True)
class HermitianOperator:
    """A Hermitian ``d² × d²`` matrix on ``C^d ⊗ C^d``."""

    d: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        M = np.asarray(self.matrix, dtype=complex)
        if self.d < 1 or M.shape != (self.d ** 2, self.d ** 2):
            raise DomainError(f"expected a {self.d ** 2}x{self.d ** 2} matrix, got {M.shape}")
        if not np.all(np.isfinite(M)):
            raise DomainError("operator has non-finite entries")
        err = float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0
        if err > HERMITICITY_TOL:
            raise DomainError(f"operator is not Hermitian (max deviation {err:.3g})")
        M = (M + M.conj().T) / 2
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_json(cls, data: dict) -> "HermitianOperator":
        try:
            d = int(data["d"])
            re = np.asarray(data["re"], dtype=float)
            im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed operator JSON: {exc}") from exc
        if re.shape != im.shape:
            raise DomainError("re and im arrays differ in shape")
        return cls(d, re + 1j * im)

    def to_json(self) -> dict:
        return {"d": self.d, "re": self.matrix.real.tolist(), "im": self.matrix.imag.tolist()}

    @classmethod
    def load(cls, path: str | Path) -> "HermitianOperator":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read operator file {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise DomainError("operator JSON must be an object")
        return cls.from_json(data)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))


def as_operator(X) -> HermitianOperator:
    if isinstance(X, HermitianOperator):
        return X
    M = np.asarray(X, dtype=complex)
    d = math.isqrt(M.shape[0])
    return HermitianOperator(d, M)


@dataclass(frozen=True)
class FactorPair:
    """``(x, y)``, two complex ``d × k`` matrices; ``(x⊗y)|φ_k⟩ = vec(x yᵀ)``."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.atleast_2d(np.asarray(self.x, dtype=complex))
        y = np.atleast_2d(np.asarray(self.y, dtype=complex))
        if x.shape != y.shape:
            raise DomainError(f"x and y shapes differ: {x.shape} vs {y.shape}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def d(self) -> int:
        return self.x.shape[0]

    @property
    def k(self) -> int:
        return self.x.shape[1]

    def state(self) -> np.ndarray:
        """Unnormalized ``(x⊗y)|φ_k⟩`` in ``C^d ⊗ C^d``."""
        return (self.x @ self.y.T).reshape(-1)

    def to_json(self) -> dict:
        return {
            "x": {"re": self.x.real.tolist(), "im": self.x.imag.tolist()},
            "y": {"re": self.y.real.tolist(), "im": self.y.imag.tolist()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "FactorPair":
        def mat(v):
            return np.asarray(v["re"]) + 1j * np.asarray(v["im"])

        return cls(mat(data["x"]), mat(data["y"]))


def random_pair(d: int, k: int, rng: np.random.Generator) -> FactorPair:
    def g():
        return rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))

    return FactorPair(g(), g())


def random_hermitian(d: int, rng: np.random.Generator) -> HermitianOperator:
    """GUE sample on ``C^d ⊗ C^d`` scaled to unit operator norm."""
    n = d * d
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = (A + A.conj().T) / 2
    return HermitianOperator(d, H / np.linalg.norm(H, 2))


def haar_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of U(m)."""
    if m == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(m, random_state=rng)


def pure_objective(X: HermitianOperator, pair: FactorPair) -> float:
    """``⟨φ_k|(x⊗y)† X (x⊗y)|φ_k⟩ / (tr x†x · tr y†y)``."""
    nx = float(np.vdot(pair.x, pair.x).real)
    ny = float(np.vdot(pair.y, pair.y).real)
    if nx <= 0 or ny <= 0:
        raise DomainError("x and y must both be nonzero")
    v = pair.state()
    return float(np.vdot(v, X.matrix @ v).real) / (nx * ny)


# -------------------------------------------------------- hierarchy operators


def hierarchy_dims(k: int, d: int, N: int) -> tuple[int, ...]:
    """Local dimensions in the global factor ordering."""
    return (k,) * (k - 1 + N) + (d,) * (N + 1)


def build_X_kN(X: HermitianOperator, k: int, N: int) -> np.ndarray:
    """``kΠ_k ⊗ 1 ⊗ X ⊗ 1`` on the full level-``N`` space."""
    X = as_operator(X)
    if N < 1:
        raise DomainError("N must be positive")
    d = X.d
    check_cap(k ** (N + k - 1) * d ** (N + 1), "X_{k,N}")
    return reduce(np.kron, [k * antisymmetrizer_top(k), np.eye(k ** (N - 1)), X.matrix, np.eye(d ** (N - 1))])


def _lambda_shape(lam: Sequence[int], k: int, N: int) -> Partition:
    lam = as_partition(lam)
    if lam.length != k or lam.size != N + k - 1:
        raise DomainError(f"{list(lam)} must have k={k} rows and N+k-1={N + k - 1} boxes")
    return lam


def build_X_lambda(X: HermitianOperator, lam: Sequence[int], k: int, N: int) -> np.ndarray:
    """``kΠ_k ⊗ ℙ_{λ⁻} ⊗ X ⊗ 1`` on the full level-``N`` space."""
    X = as_operator(X)
    lam = _lambda_shape(lam, k, N)
    d = X.d
    check_cap(k ** (N + k - 1) * d ** (N + 1), "X_lambda")
    P = central_projector(remove_first_column(lam), k)
    return reduce(np.kron, [k * antisymmetrizer_top(k), P, X.matrix, np.eye(d ** (N - 1))])


def apply_X_lambda(X: HermitianOperator, lam: Sequence[int], k: int, N: int, vec: np.ndarray) -> np.ndarray:
    """``X_λ`` applied to vectors (columns) without forming the dense operator."""
    X = as_operator(X)
    lam = _lambda_shape(lam, k, N)
    d = X.d
    P = central_projector(remove_first_column(lam), k)
    cols = vec.reshape(k ** k, k ** (N - 1), d * d, d ** (N - 1), -1)
    out = np.einsum("ab,bcefz->acefz", k * antisymmetrizer_top(k), cols)
    out = np.einsum("cg,agefz->acefz", P, out)
    out = np.einsum("eh,achfz->acefz", X.matrix, out)
    return out.reshape(vec.shape)


def apply_delta(vec: np.ndarray, perm: Sequence[int], k: int, d: int, N: int) -> np.ndarray:
    """``Δ(π) = Perm(π)_{aux-ext} ⊗ Perm(π)_{Bob}`` in the global ordering."""
    perm = _validate_perm(perm)
    if len(perm) != N:
        raise DomainError("permutation length must equal N")
    n_dual = k - 1
    full = list(range(n_dual))
    full += [n_dual + perm[a] for a in range(N)]
    full += [n_dual + N]
    full += [n_dual + N + 1 + perm[a] for a in range(N)]
    return permute_factors(vec, hierarchy_dims(k, d, N), full)


def build_phi_mu(mu: Sequence[int], k: int, pair: FactorPair) -> np.ndarray:
    """``|φ_μ(x,y)⟩ = Σ_i (ℰ ⊗ ℙ_μ)|i⟩ ⊗ (x ⊗ y^{⊗N})|i⟩`` in the global ordering."""
    mu = as_partition(mu)
    N = mu.size
    if mu.length > k:
        raise DomainError(f"{list(mu)} has more than k={k} rows")
    if pair.k != k:
        raise DomainError(f"factor pair has {pair.k} columns, expected {k}")
    d = pair.d
    check_cap(k ** (N + k - 1) * d ** (N + 1), "phi_mu")
    A = np.kron(dualization_map(k), central_projector(mu, k))
    B = reduce(np.kron, [pair.x] + [pair.y] * N)
    return np.einsum("ai,bi->ab", A, B).reshape(-1)


def f_lambda_mu(X: HermitianOperator, lam: Sequence[int], mu: Sequence[int], pair: FactorPair) -> tuple[float, float]:
    """Rayleigh quotient of ``X_λ`` on ``|φ_μ(x,y)⟩`` by two routes.

    Returns ``(matrix_route, formula_route)``; the formula route is
    ``f(x,y) · dim 𝕐_{λ⁻} s_{λ⁻}(η) tr(y†y) / (dim 𝕐_μ s_μ(η))`` with ``η = eig(y†y)``.
    """
    X = as_operator(X)
    lam, mu = as_partition(lam), as_partition(mu)
    k = lam.length
    if mu not in admissible_mus(lam, k):
        raise DomainError(f"{list(mu)} is not admissible for {list(lam)}")
    N = mu.size
    phi = build_phi_mu(mu, k, pair)
    norm2 = float(np.vdot(phi, phi).real)
    if norm2 <= 1e-300:
        raise DomainError("|φ_μ(x,y)⟩ vanishes")
    matrix_route = float(np.vdot(phi, apply_X_lambda(X, lam, k, N, phi)).real) / norm2

    eta = np.linalg.eigvalsh(pair.y.conj().T @ pair.y)
    lam_minus = remove_first_column(lam)
    denom = dim_specht(mu) * schur_eval(mu, eta)
    if denom <= 0:
        raise DomainError("s_μ(η) vanishes")
    ratio = dim_specht(lam_minus) * schur_eval(lam_minus, eta) * float(np.sum(eta)) / denom
    return matrix_route, pure_objective(X, pair) * ratio


def phi_mu_norm2_formula(mu: Sequence[int], pair: FactorPair) -> float:
    """``tr(x†x) · dim 𝕐_μ · s_μ(eig(y†y))``."""
    eta = np.linalg.eigvalsh(pair.y.conj().T @ pair.y)
    return float(np.vdot(pair.x, pair.x).real) * dim_specht(mu) * schur_eval(mu, eta)
