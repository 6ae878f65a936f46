"""Nonconvex pure-state searches for the reference values of a witness.

``minimize_f`` estimates the k-purified value (minimum of the objective ``f``
over factor pairs) and ``minimize_schmidt_rank_k`` the minimum expectation
over normalized states of Schmidt rank at most ``k``. Both are heuristic
upper bounds: a negative value comes with an explicit violating argument,
but a nonnegative value proves nothing.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .tensor_lab import FactorPair, HermitianOperator, as_operator, max_entangled, pure_objective

DEGENERACY_RATIO = 1e-8
DEFAULT_RESTARTS = 64
MAX_ALTERNATIONS = 200
CONVERGENCE_TOL = 1e-12


def f_objective(X: HermitianOperator, pair: FactorPair) -> float:
    """``⟨φ_k|(x⊗y)† X (x⊗y)|φ_k⟩ / (tr x†x · tr y†y)``; invariant under ``x→ax``, ``y→by``."""
    X = as_operator(X)
    if pair.d != X.d:
        raise DomainError(f"factor pair has d={pair.d}, operator has d={X.d}")
    return pure_objective(X, pair)


def schmidt_expectation(X: HermitianOperator, pair: FactorPair) -> float:
    """``⟨ψ|X|ψ⟩/⟨ψ|ψ⟩`` for ``ψ = Σ_i x_i ⊗ y_i``."""
    X = as_operator(X)
    psi = pair.state()
    n2 = float(np.vdot(psi, psi).real)
    if n2 <= 0:
        raise DomainError("Σ x_i ⊗ y_i vanishes")
    return float(np.vdot(psi, X.matrix @ psi).real) / n2


def witness_operator(k: int, d: int) -> HermitianOperator:
    """``W_k = (k/d)·1 − |φ̂_d⟩⟨φ̂_d|``: k-block-positive with boundary value 0."""
    if not 1 <= k <= d:
        raise DomainError("need 1 <= k <= d")
    phi = max_entangled(d, normalized=True)
    return HermitianOperator(d, (k / d) * np.eye(d * d) - np.outer(phi, phi))


@dataclass
class SearchResult:
    kind: str
    value: float
    pair: FactorPair | None
    restarts: int
    trace: list[float] = field(default_factory=list)
    degenerate: bool = False

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "argument": None if self.pair is None else self.pair.to_json(),
            "restarts": self.restarts,
            "trace": list(self.trace),
            "degenerate": self.degenerate,
        }


def _left_map(y: np.ndarray) -> np.ndarray:
    """``L_y`` with ``vec(x yᵀ) = L_y · x.ravel()``."""
    d = y.shape[0]
    return np.einsum("ac,bi->abci", np.eye(d), y).reshape(d * d, -1)


def _right_map(x: np.ndarray) -> np.ndarray:
    """``K_x`` with ``vec(x yᵀ) = K_x · y.ravel()``."""
    d = x.shape[0]
    return np.einsum("ai,bc->abci", x, np.eye(d)).reshape(d * d, -1)


def _min_eigvec(A: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((A + A.conj().T) / 2)
    return v[:, 0]


def _min_generalized(A: np.ndarray, G: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray | None:
    """Minimizer of ``⟨z|A|z⟩/⟨z|G|z⟩`` restricted to range(G)."""
    s, U = np.linalg.eigh((G + G.conj().T) / 2)
    keep = s > rel_tol * max(s[-1], 1e-300)
    if not np.any(keep):
        return None
    Q = U[:, keep] / np.sqrt(s[keep])
    z = _min_eigvec(Q.conj().T @ A @ Q)
    return Q @ z


def _ratio(pair: FactorPair) -> float:
    nx = float(np.vdot(pair.x, pair.x).real)
    ny = float(np.vdot(pair.y, pair.y).real)
    psi = pair.state()
    return float(np.vdot(psi, psi).real) / (nx * ny)


def _alternate_f(X: np.ndarray, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d, k = x.shape
    prev = math.inf
    for _ in range(MAX_ALTERNATIONS):
        L = _left_map(y)
        x = _min_eigvec(L.conj().T @ X @ L).reshape(d, k)
        K = _right_map(x)
        y = _min_eigvec(K.conj().T @ X @ K).reshape(d, k)
        psi = (x @ y.T).reshape(-1)
        val = float(np.vdot(psi, X @ psi).real)  # x, y are unit vectors here
        if abs(prev - val) < CONVERGENCE_TOL:
            break
        prev = val
    return x, y


def _alternate_schmidt(X: np.ndarray, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d, k = x.shape
    prev = math.inf
    for _ in range(MAX_ALTERNATIONS):
        L = _left_map(y)
        z = _min_generalized(L.conj().T @ X @ L, L.conj().T @ L)
        if z is None:
            break
        x = z.reshape(d, k) / np.linalg.norm(z)
        K = _right_map(x)
        z = _min_generalized(K.conj().T @ X @ K, K.conj().T @ K)
        if z is None:
            break
        y = z.reshape(d, k) / np.linalg.norm(z)
        psi = (x @ y.T).reshape(-1)
        val = float(np.vdot(psi, X @ psi).real / np.vdot(psi, psi).real)
        if abs(prev - val) < CONVERGENCE_TOL:
            break
        prev = val
    return x, y


def _gaussian_pair(rng: np.random.Generator, d: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    def g():
        m = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
        return m / np.linalg.norm(m)

    return g(), g()


def _kernel_probe(d: int, k: int) -> FactorPair | None:
    # x = |1⟩⟨1|, y = |1⟩⟨2| gives x yᵀ = 0, so f = 0 exactly
    if k < 2:
        return None
    x = np.zeros((d, k), dtype=complex)
    y = np.zeros((d, k), dtype=complex)
    x[0, 0] = 1.0
    y[0, 1] = 1.0
    return FactorPair(x, y)


def _run(kind: str, X: HermitianOperator, k: int, restarts: int, seed: int, threads: int) -> SearchResult:
    X = as_operator(X)
    d = X.d
    if not 1 <= k <= d:
        raise DomainError(f"need 1 <= k <= d, got k={k}, d={d}")
    if restarts < 1:
        raise DomainError("restarts must be positive")
    M = X.matrix
    streams = np.random.SeedSequence(seed).spawn(restarts)

    if kind == "V_k":
        step, evaluate = _alternate_f, (lambda p: f_objective(X, p))
    else:
        step, evaluate = _alternate_schmidt, (lambda p: schmidt_expectation(X, p))

    def one(ss: np.random.SeedSequence) -> tuple[float, FactorPair]:
        x0, y0 = _gaussian_pair(np.random.default_rng(ss), d, k)
        x, y = step(M, x0, y0)
        pair = FactorPair(x, y)
        return evaluate(pair), pair

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(one, streams))
    else:
        runs = [one(ss) for ss in streams]

    trace = [v for v, _ in runs]
    best_val, best_pair = min(runs, key=lambda r: r[0])
    degenerate = False
    if kind == "V_k":
        probe = _kernel_probe(d, k)
        if probe is not None and best_val > 0.0:
            best_val, best_pair = 0.0, probe
        if abs(best_val) < 1e-9 and _ratio(best_pair) < DEGENERACY_RATIO:
            best_val, degenerate = 0.0, True
    return SearchResult(kind, float(best_val), best_pair, restarts, trace, degenerate)


def minimize_f(X: HermitianOperator, k: int, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
               threads: int = 1) -> SearchResult:
    """Upper bound on the k-purified value ``min_{x,y} f(x,y)`` by alternating eigen-updates.

    For ``k >= 2`` the infimum is at most 0 because ``x yᵀ = 0`` is reachable;
    such minimizers are reported with ``degenerate=True`` and value 0.
    """
    return _run("V_k", X, k, restarts, seed, threads)


def minimize_schmidt_rank_k(X: HermitianOperator, k: int, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                            threads: int = 1) -> SearchResult:
    """Upper bound on ``min ⟨ψ|X|ψ⟩`` over unit ``ψ`` of Schmidt rank at most ``k``."""
    return _run("V", X, k, restarts, seed, threads)


@dataclass
class BoundCheck:
    name: str
    holds: bool
    slack: float

    def to_json(self) -> dict:
        return {"name": self.name, "holds": self.holds, "slack": self.slack}


def check_bounds(v_hat: float, vk_hat: float, k: int, tol: float = 1e-6) -> list[BoundCheck]:
    """Check ``k·𝒱_k ≤ 𝒱 ≤ 𝒱_k`` (when ``𝒱 < 0``) or ``𝒱_k = 0`` (when ``𝒱 ≥ 0``).

    ``slack`` is the margin by which each inequality holds (negative = violated).
    """
    if v_hat >= 0:
        slack = tol - abs(vk_hat)
        return [BoundCheck("V>=0 implies V_k=0", slack >= 0, slack)]
    lower = v_hat - k * vk_hat
    upper = vk_hat - v_hat
    return [
        BoundCheck("k*V_k <= V", lower >= -tol, lower),
        BoundCheck("V <= V_k", upper >= -tol, upper),
        BoundCheck("V_k < 0", vk_hat < tol, -vk_hat),
    ]
