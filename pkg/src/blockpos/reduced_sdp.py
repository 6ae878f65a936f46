"""Symmetry-reduced extendibility SDP blocks, the unreduced level-N SDP, and certification.

Construction of a block ``λ ⊢ N+k-1`` with ``k`` rows:

* ``H``: orthonormal U(k) highest-weight vectors of weight ``λ`` inside
  ``Alt^{k-1}(C^k) ⊗ (C^k)^{⊗N}``. There are ``m = Σ_μ dim 𝕐_μ`` of them and
  ``S_N`` (acting on the extension factors) acts on their span by ``R``.
* For every admissible ``μ``, the ``R``-isotypic part ``Y_μ`` is located
  through the Jucys-Murphy sum ``Σ_{i<j} R((ij))``, which acts on ``Y_μ`` by
  the content sum of ``μ``.
* ``V``: orthonormal invariants of ``R ⊗ Perm`` on ``C^m ⊗ (C^d)^{⊗N}``,
  built orbit-by-orbit over Bob's basis strings. Inserting Alice's factor
  gives the variable space of dimension ``𝒞_λ = d Σ_μ dim 𝕌^d_μ``.
* Because ``X_λ`` commutes with ``U^{⊗(N+k-1)}``, its compression is
  ``C_eff = V†(Â ⊗ X ⊗ 1)V`` with ``Â = H†(kΠ_k ⊗ ℙ_{λ⁻})H`` and ``t = 1``.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, ResourceError, check_cap, dense_cap
from .partitions import (
    Partition,
    admissible_mus,
    as_partition,
    dim_specht,
    dim_unitary_irrep,
    enumerate_partitions,
    rectangle,
    remove_first_column,
)
from .tensor_lab import (
    HermitianOperator,
    antisymmetrizer_top,
    apply_X_lambda,
    as_operator,
    central_projector,
    dualization_map,
    permute_factors,
)

NULL_TOL = 1e-9
SELF_CHECK_TOL = 1e-9


def null_space(A: np.ndarray, atol: float = NULL_TOL) -> np.ndarray:
    """Orthonormal kernel basis with an absolute singular-value threshold."""
    if A.shape[0] == 0:
        return np.eye(A.shape[1])
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > atol * max(1.0, np.sqrt(A.shape[1]))))
    return vh[rank:].conj().T


def contents_sum(mu: Partition) -> int:
    return sum(j - i for i, j in mu.cells())


# ------------------------------------------------------------ weight vectors


class _StringSpace:
    """Basis strings of ``(C^k)^{⊗L}`` with a fixed content (letter counts)."""

    def __init__(self, k: int, L: int, content: Sequence[int]):
        self.k, self.L, self.content = k, L, tuple(content)
        letters = [a for a, c in enumerate(content) for _ in range(c)]
        self.strings = sorted(set(itertools.permutations(letters))) if letters else [()]
        self.index = {s: i for i, s in enumerate(self.strings)}

    def __len__(self) -> int:
        return len(self.strings)

    def flat(self) -> np.ndarray:
        if self.L == 0:
            return np.zeros(1, dtype=np.int64)
        return np.ravel_multi_index(np.array(self.strings).T, (self.k,) * self.L)

    def embed(self, coeffs: np.ndarray) -> np.ndarray:
        out = np.zeros((self.k ** self.L,) + coeffs.shape[1:], dtype=coeffs.dtype)
        out[self.flat()] = coeffs
        return out


def _highest_weight_basis(lam: Partition, k: int, n_dual: int, N: int) -> tuple[_StringSpace, np.ndarray]:
    """Highest-weight vectors of weight ``lam`` with the first ``n_dual`` factors antisymmetric."""
    L = n_dual + N
    content = list(lam) + [0] * (k - lam.length)
    space = _StringSpace(k, L, content)
    rows = []
    for a in range(k - 1):
        target = _StringSpace(k, L, [c + (b == a) - (b == a + 1) for b, c in enumerate(content)]) \
            if content[a + 1] > 0 else None
        if target is None:
            continue
        E = np.zeros((len(target), len(space)))
        for j, s in enumerate(space.strings):
            for pos, letter in enumerate(s):
                if letter == a + 1:
                    t = s[:pos] + (a,) + s[pos + 1:]
                    E[target.index[t], j] += 1.0
        rows.append(E)
    for p in range(n_dual - 1):
        A = np.eye(len(space))
        for j, s in enumerate(space.strings):
            t = s[:p] + (s[p + 1], s[p]) + s[p + 2:]
            A[j, space.index[t]] += 1.0
        rows.append(A)
    if not rows:
        return space, np.eye(len(space))
    H = null_space(np.vstack(rows))
    return space, H


def _perm_rep(space: _StringSpace, H: np.ndarray, perm: Sequence[int], offset: int) -> np.ndarray:
    """``H† Perm(π) H`` with ``π`` acting on positions ``offset …``."""
    target = np.empty(len(space), dtype=np.int64)
    for j, s in enumerate(space.strings):
        t = list(s)
        for a, b in enumerate(perm):
            t[offset + b] = s[offset + a]
        target[j] = space.index[tuple(t)]
    PH = np.zeros_like(H)
    PH[target] = H
    return H.T @ PH


def _adjacent(N: int, i: int) -> tuple[int, ...]:
    p = list(range(N))
    p[i], p[i + 1] = p[i + 1], p[i]
    return tuple(p)


def _transposition_sum(space: _StringSpace, H: np.ndarray, N: int, offset: int) -> np.ndarray:
    T = np.zeros((H.shape[1], H.shape[1]))
    for i in range(N):
        for j in range(i + 1, N):
            p = list(range(N))
            p[i], p[j] = j, i
            T += _perm_rep(space, H, p, offset)
    return T


def _lower(vec: np.ndarray, a: int, k: int, L: int) -> np.ndarray:
    """``F_a = Σ_pos |a+1⟩⟨a|`` on ``(C^k)^{⊗L}``."""
    t = vec.reshape((k,) * L)
    out = np.zeros_like(t)
    for pos in range(L):
        src = [slice(None)] * L
        dst = [slice(None)] * L
        src[pos], dst[pos] = a, a + 1
        out[tuple(dst)] += t[tuple(src)]
    return out.reshape(-1)


def _lowering_words(hw: np.ndarray, k: int, L: int, target_dim: int) -> list[tuple[int, ...]]:
    """Words in the lowering operators whose images of ``hw`` span its U(k) irrep."""
    words: list[tuple[int, ...]] = [()]
    basis = [hw / np.linalg.norm(hw)]
    queue = deque([((), hw)])
    while queue and len(words) < target_dim:
        w, v = queue.popleft()
        for a in range(k - 1):
            u = _lower(v, a, k, L)
            r = u - sum(np.vdot(b, u) * b for b in basis)
            if np.linalg.norm(r) > 1e-8 * max(1.0, np.linalg.norm(u)):
                basis.append(r / np.linalg.norm(r))
                words.append(w + (a,))
                queue.append((w + (a,), u))
                if len(words) == target_dim:
                    break
    if len(words) != target_dim:
        raise RuntimeError(f"lowering orbit reached {len(words)} of {target_dim} states")
    return words


def _apply_word(vec: np.ndarray, word: Sequence[int], k: int, L: int) -> np.ndarray:
    for a in word:
        vec = _lower(vec, a, k, L)
    return vec


def _irrep_frames(Hfull: np.ndarray, k: int, L: int, dim: int) -> np.ndarray:
    """``U[t]``: the ``t``-th orthonormal irrep state in every copy, shape ``(dim, k^L, m)``."""
    words = _lowering_words(Hfull[:, 0], k, L, dim)
    raw = np.stack([np.stack([_apply_word(Hfull[:, j], w, k, L) for j in range(Hfull.shape[1])], axis=1)
                    for w in words])
    G = np.einsum("ti,si->ts", raw[:, :, 0].conj(), raw[:, :, 0])
    s, U = np.linalg.eigh(G)
    Ginv = U @ np.diag(s ** -0.5) @ U.conj().T
    return np.einsum("tam,ts->sam", raw, Ginv)


# --------------------------------------------------------------- Schur basis


@dataclass
class SchurBasis:
    """Orthonormal ``|p_μ, q_μ⟩`` in ``(C^m)^{⊗N}``; ``blocks[μ][:, :, q]`` spans a copy of ``𝕐_μ``."""

    m: int
    N: int
    blocks: dict[Partition, np.ndarray]

    def projector(self, mu: Sequence[int]) -> np.ndarray:
        B = self.blocks[as_partition(mu)]
        flat = B.reshape(B.shape[0], -1)
        return flat @ flat.conj().T

    def sizes(self) -> dict[Partition, int]:
        return {mu: B.shape[1] * B.shape[2] for mu, B in self.blocks.items()}


def build_schur_basis(m: int, N: int) -> SchurBasis:
    """Schur basis from highest-weight vectors and a common lowering-operator frame.

    ``blocks[μ]`` has shape ``(m^N, dim 𝕐_μ, dim 𝕌^m_μ)``; since lowering
    operators commute with factor permutations, ``Perm(π)`` acts on the ``p``
    index by the same matrix for every ``q``.
    """
    if m < 1 or N < 1:
        raise DomainError("m and N must be positive")
    check_cap(m ** N, "Schur basis")
    blocks = {}
    for mu in enumerate_partitions(N, m):
        space, H = _highest_weight_basis(mu, m, 0, N)
        if H.shape[1] != dim_specht(mu):
            raise RuntimeError(f"found {H.shape[1]} highest-weight vectors for {list(mu)}")
        frames = _irrep_frames(space.embed(H), m, N, dim_unitary_irrep(mu, m))
        blocks[mu] = np.transpose(frames, (1, 2, 0))
    return SchurBasis(m, N, blocks)


# --------------------------------------------------------- Bose invariants


def _bose_invariants(gens: list[np.ndarray], m: int, d: int, N: int) -> np.ndarray:
    """Orthonormal invariants of ``R ⊗ Perm`` on ``C^m ⊗ (C^d)^{⊗N}``.

    ``gens[i] = R(s_i)`` for adjacent transpositions. Each orbit of Bob strings
    contributes ``F ⊗ orbit`` where ``F`` is fixed by the stabilizing Young subgroup.
    """
    cols = []
    dimB = d ** N
    for counts in _compositions(N, d):
        s0 = tuple(a for a in range(d) for _ in range(counts[a]))
        stab = [gens[i] - np.eye(m) for i in range(N - 1) if s0[i] == s0[i + 1]]
        F = null_space(np.vstack(stab)) if stab else np.eye(m)
        if F.shape[1] == 0:
            continue
        orbit = {s0: np.eye(m)}
        queue = deque([s0])
        while queue:
            t = queue.popleft()
            for i in range(N - 1):
                if t[i] == t[i + 1]:
                    continue
                u = t[:i] + (t[i + 1], t[i]) + t[i + 2:]
                if u not in orbit:
                    orbit[u] = gens[i] @ orbit[t]
                    queue.append(u)
        block = np.zeros((m, dimB, F.shape[1]), dtype=F.dtype)
        scale = 1.0 / math.sqrt(len(orbit))
        for t, Rt in orbit.items():
            block[:, np.ravel_multi_index(t, (d,) * N) if N else 0, :] = scale * (Rt @ F)
        cols.append(block.reshape(m * dimB, -1))
    if not cols:
        return np.zeros((m * dimB, 0))
    return np.hstack(cols)


def _compositions(N: int, parts: int):
    if parts == 1:
        yield (N,)
        return
    for first in range(N, -1, -1):
        for rest in _compositions(N - first, parts - 1):
            yield (first,) + rest


# ------------------------------------------------------------------ problems


@dataclass
class SdpData:
    """``min tr(C M)`` over ``M ⪰ 0`` with ``tr(t M) = 1`` (equality) or ``≤ 1`` (inequality)."""

    C: np.ndarray
    t: np.ndarray
    trace_mode: str = "equality"

    @property
    def dim(self) -> int:
        return self.C.shape[0]


@dataclass
class ReducedSdpProblem(SdpData):
    lam: Partition = Partition()
    k: int = 1
    d: int = 1
    N: int = 1
    mus: list[Partition] = field(default_factory=list)
    mu_dims: dict[Partition, int] = field(default_factory=dict)
    mu_labels: list[Partition] = field(default_factory=list)
    A_hat: np.ndarray | None = None
    H: np.ndarray | None = None
    V: np.ndarray | None = None
    self_check: dict | None = None
    _space: _StringSpace | None = None

    @property
    def C_eff(self) -> np.ndarray:
        return self.C

    @property
    def multiplicity(self) -> int:
        return 0 if self.H is None else self.H.shape[1]

    def with_mode(self, trace_mode: str) -> "ReducedSdpProblem":
        _check_mode(trace_mode)
        clone = ReducedSdpProblem(**{f: getattr(self, f) for f in self.__dataclass_fields__})
        clone.trace_mode = trace_mode
        return clone

    def embedding(self) -> tuple[np.ndarray, int]:
        """``(W, dim 𝕌^k_λ)`` with ``W[t]`` the isometry of the ``t``-th U(k) copy into the full space."""
        k, d, N = self.k, self.d, self.N
        L = N + k - 1
        full = k ** L * d ** (N + 1)
        check_cap(full, "block reconstruction")
        dimU = dim_unitary_irrep(self.lam, k)
        frames = _irrep_frames(self._space.embed(self.H), k, L, dimU)
        r = self.V.shape[1]
        V = self.V.reshape(self.multiplicity, d ** N, r)
        # W[t][(aux, a, b), (c, a')] = δ_{aa'} Σ_h U_t[aux, h] V[h, b, c]
        core = np.einsum("tah,hbc->tabc", frames, V)
        W = np.einsum("tabc,ep->taebcp", core, np.eye(d)).reshape(dimU, full, r * d)
        return W, dimU

    def reconstruct(self, M: np.ndarray) -> np.ndarray:
        """``ρ_λ(M) = (1/dim 𝕌^k_λ) Σ_t W_t M W_t†`` on the full level-``N`` space."""
        W, dimU = self.embedding()
        return np.einsum("tij,jk,tlk->il", W, M, W.conj()) / dimU


def _check_mode(mode: str) -> None:
    if mode not in ("equality", "inequality"):
        raise DomainError(f"trace mode must be 'equality' or 'inequality', got {mode!r}")


def block_shapes(k: int, N: int) -> list[Partition]:
    """``λ ⊢ N+k-1`` with exactly ``k`` rows (the blocks with a nonzero objective)."""
    return [lam for lam in enumerate_partitions(N + k - 1, k) if lam.length == k]


def zero_blocks(k: int, N: int) -> list[Partition]:
    """Blocks with ``k-1`` rows: feasible, but ``Π_k`` annihilates them so the objective is 0."""
    if k < 2:
        return []
    return [lam for lam in enumerate_partitions(N + k - 1, k - 1) if lam.length == k - 1]


def build_reduced_problem(X: HermitianOperator, lam: Sequence[int], k: int, N: int | None = None,
                          trace_mode: str = "equality", self_check: bool = True,
                          rng: np.random.Generator | None = None) -> ReducedSdpProblem:
    """Reduced data ``(C_eff, t)`` of the block ``λ``; ``tr(C_eff M) = tr(X_λ ρ_λ(M))``."""
    X = as_operator(X)
    _check_mode(trace_mode)
    lam = as_partition(lam)
    if lam.length != k:
        raise DomainError(f"{list(lam)} must have exactly k={k} rows")
    if N is None:
        N = lam.size - k + 1
    if N < 1 or lam.size != N + k - 1:
        raise DomainError(f"{list(lam)} is not a partition of N+k-1 with N={N}")
    d = X.d
    L = N + k - 1
    check_cap(k ** L, "auxiliary space")

    mus = admissible_mus(lam, k)
    space, H = _highest_weight_basis(lam, k, k - 1, N)
    m = H.shape[1]
    if m != sum(dim_specht(mu) for mu in mus):
        raise RuntimeError(f"multiplicity {m} differs from Σ dim 𝕐_μ for {list(lam)}")
    check_cap(m * d ** (N + 1), "reduced variable embedding")

    offset = k - 1
    gens = [_perm_rep(space, H, _adjacent(N, i), offset) for i in range(N - 1)]
    if len(mus) > 1:
        T = _transposition_sum(space, H, N, offset)
        w, U = np.linalg.eigh(T)
    V_parts, labels, mu_dims = [], [], {}
    for mu in mus:
        if len(mus) > 1:
            K = U[:, np.abs(w - contents_sum(mu)) < 1e-6]
        else:
            K = np.eye(m)
        if K.shape[1] != dim_specht(mu):
            raise RuntimeError(f"isotypic part of {list(mu)} has dimension {K.shape[1]}")
        gens_mu = [K.T @ g @ K for g in gens]
        inv = _bose_invariants(gens_mu, K.shape[1], d, N)
        inv = np.einsum("hj,jbc->hbc", K, inv.reshape(K.shape[1], d ** N, -1)).reshape(m * d ** N, -1)
        r = inv.shape[1]
        if r != dim_unitary_irrep(mu, d):
            raise RuntimeError(f"found {r} invariants for {list(mu)}, expected dim 𝕌^d_μ")
        V_parts.append(inv)
        labels += [mu] * r
        mu_dims[mu] = r
    V = np.hstack(V_parts)

    Hfull = space.embed(H)
    P = central_projector(remove_first_column(lam), k)
    AH = np.einsum("ab,bcm->acm", k * antisymmetrizer_top(k), Hfull.reshape(k ** k, k ** (N - 1), m))
    AH = np.einsum("cg,agm->acm", P, AH).reshape(-1, m)
    A_hat = Hfull.T @ AH
    A_hat = (A_hat + A_hat.T) / 2

    r = V.shape[1]
    V4 = V.reshape(m, d, d ** (N - 1), r)
    X4 = X.matrix.reshape(d, d, d, d)
    # C[(c,a),(c',a')] = Σ conj(V[h,b1,β,c]) Â[h,h'] X[(a,b1),(a',b1')] V[h',b1',β,c']
    C = np.einsum("hbzc,hg,abef,gfzq->caqe", V4.conj(), A_hat, X4, V4, optimize=True).reshape(r * d, r * d)
    C = (C + C.conj().T) / 2

    problem = ReducedSdpProblem(C=C, t=np.eye(r * d), trace_mode=trace_mode, lam=lam, k=k, d=d, N=N,
                                mus=mus, mu_dims=mu_dims, mu_labels=labels, A_hat=A_hat, H=H, V=V,
                                _space=space)
    if self_check and k ** L * d ** (N + 1) <= dense_cap():
        problem.self_check = verify_problem(problem, X, rng or np.random.default_rng(0))
        if problem.self_check["objective"] > SELF_CHECK_TOL or problem.self_check["trace"] > SELF_CHECK_TOL:
            raise RuntimeError(f"reduced problem self-check failed: {problem.self_check}")
    return problem


def _random_psd(D: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
    M = G @ G.conj().T
    return M / np.trace(M).real


def verify_problem(problem: ReducedSdpProblem, X: HermitianOperator, rng: np.random.Generator,
                   samples: int = 3) -> dict:
    """Max deviations of ``tr(C M)`` from ``tr(X_λ ρ_λ(M))`` and of ``tr M`` from ``tr ρ_λ(M)``."""
    W, dimU = problem.embedding()
    XW = np.stack([apply_X_lambda(X, problem.lam, problem.k, problem.N, Wt) for Wt in W])
    obj_err = trace_err = 0.0
    for _ in range(samples):
        M = _random_psd(problem.dim, rng)
        full_obj = np.einsum("tij,tik,kj->", W.conj(), XW, M).real / dimU
        full_tr = np.einsum("tij,tik,kj->", W.conj(), W, M).real / dimU
        obj_err = max(obj_err, abs(full_obj - np.trace(problem.C @ M).real))
        trace_err = max(trace_err, abs(full_tr - np.trace(problem.t @ M).real))
    return {"objective": float(obj_err), "trace": float(trace_err)}


# ------------------------------------------------------------------- solving


@dataclass
class SdpSolution:
    value: float
    M: np.ndarray
    dual: float
    primal_residual: float
    dual_residual: float
    gap: float
    iterations: int
    status: str
    method: str

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "dual": self.dual,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "gap": self.gap,
            "iterations": self.iterations,
            "status": self.status,
            "method": self.method,
        }


def _certificate(C: np.ndarray, t: np.ndarray, M: np.ndarray, mode: str, y: float) -> tuple[float, float, float]:
    """Primal residual, dual residual and gap for primal ``M`` and dual ``y``.

    Dual (equality): ``max y`` s.t. ``C − y t ⪰ 0``; (inequality): additionally ``y ≤ 0``.
    """
    tr = float(np.trace(t @ M).real)
    min_eig_M = float(np.linalg.eigvalsh((M + M.conj().T) / 2)[0]) if M.size else 0.0
    if mode == "equality":
        p_res = max(abs(tr - 1.0), max(0.0, -min_eig_M))
    else:
        p_res = max(0.0, tr - 1.0, -min_eig_M)
    S = C - y * t
    d_res = max(0.0, -float(np.linalg.eigvalsh((S + S.conj().T) / 2)[0]))
    if mode == "inequality":
        d_res = max(d_res, y)
    gap = abs(float(np.trace(C @ M).real) - y)
    return p_res, d_res, gap


def solve_sdp(problem: SdpData, gap_tol: float = 1e-7, method: str = "auto",
              trace_mode: str | None = None) -> SdpSolution:
    """Minimize ``tr(C M)`` over ``M ⪰ 0`` with one trace constraint.

    With a single trace functional the optimum is a generalized eigenvalue:
    ``λ_min(C, t)`` in equality mode and ``min(0, λ_min)`` in inequality mode.
    ``method='eig'`` solves it that way (primal ``vv†``, dual ``y = λ_min``);
    ``method='cvxpy'`` hands the SDP to an interior-point solver. ``auto``
    uses ``eig`` unless ``t`` is singular.
    """
    mode = trace_mode or problem.trace_mode
    _check_mode(mode)
    C = np.asarray(problem.C, dtype=complex)
    t = np.asarray(problem.t, dtype=complex)
    D = C.shape[0]
    if D == 0:
        raise DomainError("empty variable space")
    if method not in ("auto", "eig", "cvxpy"):
        raise DomainError(f"unknown method {method!r}")
    s, U = np.linalg.eigh((t + t.conj().T) / 2)
    if s[0] < -1e-10 * max(1.0, s[-1]):
        raise DomainError("trace functional is not PSD")
    singular = s[0] <= 1e-12 * max(1.0, s[-1])
    if method == "cvxpy" or (method == "auto" and singular):
        return _solve_cvxpy(C, t, mode, gap_tol)

    Tm = U / np.sqrt(s)  # t^{-1/2} up to a unitary
    w, v = np.linalg.eigh(Tm.conj().T @ C @ Tm)
    lam_min = float(w[0])
    z = Tm @ v[:, 0]
    if mode == "equality" or lam_min < 0:
        y, M = lam_min, np.outer(z, z.conj())
    else:
        y, M = 0.0, np.zeros((D, D), dtype=complex)
    value = float(np.trace(C @ M).real)
    p_res, d_res, gap = _certificate(C, t, M, mode, y)
    tol = max(gap_tol, 1e-9 * max(1.0, abs(value)))
    status = "optimal" if max(p_res, d_res, gap) <= tol else "infeasible-numeric"
    return SdpSolution(value, M, y, p_res, d_res, gap, 1, status, "eig")


def _solve_cvxpy(C: np.ndarray, t: np.ndarray, mode: str, gap_tol: float) -> SdpSolution:
    import cvxpy as cp

    D = C.shape[0]
    if D > 500:
        raise ResourceError(f"interior-point route limited to D <= 500, got {D}")
    M = cp.Variable((D, D), hermitian=True)
    trace = cp.real(cp.trace(t @ M))
    con = trace == 1 if mode == "equality" else trace <= 1
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(C @ M))), [M >> 0, con])
    solver = "CLARABEL" if "CLARABEL" in cp.installed_solvers() else "SCS"
    try:
        prob.solve(solver=solver)
    except cp.error.SolverError:
        prob.solve(solver="SCS", eps=1e-9)
    if prob.status in ("unbounded", "unbounded_inaccurate"):
        return SdpSolution(-math.inf, np.zeros((D, D), complex), -math.inf, 0.0, 0.0, math.inf,
                           0, "infeasible-numeric", "cvxpy")
    Mv = np.asarray(M.value)
    y_raw = con.dual_value
    y = -float(np.real(y_raw)) if mode == "inequality" else float(np.real(y_raw))
    # cvxpy reports the multiplier with its own sign convention; keep the one that certifies
    cands = [y, -y]
    y = min(cands, key=lambda c: _certificate(C, t, Mv, mode, c)[1] + abs(np.trace(C @ Mv).real - c))
    p_res, d_res, gap = _certificate(C, t, Mv, mode, y)
    iters = int(prob.solver_stats.num_iters or 0)
    value = float(prob.value)
    ok = prob.status == "optimal" and max(p_res, d_res, gap) <= max(gap_tol, 1e-6)
    return SdpSolution(value, Mv, y, p_res, d_res, gap, iters, "optimal" if ok else "max-iter", "cvxpy")


# ---------------------------------------------------------------- unreduced


def _symmetric_basis(m: int, N: int) -> np.ndarray:
    """Orthonormal basis of ``Sym^N(C^m)`` as columns of an ``m^N × C(m+N-1,N)`` matrix."""
    cols = []
    for combo in itertools.combinations_with_replacement(range(m), N):
        perms = set(itertools.permutations(combo))
        v = np.zeros(m ** N)
        for p in perms:
            v[np.ravel_multi_index(p, (m,) * N)] = 1.0
        cols.append(v / math.sqrt(len(perms)))
    return np.stack(cols, axis=1)


def bose_isometry(k: int, d: int, N: int) -> np.ndarray:
    """Isometry onto ``range(ℰ) ⊗ C^d ⊗ Sym^N(C^k ⊗ C^d)`` in the global factor ordering."""
    full = k ** (N + k - 1) * d ** (N + 1)
    check_cap(full, "unreduced level")
    E = dualization_map(k)
    S = _symmetric_basis(k * d, N)
    cols = np.einsum("ei,ab,sc->easibc", E, np.eye(d), S).reshape(E.shape[0] * d * S.shape[0], -1)
    paired = [k] * (k - 1) + [d] + [k, d] * N
    # paired order is (dual, Alice, ext_1, bob_1, ...); send each factor to its global slot
    perm = list(range(k - 1)) + [k - 1 + N]
    for i in range(N):
        perm += [k - 1 + i, k + N + i]
    return permute_factors(cols, paired, perm)


def _apply_X_kN(X: HermitianOperator, k: int, N: int, vec: np.ndarray) -> np.ndarray:
    d = X.d
    cols = vec.reshape(k ** k, k ** (N - 1), d * d, d ** (N - 1), -1)
    out = np.einsum("ab,bcefz->acefz", k * antisymmetrizer_top(k), cols)
    out = np.einsum("eh,achfz->acefz", X.matrix, out)
    return out.reshape(vec.shape)


def unreduced_problem(X: HermitianOperator, k: int, N: int) -> SdpData:
    X = as_operator(X)
    if N < 1:
        raise DomainError("N must be positive")
    S = bose_isometry(k, X.d, N)
    check_cap(S.shape[1], "Bose-symmetric subspace")
    C = S.conj().T @ _apply_X_kN(X, k, N, S)
    return SdpData((C + C.conj().T) / 2, np.eye(S.shape[1]), "equality")


def solve_unreduced(X: HermitianOperator, k: int, N: int, gap_tol: float = 1e-7, method: str = "auto") -> SdpSolution:
    """Level-``N`` extendibility SDP ``𝒮_N`` with Bose symmetry imposed by restriction."""
    return solve_sdp(unreduced_problem(X, k, N), gap_tol, method)


def solve_level_by_blocks(X: HermitianOperator, k: int, N: int, gap_tol: float = 1e-7,
                          method: str = "auto") -> dict[Partition, float]:
    """``𝒮_λ`` for every block at level ``N`` (zero-objective blocks reported as 0)."""
    out = {lam: 0.0 for lam in zero_blocks(k, N)}
    for lam in block_shapes(k, N):
        problem = build_reduced_problem(X, lam, k, N, self_check=False)
        out[lam] = solve_sdp(problem, gap_tol, method).value
    return out


# --------------------------------------------------------------- certify


@dataclass
class Tolerances:
    cert: float = 1e-6
    refute: float = 1e-6
    gap: float = 1e-7

    def __post_init__(self) -> None:
        if min(self.cert, self.refute, self.gap) <= 0:
            raise DomainError("tolerances must be positive")


@dataclass
class Verdict:
    verdict: str
    k: int
    d: int
    levels: list[dict]
    witness: dict | None
    bound_checks: list[dict]
    search: dict | None = None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "k": self.k,
            "d": self.d,
            "levels": self.levels,
            "witness": self.witness,
            "bound_checks": self.bound_checks,
            "search": self.search,
        }


def bound_factor(n: int, k: int) -> float:
    """``(n+k-1) / (k(kn-k+1))``, decreasing to ``1/k²``."""
    return (n + k - 1) / (k * (k * n - k + 1))


def bound_chain(S_unreduced: float | None, W: float, vk_hat: float, n: int, k: int, tol: float = 1e-6) -> list[dict]:
    """Check ``𝒮_{kn-k+1} ≤ 𝒲_{(n^k)} ≤ c·𝒱_k ≤ 𝒱_k/k² ≤ 0`` with ``𝒱_k`` replaced by its estimate.

    A search estimate upper-bounds ``𝒱_k`` and ``𝒱_k ≤ 0``, so ``min(𝒱̂_k, 0)`` keeps every link valid.
    """
    v = min(vk_hat, 0.0)
    c = bound_factor(n, k)
    links = []
    if S_unreduced is not None:
        links.append(("S_unreduced <= W", W - S_unreduced))
    links += [("W <= c*V_k", c * v - W), ("c*V_k <= V_k/k^2", v / k ** 2 - c * v), ("V_k/k^2 <= 0", -v / k ** 2)]
    return [{"n": n, "name": name, "slack": float(s), "holds": bool(s >= -tol)} for name, s in links]


def certify(X: HermitianOperator, k: int, n_max: int = 3, tol: Tolerances | None = None, seed: int = 0,
            restarts: int = 64, threads: int = 1, min_eig_shortcut: bool = False) -> Verdict:
    """Run the rectangular hierarchy ``λ = (n^k)``, ``n = 1..n_max``, beside a witness search.

    * ``refuted`` when the search finds ``f(x,y) < -refute`` (a violating state is attached);
    * ``certified`` when some ``𝒮_{(n^k)} ≥ -cert``;
    * ``inconclusive`` otherwise.
    """
    from .witness_search import minimize_f, minimize_schmidt_rank_k, schmidt_expectation

    X = as_operator(X)
    tol = tol or Tolerances()
    d = X.d
    if not 1 <= k <= d:
        raise DomainError(f"need 1 <= k <= d, got k={k}, d={d}")
    if n_max < 1:
        raise DomainError("n_max must be at least 1")

    search = minimize_f(X, k, restarts=restarts, seed=seed, threads=threads)
    witness = None
    if search.value < -tol.refute:
        polished = minimize_schmidt_rank_k(X, k, restarts=restarts, seed=seed, threads=threads)
        direct = schmidt_expectation(X, search.pair)
        best = polished if polished.value < direct else search
        witness = {
            "f": search.value,
            "violation": min(polished.value, direct),
            **best.pair.to_json(),
        }

    levels, checks = [], []
    if min_eig_shortcut and k == d:
        lam_min = float(np.linalg.eigvalsh(X.matrix)[0])
        levels.append({"n": None, "N": None, "S": lam_min, "W": min(lam_min, 0.0), "status": "min-eig", "D": d * d})
    else:
        for n in range(1, n_max + 1):
            lam, N = rectangle(n, k), k * n - k + 1
            entry = {"n": n, "N": N}
            try:
                problem = build_reduced_problem(X, lam, k, N, self_check=False)
                S = solve_sdp(problem, tol.gap, trace_mode="equality")
                W = solve_sdp(problem, tol.gap, trace_mode="inequality")
                entry.update({"S": S.value, "W": W.value, "status": S.status, "D": problem.dim})
            except ResourceError as exc:
                entry.update({"S": None, "W": None, "status": "skipped", "reason": str(exc)})
                levels.append(entry)
                continue
            levels.append(entry)
            try:
                S_un = solve_unreduced(X, k, N, tol.gap).value
            except ResourceError:
                S_un = None
            checks += bound_chain(S_un, entry["W"], search.value, n, k)

    if witness is not None:
        verdict = "refuted"
    elif any(lv["S"] is not None and lv["S"] >= -tol.cert for lv in levels):
        verdict = "certified"
    else:
        verdict = "inconclusive"
    return Verdict(verdict, k, d, levels, witness, checks, search.to_json())
