"""Property suites run by ``blockpos verify``.

Each suite returns a list of :class:`Check`; a suite passes when every
non-informational check passes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import complexity as cx
from .partitions import (
    admissible_mus,
    dim_specht,
    dim_unitary_irrep,
    enumerate_partitions,
    rectangle,
    standard_tableaux,
)
from .reduced_sdp import block_shapes, build_reduced_problem, solve_level_by_blocks, solve_sdp, solve_unreduced
from .symfun import class_weight, pieri_one_box, projected_trace, schur_eval, schur_eval_tableaux, sn_character
from .tensor_lab import (
    HermitianOperator,
    central_projector,
    dualization_residual,
    f_lambda_mu,
    haar_unitary,
    random_hermitian,
    random_pair,
    verify_projection_equality,
)
from .witness_search import check_bounds, minimize_f, minimize_schmidt_rank_k, witness_operator


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    informational: bool = False

    def __post_init__(self) -> None:
        self.passed = bool(self.passed)  # numpy comparisons hand back np.bool_

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "informational": self.informational}


def suite_projectors(rng: np.random.Generator) -> list[Check]:
    out = []
    for m in (2, 3):
        for N in (2, 3):
            mus = enumerate_partitions(N, m)
            Ps = {mu: central_projector(mu, m) for mu in mus}
            total = sum(Ps.values())
            err = np.max(np.abs(total - np.eye(m ** N)))
            for mu, P in Ps.items():
                err = max(err, np.max(np.abs(P @ P - P)), np.max(np.abs(P - P.T)))
                rank = int(round(np.trace(P)))
                ok = rank == dim_specht(mu) * dim_unitary_irrep(mu, m)
                out.append(Check(f"rank P{list(mu)} m={m}", ok, f"rank {rank}"))
                U = haar_unitary(m, rng)
                UN = U
                for _ in range(N - 1):
                    UN = np.kron(UN, U)
                out.append(Check(f"U-invariance P{list(mu)} m={m}", np.max(np.abs(UN @ P @ UN.conj().T - P)) < 1e-9))
            out.append(Check(f"resolution of identity m={m} N={N}", err < 1e-10, f"{err:.2e}"))
    return out


def suite_schur(rng: np.random.Generator) -> list[Check]:
    out = []
    for N in range(1, 7):
        for c in enumerate_partitions(N):
            s = sum(sn_character(mu, c) ** 2 for mu in enumerate_partitions(N))
            if s != class_weight(c):
                out.append(Check(f"column orthogonality c={list(c)}", False))
    out.append(Check("column orthogonality N<=6", not out))
    worst = 0.0
    for N in range(1, 6):
        for mu in enumerate_partitions(N):
            eta = rng.random(3)
            a, b = schur_eval(mu, eta), schur_eval_tableaux(mu, eta)
            worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    out.append(Check("Frobenius vs tableaux", worst < 1e-10, f"{worst:.2e}"))
    eta = rng.random(2)
    for lam_minus in ([], [1], [2, 1], [2, 2]):
        lhs, rhs, diff = pieri_one_box(lam_minus, 2, eta)
        out.append(Check(f"Pieri one box {lam_minus}", diff < 1e-12 * max(1.0, abs(lhs)), f"{diff:.2e}"))
    for mu in ([2, 1], [1, 1, 1], [3]):
        eta = rng.random(2)
        P = central_projector(mu, 2)
        rho = np.diag(eta)
        rhoN = np.kron(np.kron(rho, rho), rho)
        err = abs(np.trace(P @ rhoN) - projected_trace(mu, eta))
        out.append(Check(f"projected trace {mu}", err < 1e-10, f"{err:.2e}"))
    return out


def suite_dualization(rng: np.random.Generator) -> list[Check]:
    out = [Check(f"k E† Π_k E = |φ_k⟩⟨φ_k| k={k}", dualization_residual(k) <= 1e-12, f"{dualization_residual(k):.2e}")
           for k in (2, 3)]
    for k, N in ((2, 2), (2, 3), (3, 2)):
        for lam in enumerate_partitions(N + k - 1, k):
            if lam.length == k:
                err = verify_projection_equality(lam, k)
                out.append(Check(f"Π_k⊗P_λ⁻ = Π_k P_λ Π_k λ={list(lam)}", err <= 1e-10, f"{err:.2e}"))
    return out


def suite_objective_identity(rng: np.random.Generator) -> list[Check]:
    """Rectangular blocks must match; other shapes are reported for information only."""
    out = []
    for k, d, N in ((2, 2, 3), (2, 2, 2), (2, 3, 2), (3, 2, 2)):
        X = random_hermitian(d, rng)
        for lam in block_shapes(k, N):
            rect = len(set(lam)) == 1
            for mu in admissible_mus(lam, k):
                worst = 0.0
                for _ in range(10):
                    a, b = f_lambda_mu(X, lam, mu, random_pair(d, k, rng))
                    worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1e-300))
                out.append(Check(f"f_λμ routes k={k} d={d} λ={list(lam)} μ={list(mu)}", worst <= 1e-9,
                                 f"rel {worst:.2e}", informational=not rect))
    return out


def suite_branching(rng: np.random.Generator) -> list[Check]:
    mus = admissible_mus([3, 2, 1], 3)
    total = sum(dim_specht(mu) for mu in mus)
    # skew tableaux of (3,2,1)/(1,1) = SYT of (3,2,1) with 1, 2 stacked in the first column
    skew = sum(1 for t in standard_tableaux([3, 2, 1]) if t[0][0] == 1 and t[1][0] == 2)
    out = [
        Check("admissible (3,2,1)", [list(m) for m in mus] == [[3, 1], [2, 2], [2, 1, 1]], str([list(m) for m in mus])),
        Check("Σ dim 𝕐_μ = 8 = #skew SYT (3,2,1)/(1,1)", total == 8 == skew, f"{total} {skew}"),
    ]
    for lam in (rectangle(3, 2), rectangle(2, 3)):
        out.append(Check(f"unique μ for {list(lam)}", len(admissible_mus(lam, lam.length)) == 1))
    for N in range(1, 8):
        for lam in enumerate_partitions(N):
            syt = len(standard_tableaux(lam))
            if syt != dim_specht(lam):
                out.append(Check(f"hook formula {list(lam)}", False))
    return out


def suite_complexity_oracles(rng: np.random.Generator) -> list[Check]:
    out = []
    for k, d, N in ((2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 3, 2)):
        for lam in block_shapes(k, N):
            c = cx.complexity_general(lam, d, k)
            hom = cx.hom_dimension(lam, d, k)
            br = cx.complexity_by_branching(lam, d, k)
            ok = c == hom == br["pieri"] == br["characters"]
            out.append(Check(f"𝒞 oracles k={k} d={d} λ={list(lam)}", ok, f"{c} {hom} {br}"))
    for d in (2, 3, 4):
        out.append(Check(f"collapse d={d}", cx.collapse_check(d, range(1, 9))["holds"]))
    ok = all(cx.complexity_rectangular(d, k, n) == cx.complexity_general(rectangle(n, k), d, k)
             for d in range(1, 5) for k in range(1, d + 1) for n in range(1, 5))
    out.append(Check("rectangular formula = branching sum", ok))
    return out


def suite_bounds(rng: np.random.Generator) -> list[Check]:
    out = []
    k, d = 2, 2
    ops = {"-I": HermitianOperator(d, -np.eye(d * d)), "W_1": witness_operator(1, d)}
    for name, X in ops.items():
        v = minimize_schmidt_rank_k(X, k, restarts=16, seed=1).value
        vk = minimize_f(X, k, restarts=16, seed=1).value
        for bc in check_bounds(v, vk, k):
            out.append(Check(f"{name}: {bc.name}", bc.holds, f"slack {bc.slack:.2e}"))
        s_un = solve_unreduced(X, k, 1).value
        blocks = solve_level_by_blocks(X, k, 1)
        out.append(Check(f"{name}: S_1 = min S_λ", abs(s_un - min(blocks.values())) < 1e-6,
                         f"{s_un:.6f} vs {min(blocks.values()):.6f}"))
        p = build_reduced_problem(X, rectangle(1, k), k, 1)
        W = solve_sdp(p, trace_mode="inequality").value
        out.append(Check(f"{name}: S_1 <= W <= V_k", s_un - 1e-6 <= W <= min(vk, 0) + 1e-6,
                         f"{s_un:.4f} {W:.4f} {vk:.4f}"))
    return out


SUITES: dict[str, Callable[[np.random.Generator], list[Check]]] = {
    "projectors": suite_projectors,
    "schur": suite_schur,
    "dualization": suite_dualization,
    "objective-identity": suite_objective_identity,
    "branching": suite_branching,
    "complexity-oracles": suite_complexity_oracles,
    "bounds": suite_bounds,
}


def run_suite(name: str, seed: int = 0) -> list[Check]:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](np.random.default_rng(seed))
