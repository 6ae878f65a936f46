import itertools

import numpy as np
import pytest

from blockpos.complexity import complexity_general
from blockpos.errors import DomainError, ResourceError
from blockpos.partitions import dim_specht, dim_unitary_irrep, rectangle
from blockpos.reduced_sdp import (
    SdpData,
    Tolerances,
    block_shapes,
    bose_isometry,
    bound_chain,
    bound_factor,
    build_reduced_problem,
    build_schur_basis,
    certify,
    null_space,
    solve_level_by_blocks,
    solve_sdp,
    solve_unreduced,
    unreduced_problem,
    zero_blocks,
)
from blockpos.tensor_lab import (
    HermitianOperator,
    apply_delta,
    central_projector,
    hierarchy_dims,
    perm_matrix,
    random_hermitian,
)
from blockpos.witness_search import witness_operator


def test_null_space_uses_absolute_threshold():
    assert null_space(np.array([[1e-16]])).shape == (1, 1)
    assert null_space(np.array([[1.0]])).shape == (1, 0)
    ns = null_space(np.array([[1.0, 1.0]]))
    np.testing.assert_allclose(ns.T @ ns, np.eye(1), atol=1e-12)


@pytest.mark.parametrize("m,N", [(2, 2), (2, 3), (3, 3), (2, 4)])
def test_schur_basis(m, N):
    basis = build_schur_basis(m, N)
    cols = np.hstack([B.reshape(m ** N, -1) for B in basis.blocks.values()])
    np.testing.assert_allclose(cols.conj().T @ cols, np.eye(m ** N), atol=1e-10)
    for mu, B in basis.blocks.items():
        assert B.shape == (m ** N, dim_specht(mu), dim_unitary_irrep(mu, m))
        np.testing.assert_allclose(basis.projector(mu), central_projector(mu, m), atol=1e-10)
        # Perm(π) acts on p through one matrix for all q
        for perm in itertools.permutations(range(N)):
            rep = np.einsum("ipq,ij,jrq->pr", B.conj(), perm_matrix(perm, m), B)
            for q in range(B.shape[2]):
                np.testing.assert_allclose(B[:, :, q].conj().T @ perm_matrix(perm, m) @ B[:, :, q],
                                           rep / B.shape[2], atol=1e-10)


@pytest.mark.parametrize("k,d,N", [(1, 2, 2), (2, 2, 1), (2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 2, 2)])
def test_problem_size_and_self_check(k, d, N, rng):
    X = random_hermitian(d, rng)
    for lam in block_shapes(k, N):
        p = build_reduced_problem(X, lam, k, N)
        assert p.dim == complexity_general(lam, d, k)
        assert p.multiplicity == sum(dim_specht(mu) for mu in p.mus)
        assert max(p.self_check.values()) < 1e-9
        np.testing.assert_allclose(p.C, p.C.conj().T, atol=1e-14)


def test_reconstruction_is_a_bose_symmetric_state(rng):
    k, d, N = 2, 2, 2
    X = random_hermitian(d, rng)
    p = build_reduced_problem(X, (2, 1), k, N)
    G = rng.standard_normal((p.dim, p.dim)) + 1j * rng.standard_normal((p.dim, p.dim))
    M = G @ G.conj().T
    M /= np.trace(M).real
    rho = p.reconstruct(M)
    assert np.trace(rho).real == pytest.approx(1)
    assert np.linalg.eigvalsh(rho)[0] > -1e-12
    for perm in itertools.permutations(range(N)):
        np.testing.assert_allclose(apply_delta(rho, perm, k, d, N), rho, atol=1e-12)
    dims = hierarchy_dims(k, d, N)
    assert rho.shape == (np.prod(dims),) * 2


def test_bad_shapes():
    X = HermitianOperator(2, np.eye(4))
    with pytest.raises(DomainError):
        build_reduced_problem(X, (3,), 2)
    with pytest.raises(DomainError):
        build_reduced_problem(X, (2, 1), 2, N=3)
    with pytest.raises(DomainError):
        build_reduced_problem(X, (1, 1), 2, trace_mode="maybe")


def test_block_lists():
    assert block_shapes(2, 3) == [(3, 1), (2, 2)]
    assert zero_blocks(2, 3) == [(4,)]
    assert zero_blocks(1, 3) == []


@pytest.mark.parametrize("k", [1, 2, 3])
def test_minus_identity_single_box_block(k):
    X = HermitianOperator(2 if k < 3 else 3, -np.eye(4 if k < 3 else 9))
    p = build_reduced_problem(X, [1] * k, k, 1)
    assert solve_sdp(p).value == pytest.approx(-k, abs=1e-9)


def test_identity_blocks_nonnegative():
    X = HermitianOperator(2, np.eye(4))
    for lam in block_shapes(2, 3):
        assert solve_sdp(build_reduced_problem(X, lam, 2, 3)).value >= -1e-12


def test_solver_routes_agree(rng):
    X = random_hermitian(2, rng)
    p = build_reduced_problem(X, (2, 1), 2, 2)
    eig = solve_sdp(p, method="eig")
    cvx = solve_sdp(p, method="cvxpy")
    assert eig.status == "optimal"
    assert eig.value == pytest.approx(cvx.value, abs=1e-6)
    assert max(eig.primal_residual, eig.dual_residual, eig.gap) < 1e-9
    ineq = solve_sdp(p, trace_mode="inequality")
    assert ineq.value == pytest.approx(min(eig.value, 0.0), abs=1e-12)
    assert p.with_mode("inequality").trace_mode == "inequality"


def test_solver_handles_singular_trace_functional():
    C = np.diag([1.0, -2.0])
    t = np.diag([1.0, 0.0])
    sol = solve_sdp(SdpData(C, t, "inequality"))
    assert sol.method == "cvxpy"
    # M[1,1] is free and costs -2, so the problem is unbounded or reported as such
    assert sol.status != "optimal" or sol.value < -1e3


def test_solver_rejects_bad_input():
    with pytest.raises(DomainError):
        solve_sdp(SdpData(np.eye(2), -np.eye(2)))
    with pytest.raises(DomainError):
        solve_sdp(SdpData(np.eye(2), np.eye(2)), method="newton")
    with pytest.raises(DomainError):
        solve_sdp(SdpData(np.zeros((0, 0)), np.zeros((0, 0))))


@pytest.mark.parametrize("k,d,N", [(2, 2, 1), (2, 2, 2), (2, 2, 3), (1, 2, 3), (3, 3, 1)])
def test_bose_isometry(k, d, N):
    S = bose_isometry(k, d, N)
    np.testing.assert_allclose(S.conj().T @ S, np.eye(S.shape[1]), atol=1e-12)
    for perm in itertools.permutations(range(N)):
        np.testing.assert_allclose(apply_delta(S, perm, k, d, N), S, atol=1e-12)


@pytest.mark.parametrize("N", [1, 2])
def test_blocks_reproduce_unreduced_level(N, rng):
    X = random_hermitian(2, rng)
    blocks = solve_level_by_blocks(X, 2, N)
    assert min(blocks.values()) == pytest.approx(solve_unreduced(X, 2, N).value, abs=1e-8)


def test_unreduced_cap(monkeypatch, rng):
    monkeypatch.setenv("BLOCKPOS_CAP", "100")
    with pytest.raises(ResourceError):
        unreduced_problem(random_hermitian(2, rng), 2, 3)


def test_bound_factor():
    assert bound_factor(1, 2) == 1
    assert bound_factor(2, 2) == pytest.approx(0.5)
    assert bound_factor(1000, 3) == pytest.approx(1 / 9, rel=1e-2)
    links = bound_chain(-1.0, -0.5, -1.0, 2, 2)
    assert all(link["holds"] for link in links)
    assert not bound_chain(0.1, -0.5, -1.0, 2, 2)[0]["holds"]


def test_certify_identity():
    v = certify(HermitianOperator(2, np.eye(4)), 2, n_max=2, restarts=4)
    assert v.verdict == "certified"
    assert all(c["holds"] for c in v.bound_checks)


def test_certify_refutes_with_witness():
    v = certify(witness_operator(1, 2), 2, n_max=1, restarts=8)
    assert v.verdict == "refuted"
    assert v.witness["violation"] <= -0.5 + 1e-6
    assert v.witness["f"] == pytest.approx(-0.25, abs=1e-6)


def test_certify_levels_for_dps_case():
    v = certify(witness_operator(1, 2), 1, n_max=3, restarts=4)
    S = [lv["S"] for lv in v.levels]
    np.testing.assert_allclose(S, [-1 / 2, -1 / 4, -1 / 6], atol=1e-9)
    assert v.verdict == "inconclusive"


def test_certify_rejects_bad_k():
    with pytest.raises(DomainError):
        certify(HermitianOperator(2, np.eye(4)), 3)
    with pytest.raises(DomainError):
        Tolerances(cert=0)


def test_min_eig_shortcut(rng):
    X = random_hermitian(2, rng)
    v = certify(X, 2, min_eig_shortcut=True, restarts=4)
    assert v.levels[0]["S"] == pytest.approx(np.linalg.eigvalsh(X.matrix)[0])


def test_reconstruction_is_confined_to_block(rng):
    k, d, N = 2, 2, 3
    X = random_hermitian(d, rng)
    for lam in block_shapes(k, N):
        p = build_reduced_problem(X, lam, k, N)
        Pl = np.kron(central_projector(lam, k), np.eye(d ** (N + 1)))
        for _ in range(5):
            G = rng.standard_normal((p.dim, p.dim)) + 1j * rng.standard_normal((p.dim, p.dim))
            rho = p.reconstruct(G @ G.conj().T)
            np.testing.assert_allclose(Pl @ rho @ Pl, rho, atol=1e-9)
            assert np.linalg.eigvalsh(rho)[0] >= -1e-9


def test_weak_trace_value_bounded_by_feasible_points(rng):
    from blockpos.tensor_lab import f_lambda_mu, random_pair

    k, d, N = 2, 2, 1
    X = random_hermitian(d, rng)
    lam = rectangle(1, k)
    W = solve_sdp(build_reduced_problem(X, lam, k, N), trace_mode="inequality").value
    assert W <= 0
    for _ in range(20):
        a, _ = f_lambda_mu(X, lam, (1,), random_pair(d, k, rng))
        assert W <= max(a, 0) + 1e-9
