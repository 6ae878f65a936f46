import csv
import io
import json
from fractions import Fraction
from math import factorial

import pytest

from blockpos.complexity import (
    asymptotic_exponent,
    branching_multiplicity,
    character_multiplicity,
    collapse_check,
    complexity_by_branching,
    complexity_general,
    complexity_rectangular,
    complexity_report,
    complexity_table,
    hom_dimension,
    ratio_diagnostics,
    skew_dim_check,
    table_to_csv,
    table_to_json,
    unreduced_complexity,
    young_orthogonal_form,
)
from blockpos.errors import DomainError
from blockpos.partitions import Partition, dim_specht, dim_unitary_irrep, enumerate_partitions, rectangle
from blockpos.reduced_sdp import block_shapes


def test_examples():
    assert complexity_rectangular(2, 1, 1) == 4
    assert complexity_rectangular(3, 3, 5) == 9
    assert complexity_rectangular(3, 2, 1) == 9
    assert unreduced_complexity(2, 2, 3) == 256
    with pytest.raises(DomainError):
        complexity_rectangular(2, 3, 1)
    with pytest.raises(DomainError):
        complexity_rectangular(2, 1, 0)


@pytest.mark.parametrize("d", range(1, 6))
def test_rectangular_equals_hook_content(d):
    for k in range(1, d + 1):
        for n in range(1, 7):
            mu = [n] + [n - 1] * (k - 1)
            assert complexity_rectangular(d, k, n) == d * dim_unitary_irrep(mu, d)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_collapse(d):
    report = collapse_check(d, range(1, 9))
    assert report["holds"] and set(report["values"].values()) == {d * d}


def test_k1_is_dps_size():
    # k = 1 reduces to d·C(d+n-1, n)
    from math import comb

    for d in range(1, 5):
        for n in range(1, 6):
            assert complexity_rectangular(d, 1, n) == d * comb(d + n - 1, n)


@pytest.mark.parametrize("k,d,N", [(2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 3, 2)])
def test_branching_oracles_agree(k, d, N):
    for lam in block_shapes(k, N):
        br = complexity_by_branching(lam, d, k)
        assert br["pieri"] == br["characters"] == complexity_general(lam, d, k)


def test_branching_multiplicity_matches_characters():
    for lam in enumerate_partitions(5, 3):
        if lam.length != 3:
            continue
        for mu in enumerate_partitions(3, 3):
            assert branching_multiplicity(lam, mu, 3) == character_multiplicity(lam, mu, 3)


def test_branching_is_multiplicity_free():
    for lam in enumerate_partitions(6, 3):
        if lam.length == 3:
            for mu in enumerate_partitions(4, 3):
                assert branching_multiplicity(lam, mu, 3) in (0, 1)


def test_young_orthogonal_form_is_a_representation():
    import numpy as np

    for lam in ([2, 1], [3, 2], [2, 2, 1]):
        gens = young_orthogonal_form(lam)
        n = sum(lam)
        assert gens[0].shape == (dim_specht(lam),) * 2
        for i, s in enumerate(gens):
            np.testing.assert_allclose(s @ s, np.eye(len(s)), atol=1e-12)
            np.testing.assert_allclose(s, s.T, atol=1e-14)
            if i + 1 < len(gens):
                t = gens[i + 1]
                np.testing.assert_allclose(s @ t @ s, t @ s @ t, atol=1e-12)
        assert len(gens) == n - 1


@pytest.mark.parametrize("k,d,N", [(2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 3, 2)])
def test_hom_dimension_oracle(k, d, N):
    for lam in block_shapes(k, N):
        assert hom_dimension(lam, d, k) == complexity_general(lam, d, k, N)


def test_complexity_report_consistent():
    r = complexity_report(3, 2, 2, hom_oracle=True)
    assert r.consistent and r.value == 24 and not r.collapse
    assert r.to_json()["consistent"]


def test_ratio_classification():
    conv = ratio_diagnostics(4, 3, 1, [8, 16, 32, 64])
    assert conv["classification"] == "converges" and conv["limit"] == 3
    assert conv["monotone"] and conv["relative_deviation"][-1] < 0.1
    van = ratio_diagnostics(4, 3, 2, [8, 16, 32, 64])
    assert van["classification"] == "vanishes" and van["ratios"][-1] < Fraction(1, 20)
    div = ratio_diagnostics(5, 2, 1, [8, 16, 32, 64])
    assert div["classification"] == "diverges" and div["ratios"][-1] > 20
    with pytest.raises(DomainError):
        ratio_diagnostics(4, 1, 3, [8])


def test_exponent_trend():
    # finite-n slope creeps toward k(d-k) from below
    lo = asymptotic_exponent(5, 2, 16, 32)
    hi = asymptotic_exponent(5, 2, 256, 512)
    assert lo < hi < 6
    assert abs(asymptotic_exponent(4, 2, 32, 128) - 4) < 0.1


def test_rectangular_dims_closed_forms():
    for k in range(1, 5):
        for n in range(1, 7):
            prod = Fraction(1)
            for r in range(1, k + 1):
                prod *= Fraction(factorial(k - r), factorial(n + k - r - 1))
            assert dim_specht(rectangle(n - 1, k)) == factorial(k * n - k) * prod
            closed_mu = Fraction(k * factorial(k * n - k + 1), n + k - 1) * prod
            assert dim_specht(Partition([n] + [n - 1] * (k - 1))) == closed_mu


def test_skew_dim_check():
    assert skew_dim_check([2, 1], 3, 3)
    with pytest.raises(DomainError):
        skew_dim_check([4], 3, 3)


def test_table_outputs():
    rows = complexity_table(3, 2, range(1, 4))
    assert [r["C"] for r in rows] == [9, 24, 45]
    parsed = list(csv.DictReader(io.StringIO(table_to_csv(rows))))
    assert parsed[0]["C"] == "9" and parsed[2]["C_unreduced"] == str(6 ** 6)
    assert json.loads(table_to_json(rows))[1]["n"] == 2
