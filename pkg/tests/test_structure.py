import numpy as np
import pytest

from colliq.builders import random_isometric_colligation, random_structured_colligation
from colliq.colligation import Colligation, SpacePartition
from colliq.errors import ArgumentError, DimensionError, NoWitnessError, ZeroConstantError
from colliq.structure import (
    StructureReport,
    check_chain,
    check_fm,
    check_fn,
    check_zero_origin_case1,
    check_zero_origin_case2,
    check_zero_origin_nvar,
    flip,
    recover_case2_witness,
)


def _perturb(v, i, j, eps=1e-3):
    V = v.matrix
    V[i, j] += eps
    return Colligation.from_matrix(V, v.partition)


def test_report_basics():
    r = StructureReport()
    r.require((1,), 0.0, "ok", 1e-10)
    assert r and r.satisfied and r.checked == 1
    r.require((2, 1), 0.5, "bad", 1e-10)
    assert not r
    assert "bad at blocks (2, 1)" in r.summary()


def test_report_nan_is_a_violation():
    r = StructureReport()
    r.require((), np.nan, "nan", 1.0)
    assert not r.satisfied


class TestFm:
    def test_product_passes(self):
        v = random_structured_colligation("fm", (2, 1, 2), m=2, seed=1)
        assert check_fm(v, 2).satisfied

    def test_random_isometry_fails(self):
        v = random_isometric_colligation(SpacePartition((2, 2)), seed=1)
        report = check_fm(v, 1)
        assert {x.constraint for x in report.violations} == {"D21 == 0", "a*D12 == C1*B2"}

    def test_perturbation_is_caught(self):
        v = random_structured_colligation("fm", (1, 1), m=1, seed=2)
        # entry (2, 1) of V is D21
        bad = _perturb(v, 2, 1)
        violations = check_fm(bad, 1).violations
        assert [x.constraint for x in violations] == ["D21 == 0"]
        assert violations[0].residual == pytest.approx(1e-3)

    @pytest.mark.parametrize("m", [0, 2])
    def test_m_out_of_range(self, m):
        v = random_isometric_colligation(SpacePartition((1, 1)), seed=1)
        with pytest.raises(ArgumentError):
            check_fm(v, m)


class TestFn:
    def test_product_passes(self):
        v = random_structured_colligation("fn", split=((1, 2), (2, 1)), seed=4)
        report = check_fn(v)
        assert report.satisfied and report.checked == 8

    def test_needs_split(self):
        with pytest.raises(ArgumentError):
            check_fn(random_isometric_colligation(SpacePartition((2, 2)), seed=0))

    def test_random_split_isometry_fails(self):
        v = random_isometric_colligation(SpacePartition((2, 2), ((1, 1), (1, 1))), 3)
        assert not check_fn(v).satisfied


class TestChain:
    def test_product_passes(self):
        v = random_structured_colligation("chain", (1, 2, 1), seed=5)
        assert check_chain(v).satisfied

    def test_zero_constant_rejected(self):
        v = random_structured_colligation("zero_origin_1", (1, 1), seed=0)
        with pytest.raises(ZeroConstantError):
            check_chain(v)

    def test_lower_block_caught(self):
        v = random_structured_colligation("chain", (1, 1, 1), seed=5)
        bad = _perturb(v, 3, 1)
        assert any(x.blocks == (3, 1) for x in check_chain(bad).violations)


class TestZeroOrigin:
    def test_case1_passes(self):
        v = random_structured_colligation("zero_origin_1", (2, 3), seed=6)
        assert check_zero_origin_case1(v).satisfied

    def test_case1_rejects_case2_data(self):
        v = random_structured_colligation("zero_origin_2", (2, 2), seed=6)
        report = check_zero_origin_case1(v)
        assert "C1^* C1 > 0" in {x.constraint for x in report.violations}

    def test_case1_needs_two_blocks(self):
        v = random_isometric_colligation(SpacePartition((1, 1, 1)), 0)
        with pytest.raises(ArgumentError):
            check_zero_origin_case1(v)

    def test_case2_with_recovered_witness(self):
        v = random_structured_colligation("zero_origin_2", (3, 2), seed=7)
        x, y = recover_case2_witness(v)
        assert x.shape == (3, 1) and y.shape == (1, 2)
        assert check_zero_origin_case2(v, x, y).satisfied

    def test_case2_witness_shapes(self):
        v = random_structured_colligation("zero_origin_2", (3, 2), seed=7)
        with pytest.raises(DimensionError):
            check_zero_origin_case2(v, np.ones((2, 1)), np.ones((1, 2)))

    def test_case2_wrong_witness_fails(self):
        v = random_structured_colligation("zero_origin_2", (3, 2), seed=7)
        x, y = recover_case2_witness(v)
        assert not check_zero_origin_case2(v, x, 2 * y).satisfied

    def test_case2_rank_two_has_no_witness(self):
        # D2 = identity on C^2 has rank 2
        D = np.zeros((4, 4))
        D[0, 2] = D[1, 3] = 1.0
        v = Colligation(0.0, np.zeros((1, 4)), np.zeros((4, 1)), D,
                        SpacePartition((2, 2)))
        with pytest.raises(NoWitnessError):
            recover_case2_witness(v)

    def test_nvar_cases(self):
        split = ((1, 2), (2, 1))
        v1 = random_structured_colligation("zero_origin_fn_1", split=split, seed=8)
        v2 = random_structured_colligation("zero_origin_fn_2", split=split, seed=8)
        assert check_zero_origin_nvar(v1, 1).satisfied
        assert check_zero_origin_nvar(v2, 2).satisfied
        assert not check_zero_origin_nvar(v2, 1).satisfied

    def test_nvar_bad_case(self):
        v = random_structured_colligation("zero_origin_fn_1", split=((1, 1),), seed=1)
        with pytest.raises(ArgumentError):
            check_zero_origin_nvar(v, 3)


def test_flip_conjugates_by_permutation():
    v = random_isometric_colligation(SpacePartition((2, 2), ((1, 1), (1, 1))), 2)
    w = flip(v)
    assert w.partition.dims == (2, 2)
    # rows/cols [M_1, M_2, N_1, N_2] = original state indices [0, 2, 1, 3]
    order = np.array([0, 2, 1, 3])
    np.testing.assert_array_equal(w.D, v.D[np.ix_(order, order)])
    np.testing.assert_array_equal(w.C, v.C[order])
