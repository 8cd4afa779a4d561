import warnings

import numpy as np
import pytest

from colliq.builders import (
    blaschke_colligation,
    random_isometric_colligation,
    random_structured_colligation,
    shifted_blaschke_product_colligation,
)
from colliq.colligation import Colligation, SpacePartition, is_isometry, transfer_eval
from colliq.errors import (
    ArgumentError,
    NotIsometricError,
    StructureError,
    ZeroConstantError,
)
from colliq.factorize import (
    chain_residual,
    check_and_factor_zero_origin_nvar,
    embed_fm_into_fn,
    factor_chain,
    factor_fm,
    factor_fn,
    factor_zero_origin_case1,
    factor_zero_origin_case2,
    fm_embeddings,
    fn_embeddings,
    kappa_pi_roundtrip,
    product_chain,
    product_fm,
    product_fn,
    same_point_residual,
    separated_residual,
    verification_grid,
)
from colliq.structure import check_fm, check_fn


def _iso(dims, seed, split=None):
    return random_isometric_colligation(SpacePartition(tuple(dims), split), seed)


class TestProductFm:
    def test_blocks(self):
        v1, v2 = _iso((1,), 1), _iso((2,), 2)
        v = product_fm(v1, v2)
        assert v.a == v1.a * v2.a
        np.testing.assert_array_equal(v.B[:, :1], v1.B)
        np.testing.assert_allclose(v.B[:, 1:], v1.a * v2.B)
        np.testing.assert_array_equal(v.D[1:, :1], 0)

    def test_matrix_is_padded_isometry_product(self):
        v1, v2 = _iso((2, 1), 3), _iso((1,), 4)
        W1, W2 = fm_embeddings(v1, v2)
        np.testing.assert_allclose(W1 @ W2, product_fm(v1, v2).matrix, atol=1e-15)

    def test_transfer_and_structure(self):
        v1, v2 = _iso((2,), 5), _iso((1, 2), 6)
        v = product_fm(v1, v2, verify=True)
        assert is_isometry(v)[0] and check_fm(v, 1).satisfied
        assert separated_residual(v, v1, v2) <= 1e-13

    def test_shifted_blaschke_example(self):
        alpha, beta = 0.3 + 0.2j, -0.5j
        v = product_fm(blaschke_colligation(alpha), blaschke_colligation(beta))
        np.testing.assert_allclose(v.matrix,
                                   shifted_blaschke_product_colligation(alpha, beta).matrix,
                                   atol=1e-16)

    def test_rejects_non_isometric(self):
        bad = Colligation(0.5, [[0.0]], [[0.0]], [[0.5]], SpacePartition((1,)))
        with pytest.raises(NotIsometricError):
            product_fm(bad, _iso((1,), 0))


class TestFactorFm:
    @pytest.mark.parametrize("dims,m", [((1, 1), 1), ((2, 3, 1), 2), ((1, 2, 2), 1)])
    def test_round_trip(self, dims, m):
        v = random_structured_colligation("fm", dims, m=m, seed=sum(dims))
        result = factor_fm(v, m, verify=True)
        assert result.left.n == m and result.right.n == len(dims) - m
        assert is_isometry(result.left)[0] and is_isometry(result.right)[0]
        assert result.residual <= 1e-12
        assert result.alpha * result.beta == pytest.approx(v.a, abs=1e-15)
        assert result.beta.imag == 0 and result.beta.real > 0

    def test_factors_match_up_to_phase(self):
        v1, v2 = _iso((2,), 10), _iso((1,), 11)
        result = factor_fm(product_fm(v1, v2), 1)
        eps = result.left.a / v1.a
        assert abs(abs(eps) - 1) <= 1e-13
        np.testing.assert_allclose(result.left.matrix[1:, 1:], v1.D, atol=1e-13)
        np.testing.assert_allclose(result.left.C, eps * v1.C, atol=1e-13)

    def test_zero_constant(self):
        v = random_structured_colligation("zero_origin_1", (1, 1), seed=0)
        with pytest.raises(ZeroConstantError):
            factor_fm(v, 1)

    def test_unstructured(self):
        with pytest.raises(StructureError) as info:
            factor_fm(_iso((2, 2), 1), 1)
        assert not info.value.report.satisfied

    def test_no_normalization_warning_for_isometries(self):
        v = random_structured_colligation("fm", (2, 2), m=1, seed=3)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            result = factor_fm(v, 1)
        assert result.normalization_gap <= 1e-14


class TestSameVariables:
    def test_product_structure_and_transfer(self):
        split = ((1, 2), (2, 0), (0, 1))
        v1 = _iso([m for m, _ in split], 1)
        v2 = _iso([n for _, n in split], 2)
        v = product_fn(v1, v2, verify=True)
        assert v.partition.split == split
        assert is_isometry(v)[0] and check_fn(v).satisfied
        assert same_point_residual(v, v1, v2) <= 1e-13

    def test_product_is_padded_isometry_product(self):
        v1, v2 = _iso((1, 2), 5), _iso((2, 1), 6)
        W1, W2 = fn_embeddings(v1, v2)
        np.testing.assert_allclose(W1 @ W2, product_fn(v1, v2).matrix, atol=1e-15)

    def test_factor_round_trip(self):
        v = random_structured_colligation("fn", split=((2, 1), (1, 2)), seed=9)
        result = factor_fn(v, verify=True)
        assert result.left.partition.dims == (2, 1)
        assert result.right.partition.dims == (1, 2)
        assert result.residual <= 1e-12

    def test_mismatched_variables(self):
        with pytest.raises(ArgumentError):
            product_fn(_iso((1,), 0), _iso((1, 1), 1))

    def test_kappa_pi(self):
        eps, dev = kappa_pi_roundtrip(_iso((1, 2), 3), _iso((2, 1), 4))
        assert abs(abs(eps) - 1) <= 1e-12 and dev <= 1e-12


class TestChain:
    def test_product_and_factor(self):
        vs = [_iso((d,), s) for s, d in enumerate((1, 2, 1, 3))]
        v = product_chain(vs, verify=True)
        assert chain_residual(v, vs) <= 1e-13
        factors = factor_chain(v, verify=True)
        assert len(factors) == 4
        phases = [f.a / g.a for f, g in zip(factors, vs)]
        assert np.allclose(np.abs(phases), 1, atol=1e-12)
        assert abs(np.prod(phases) - 1) <= 1e-12

    def test_two_factors_match_product_fm(self):
        v1, v2 = _iso((2,), 1), _iso((1,), 2)
        np.testing.assert_allclose(product_chain([v1, v2]).matrix,
                                   product_fm(v1, v2).matrix, atol=1e-16)

    def test_single_factor(self):
        v = _iso((2,), 1)
        assert factor_chain(v) == [v]

    def test_invalid_inputs(self):
        with pytest.raises(ArgumentError):
            product_chain([])
        with pytest.raises(ArgumentError):
            product_chain([_iso((1, 1), 0)])


class TestZeroOrigin:
    def test_case1(self):
        v = random_structured_colligation("zero_origin_1", (2, 2), seed=3)
        result = factor_zero_origin_case1(v, verify=True)
        assert transfer_eval(result.left, [0]) == 0
        assert transfer_eval(result.right, [0]).real > 0
        assert is_isometry(result.left)[0] and is_isometry(result.right)[0]
        # the identity also holds on the diagonal z1 = z2
        pts = verification_grid(1)
        diag = np.hstack([pts, pts])
        assert separated_residual(v, result.left, result.right, diag) <= 1e-13

    def test_case2(self):
        v = random_structured_colligation("zero_origin_2", (2, 3), seed=4)
        result = factor_zero_origin_case2(v, verify=True)
        assert transfer_eval(result.left, [0]) == 0
        assert transfer_eval(result.right, [0]) == 0
        assert is_isometry(result.left)[0] and is_isometry(result.right)[0]

    def test_case1_rejects_unstructured(self):
        with pytest.raises(StructureError):
            factor_zero_origin_case1(_iso((1, 1), 0))

    @pytest.mark.parametrize("case,kind", [(1, "zero_origin_fn_1"), (2, "zero_origin_fn_2")])
    def test_nvar(self, case, kind):
        v = random_structured_colligation(kind, split=((1, 1), (2, 1)), seed=case)
        result = check_and_factor_zero_origin_nvar(v, case, verify=True)
        assert result.residual <= 1e-12
        assert transfer_eval(result.left, [0, 0]) == 0

    def test_nvar_rejects_nonzero_constant(self):
        v = random_structured_colligation("fn", split=((1, 1),), seed=2)
        with pytest.raises(ZeroConstantError):
            check_and_factor_zero_origin_nvar(v, 1)


class TestEmbedding:
    def test_embedding(self):
        v = random_structured_colligation("fm", (1, 2, 1), m=2, seed=7)
        e = embed_fm_into_fn(v, 2, pad_dim=2)
        assert e.partition.dims == (3, 4, 3)
        assert e.partition.split == ((1, 2), (2, 2), (2, 1))
        assert is_isometry(e)[0] and check_fn(e).satisfied
        for z in verification_grid(3, 20):
            assert abs(transfer_eval(e, z) - transfer_eval(v, z)) <= 1e-14

    def test_embedding_then_factor_fn(self):
        v = random_structured_colligation("fm", (2, 1), m=1, seed=8)
        result = factor_fn(embed_fm_into_fn(v, 1, 1), verify=True)
        # left depends on z_1 only, right on z_2 only
        z = np.array([0.3, -0.2j])
        assert transfer_eval(result.left, z) == pytest.approx(
            transfer_eval(result.left, [z[0], 0.7]), abs=1e-14)

    def test_rejects_unstructured(self):
        with pytest.raises(StructureError):
            embed_fm_into_fn(_iso((1, 1), 3), 1, 1)
