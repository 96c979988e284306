"""Tests for the metric constructions."""

import numpy as np
import pytest

from qmetric.algebra import AlgebraShape, BiElement
from qmetric.axioms import m2_admissible
from qmetric.construct import (
    classical_distances,
    conic_combine,
    direct_sum,
    embed_classical,
    from_finite_metric,
    metric_space_from_matrix,
    product_shape,
    tensor_product,
)
from qmetric.exceptions import (
    ExchangeFormatError,
    MetricAxiomError,
    PreconditionError,
    ShapeMismatchError,
)
from qmetric.models import FiniteMetricSpace, MetricCandidate
from tests.conftest import random_metric


def _classical(d: np.ndarray, mode: str = "representation") -> MetricCandidate:
    return from_finite_metric(FiniteMetricSpace(n=d.shape[0], d=d), mode)


def _one_point() -> MetricCandidate:
    return MetricCandidate.from_rho(
        BiElement(shape=AlgebraShape(blocks=(1,)), data=np.zeros((1, 1)))
    )


class TestClassical:
    def test_embedding_roundtrips_the_distances(self, triangle_space, triangle_metric):
        assert triangle_metric.verified
        assert np.array_equal(classical_distances(triangle_metric), triangle_space.d)
        assert triangle_metric.diameter == pytest.approx(2.0)

    def test_rejects_non_square_input(self):
        with pytest.raises(ValueError):
            embed_classical(np.zeros((2, 3)))

    def test_distances_need_a_classical_shape(self):
        with pytest.raises(PreconditionError):
            classical_distances(MetricCandidate.from_rho(m2_admissible(1.0)))

    def test_invalid_matrix(self):
        with pytest.raises(MetricAxiomError, match="triangle"):
            metric_space_from_matrix([[0, 1, 5], [1, 0, 1], [5, 1, 0]])

    def test_builtin_spaces(self):
        assert _classical(FiniteMetricSpace.discrete(4).d).verified
        assert _classical(FiniteMetricSpace.path(4).d).verified

    def test_lower_triangle(self):
        space = FiniteMetricSpace.from_lower_triangle("0\n1 0\n2 1.5 0\n")
        assert np.array_equal(space.d, [[0, 1, 2], [1, 0, 1.5], [2, 1.5, 0]])
        with pytest.raises(ExchangeFormatError):
            FiniteMetricSpace.from_lower_triangle("0\n1\n")


class TestConic:
    @pytest.mark.parametrize("mode", ["representation", "algebraic"])
    def test_combination_of_metrics_is_a_metric(self, mode):
        rng = np.random.default_rng(11)
        for _ in range(50):
            d1, d2 = random_metric(rng, 4), random_metric(rng, 4)
            r = float(rng.uniform(0.1, 5.0))
            combined = conic_combine(_classical(d1), _classical(d2), r, mode)
            assert combined.verified
            assert np.allclose(classical_distances(combined), d1 + r * d2)

    def test_r_must_be_positive(self, triangle_metric):
        with pytest.raises(PreconditionError):
            conic_combine(triangle_metric, triangle_metric, 0.0)

    def test_shapes_must_agree(self, triangle_metric):
        other = _classical(FiniteMetricSpace.discrete(2).d)
        with pytest.raises(ShapeMismatchError):
            conic_combine(triangle_metric, other, 1.0)


class TestDirectSum:
    def test_two_points(self):
        combined = direct_sum(_one_point(), _one_point(), 1.0)
        assert combined.shape == AlgebraShape(blocks=(1, 1))
        assert np.allclose(combined.rho.data, np.diag([0.0, 1.0, 1.0, 0.0]))
        assert combined.verified

    @pytest.mark.parametrize("factor", [1.0, 2.0])
    def test_at_and_above_the_bound(self, factor):
        rng = np.random.default_rng(5)
        for _ in range(50):
            m1 = _classical(random_metric(rng, 3))
            m2 = _classical(random_metric(rng, 2))
            r = factor * max(m1.diameter, m2.diameter) / 2
            combined = direct_sum(m1, m2, r)
            assert combined.verified
            d = classical_distances(combined)
            assert np.allclose(d[3:, :3], r)
            assert np.allclose(d[:3, :3], classical_distances(m1))

    def test_candidate_diameter_must_match_rho(self, triangle_metric):
        with pytest.raises(ValueError, match="Diameter"):
            MetricCandidate(
                rho=triangle_metric.rho, shape=triangle_metric.shape, diameter=0.5
            )

    def test_below_the_bound(self, triangle_metric):
        with pytest.raises(PreconditionError):
            direct_sum(triangle_metric, triangle_metric, 0.9)

    def test_noncommutative_summand_keeps_its_defect(self):
        m2 = MetricCandidate.from_rho(m2_admissible(1.0))
        combined = direct_sum(m2, _one_point(), 1.0)
        assert combined.shape == AlgebraShape(blocks=(2, 1))
        assert combined.report is not None
        assert combined.report.failed_axioms() == ["v"]


class TestTensor:
    def test_product_shape(self):
        s = product_shape(AlgebraShape(blocks=(2, 1)), AlgebraShape(blocks=(1, 3)))
        assert s.blocks == (2, 6, 1, 3)

    @pytest.mark.parametrize("mode", ["representation", "algebraic"])
    def test_classical_product_is_the_l1_sum(self, mode):
        rng = np.random.default_rng(3)
        for _ in range(50):
            d1, d2 = random_metric(rng, 3), random_metric(rng, 2)
            product = tensor_product(_classical(d1), _classical(d2), mode)
            assert product.verified
            expected = d1[:, None, :, None] + d2[None, :, None, :]
            assert np.allclose(classical_distances(product), expected.reshape(6, 6))

    def test_algebraic_mode_needs_a_commutative_first_factor(self, triangle_metric):
        m2 = MetricCandidate.from_rho(m2_admissible(1.0))
        with pytest.raises(PreconditionError):
            tensor_product(m2, triangle_metric, mode="algebraic")

    def test_representation_mode_accepts_any_factors(self, triangle_metric):
        m2 = MetricCandidate.from_rho(m2_admissible(1.0))
        product = tensor_product(m2, triangle_metric)
        assert product.shape == AlgebraShape(blocks=(2, 2, 2))
        assert product.report is not None
