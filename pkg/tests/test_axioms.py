"""Tests for the axiom checks in both definition modes."""

import numpy as np
import pytest

from qmetric.algebra import AlgebraShape, BiElement, diag_projector, mid_embed
from qmetric.axioms import (
    check_alg_diag,
    check_diag_vanish,
    check_nondegenerate,
    check_positive,
    check_triangle,
    diameter,
    m2_admissible,
    triangle_defect,
    verify,
)
from qmetric.construct import embed_classical, from_finite_metric
from qmetric.exceptions import PreconditionError, ShapeMismatchError
from qmetric.models import FiniteMetricSpace, ToleranceConfig
from tests.conftest import brute_force_is_metric, plant_violation, random_metric


class TestClassicalMetrics:
    @pytest.mark.parametrize("mode", ["representation", "algebraic"])
    def test_triangle_space_is_a_metric(self, triangle_metric, mode):
        report = verify(triangle_metric.rho, mode=mode)
        assert report.passed
        assert report.mode == mode

    @pytest.mark.parametrize("mode", ["representation", "algebraic"])
    def test_verdict_matches_the_classical_axioms(self, mode):
        rng = np.random.default_rng(7)
        for case in range(200):
            n = int(rng.integers(3, 7))
            d = random_metric(rng, n)
            if case % 2:
                d = plant_violation(rng, d)
            report = verify(embed_classical(d), mode=mode)
            assert report.passed == brute_force_is_metric(d), (case, d)

    def test_modes_agree_on_classical_shapes(self):
        rng = np.random.default_rng(17)
        for case in range(50):
            d = random_metric(rng, int(rng.integers(3, 6)))
            if case % 2:
                d = plant_violation(rng, d)
            rho = embed_classical(d)
            geometric = verify(rho, mode="representation")
            algebraic = verify(rho, mode="algebraic")
            assert geometric.passed == algebraic.passed, (case, d)

    def test_one_point_space(self):
        report = verify(embed_classical(np.zeros((1, 1))))
        assert report.passed

    def test_negative_distance_fails_positivity(self):
        d = np.array([[0.0, -1.0], [-1.0, 0.0]])
        report = verify(embed_classical(d))
        assert "i" in report.failed_axioms()
        assert report.record("iii").indeterminate

    def test_zero_distance_fails_nondegeneracy(self):
        d = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
        report = verify(embed_classical(d))
        assert report.failed_axioms() == ["iii"]
        assert report.record("iii").witness is not None


class TestScaling:
    @pytest.mark.parametrize("mode", ["representation", "algebraic"])
    @pytest.mark.parametrize("c", [1e-6, 1.0, 1e6])
    def test_verdicts_are_scale_invariant(self, mode, c):
        rng = np.random.default_rng(23)
        for _ in range(10):
            d = random_metric(rng, int(rng.integers(2, 6)))
            rho = from_finite_metric(FiniteMetricSpace(n=d.shape[0], d=d), mode).rho
            base, scaled = verify(rho, mode=mode), verify(c * rho, mode=mode)
            assert scaled.passed
            assert [r.passed for r in scaled.records] == [
                r.passed for r in base.records
            ]

    @pytest.mark.parametrize("c", [1e-6, 1.0, 1e6])
    def test_m2_failure_is_scale_invariant(self, c):
        report = verify(c * m2_admissible(1.0))
        assert report.failed_axioms() == ["v"]


class TestM2:
    def test_admissible_family_fails_only_the_triangle(self):
        report = verify(m2_admissible(1.0))
        assert report.failed_axioms() == ["v"]
        triangle = report.record("v")
        assert triangle.margin < 0.0
        assert triangle.witness is not None

    def test_triangle_witness_is_a_negative_direction(self):
        rho = m2_admissible(2.0)
        record = check_triangle(rho)
        defect = triangle_defect(rho).data
        w = record.witness
        assert np.vdot(w, defect @ w).real == pytest.approx(record.margin)
        assert record.margin < 0.0

    def test_defect_matches_the_reference(self, m2_defect):
        defect = triangle_defect(m2_admissible(1.0)).data
        assert np.allclose(defect, m2_defect, atol=1e-12)

    def test_triangle_defect_definition(self):
        rho = m2_admissible(1.0)
        eye = np.eye(2)
        expected = (
            np.kron(rho.data, eye) + np.kron(eye, rho.data) - mid_embed(rho).data
        )
        assert np.allclose(triangle_defect(rho).data, expected)

    def test_lambda_must_be_positive(self):
        with pytest.raises(PreconditionError):
            m2_admissible(0.0)

    def test_diameter(self):
        assert diameter(m2_admissible(1.5)) == pytest.approx(3.0)


class TestSingleChecks:
    def test_positive_reports_the_lowest_eigenvalue(self):
        rho = BiElement(shape=AlgebraShape.classical(2), data=-np.eye(4))
        record = check_positive(rho)
        assert not record.passed
        assert record.margin == pytest.approx(-1.0)

    def test_projector_itself_fails_diagonal_vanishing(self):
        pdelta = diag_projector(AlgebraShape(blocks=(2, 1)))
        assert not check_diag_vanish(pdelta).passed
        assert not check_alg_diag(pdelta).passed

    def test_nondegenerate_is_indeterminate_without_positivity(self):
        rho = BiElement(shape=AlgebraShape.classical(2), data=-np.eye(4))
        record = check_nondegenerate(rho)
        assert record.indeterminate
        assert not record.passed

    def test_explicit_floor(self, triangle_metric):
        cfg = ToleranceConfig(strict_floor=1.5)
        assert not check_nondegenerate(triangle_metric.rho, cfg).passed
        cfg = ToleranceConfig(strict_floor=0.5)
        assert check_nondegenerate(triangle_metric.rho, cfg).passed

    def test_alg_diag_holds_for_classical_metrics(self, triangle_metric):
        assert check_alg_diag(triangle_metric.rho).passed


class TestVerify:
    def test_algebraic_report_tags(self, triangle_metric):
        report = verify(triangle_metric.rho, mode="algebraic")
        tags = [r.axiom for r in report.records]
        assert tags == ["i", "ii_alg", "iii_alg", "iv", "v"]
        assert "not falsified" in report.record("iii_alg").note

    def test_skip_leaves_axioms_out(self):
        report = verify(m2_admissible(1.0), skip=("v",))
        assert report.passed
        assert report.skipped == ["v"]
        with pytest.raises(KeyError):
            report.record("v")

    def test_skip_must_name_an_axiom_of_the_mode(self):
        with pytest.raises(ValueError):
            verify(m2_admissible(1.0), skip=("iii_alg",))

    def test_shape_mismatch(self, triangle_metric):
        with pytest.raises(ShapeMismatchError):
            verify(triangle_metric.rho, shape=AlgebraShape(blocks=(3,)))

    def test_unknown_mode(self, triangle_metric):
        with pytest.raises(ValueError):
            verify(triangle_metric.rho, mode="bogus")

    def test_sampled_check_is_reproducible(self, triangle_metric):
        cfg = ToleranceConfig(seed=3, sample_count=8)
        first = verify(triangle_metric.rho, cfg=cfg, mode="algebraic")
        second = verify(triangle_metric.rho, cfg=cfg, mode="algebraic")
        assert first.record("iii_alg").margin == second.record("iii_alg").margin
