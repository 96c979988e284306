"""Tests for the Lipschitz seminorm and the Monge-Kantorovich distance."""

import math

import numpy as np
import pytest

from qmetric.algebra import (
    AlgebraElement,
    AlgebraShape,
    BiElement,
    diag_projector,
    identity,
    support_mask,
)
from qmetric.axioms import m2_admissible
from qmetric.construct import direct_sum, from_finite_metric
from qmetric.exceptions import PreconditionError, ShapeMismatchError
from qmetric.lipschitz import (
    check_leibniz,
    lip_seminorm,
    metric_pseudo_inverse,
    mk_distance,
    pure_decomposition,
    pure_state_bound,
)
from qmetric.models import FiniteMetricSpace, MetricCandidate, PureState, State
from tests.conftest import brute_force_lipschitz, kantorovich_dual, random_metric


def _space_metric(d: np.ndarray) -> MetricCandidate:
    return from_finite_metric(FiniteMetricSpace(n=d.shape[0], d=d))


def _diagonal(shape: AlgebraShape, f: np.ndarray) -> AlgebraElement:
    return AlgebraElement(shape=shape, data=np.diag(f))


def _distribution(shape: AlgebraShape, p: np.ndarray) -> State:
    return State.from_matrix(shape, np.diag(p))


def _m2_plus_point() -> MetricCandidate:
    m2 = MetricCandidate.from_rho(m2_admissible(1.0))
    point = MetricCandidate.from_rho(
        BiElement(shape=AlgebraShape(blocks=(1,)), data=np.zeros((1, 1)))
    )
    return direct_sum(m2, point, 1.0)


def _hermitian(shape: AlgebraShape, rng: np.random.Generator) -> AlgebraElement:
    g = rng.standard_normal((shape.dim, shape.dim)) + 1j * rng.standard_normal(
        (shape.dim, shape.dim)
    )
    g = np.where(support_mask(shape), g, 0.0)
    return AlgebraElement(shape=shape, data=(g + g.conj().T) / 2)


def _normal(shape: AlgebraShape, rng: np.random.Generator) -> AlgebraElement:
    """U diag(z) U* block by block, with complex z."""
    data = np.zeros((shape.dim, shape.dim), dtype=complex)
    for k, n in enumerate(shape.blocks):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        u, _ = np.linalg.qr(g)
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        cell = shape.block_slice(k)
        data[cell, cell] = u @ np.diag(z) @ u.conj().T
    return AlgebraElement(shape=shape, data=data)


class TestPseudoInverse:
    def test_inverts_rho_off_the_diagonal_projector(self, triangle_metric):
        inverse = metric_pseudo_inverse(triangle_metric)
        complement = np.eye(9) - diag_projector(triangle_metric.shape).data
        assert np.allclose(triangle_metric.rho.data @ inverse.data, complement)

    def test_needs_the_first_three_axioms(self):
        pdelta = MetricCandidate.from_rho(diag_projector(AlgebraShape(blocks=(2,))))
        with pytest.raises(PreconditionError):
            metric_pseudo_inverse(pdelta)


class TestLipSeminorm:
    def test_classical_seminorm_is_the_lipschitz_constant(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n = int(rng.integers(2, 7))
            d = random_metric(rng, n)
            f = rng.standard_normal(n)
            candidate = _space_metric(d)
            lip = lip_seminorm(_diagonal(candidate.shape, f), candidate)
            assert lip == pytest.approx(brute_force_lipschitz(f, d), rel=1e-9)

    def test_constants_have_zero_seminorm(self, triangle_metric):
        a = _diagonal(triangle_metric.shape, np.full(3, 2.5))
        assert lip_seminorm(a, triangle_metric) == pytest.approx(0.0, abs=1e-12)

    def test_shape_mismatch(self, triangle_metric):
        a = _diagonal(AlgebraShape.classical(2), np.ones(2))
        with pytest.raises(ShapeMismatchError):
            lip_seminorm(a, triangle_metric)

    def test_leibniz_for_commuting_elements(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            candidate = _space_metric(random_metric(rng, 4))
            a = _diagonal(candidate.shape, rng.standard_normal(4))
            b = _diagonal(candidate.shape, rng.standard_normal(4))
            check = check_leibniz(a, b, candidate)
            assert check.holds
            assert check.slack >= -1e-9

    def test_homogeneity(self, rng):
        candidate = _m2_plus_point()
        a = _hermitian(candidate.shape, rng)
        lip = lip_seminorm(a, candidate)
        for lam in [-3.0, 0.5, 2.5]:
            scaled = lip_seminorm(lam * a, candidate)
            assert scaled == pytest.approx(abs(lam) * lip, rel=1e-9)

    def test_subadditivity(self, rng):
        candidate = _m2_plus_point()
        for _ in range(20):
            a, b = _hermitian(candidate.shape, rng), _hermitian(candidate.shape, rng)
            total = lip_seminorm(a + b, candidate)
            parts = lip_seminorm(a, candidate) + lip_seminorm(b, candidate)
            assert total <= parts + 1e-9

    def test_adjoint_of_a_normal_element(self, rng):
        candidate = _m2_plus_point()
        for _ in range(20):
            a = _normal(candidate.shape, rng)
            lip = lip_seminorm(a, candidate)
            assert lip_seminorm(a.adjoint(), candidate) == pytest.approx(lip, rel=1e-9)

    def test_leibniz_needs_commuting_elements(self):
        candidate = MetricCandidate.from_rho(m2_admissible(1.0))
        shape = candidate.shape
        a = AlgebraElement(shape=shape, data=[[1.0, 0.0], [0.0, -1.0]])
        b = AlgebraElement(shape=shape, data=[[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(PreconditionError):
            check_leibniz(a, b, candidate)


class TestTransport:
    def test_point_masses_recover_the_distance(self, triangle_space, triangle_metric):
        shape = triangle_metric.shape
        for x in range(3):
            for y in range(3):
                phi, psi = State.from_point(shape, x), State.from_point(shape, y)
                bracket = mk_distance(phi, psi, triangle_metric)
                assert bracket.method == "lp"
                assert bracket.lower <= triangle_space.d[x, y] + 1e-7
                assert bracket.upper >= triangle_space.d[x, y] - 1e-7

    def test_matches_the_dual_program(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            d = random_metric(rng, 5)
            candidate = _space_metric(d)
            p, q = rng.dirichlet(np.ones(5)), rng.dirichlet(np.ones(5))
            bracket = mk_distance(
                _distribution(candidate.shape, p),
                _distribution(candidate.shape, q),
                candidate,
            )
            assert bracket.converged
            middle = (bracket.lower + bracket.upper) / 2
            assert middle == pytest.approx(kantorovich_dual(p, q, d), abs=1e-6)

    def test_symmetric_and_triangle_inequality(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            candidate = _space_metric(random_metric(rng, 4))
            phi, psi, chi = (
                _distribution(candidate.shape, rng.dirichlet(np.ones(4)))
                for _ in range(3)
            )
            forward = mk_distance(phi, psi, candidate)
            backward = mk_distance(psi, phi, candidate)
            assert forward.lower == pytest.approx(backward.lower, abs=1e-8)
            direct = mk_distance(phi, chi, candidate)
            detour = mk_distance(psi, chi, candidate)
            assert direct.lower <= forward.upper + detour.upper + 1e-9

    def test_pairing(self, triangle_metric):
        shape = triangle_metric.shape
        f = _diagonal(shape, np.array([1.0, -2.0, 4.0]))
        assert State.from_point(shape, 2).pairing(f) == pytest.approx(4.0)
        p = np.array([0.2, 0.3, 0.5])
        assert _distribution(shape, p).pairing(f) == pytest.approx(1.6)
        with pytest.raises(ValueError):
            State.from_point(shape, 0).pairing(identity(AlgebraShape.classical(2)))

    def test_pure_state_bound_dominates_the_distance(self, triangle_metric):
        shape = triangle_metric.shape
        for x, y in [(0, 1), (0, 2), (1, 2)]:
            bound = pure_state_bound(
                PureState(block=x, vector=[1.0]),
                PureState(block=y, vector=[1.0]),
                triangle_metric,
            )
            bracket = mk_distance(
                State.from_point(shape, x), State.from_point(shape, y), triangle_metric
            )
            assert bound >= bracket.lower - 1e-9

    def test_pure_state_bound_needs_distinct_blocks(self):
        candidate = MetricCandidate.from_rho(m2_admissible(1.0))
        v = PureState(block=0, vector=[1.0, 0.0])
        with pytest.raises(PreconditionError):
            pure_state_bound(v, v, candidate)

    def test_states_must_match_the_metric(self, triangle_metric):
        other = AlgebraShape.classical(2)
        with pytest.raises(ShapeMismatchError):
            mk_distance(
                State.from_point(other, 0), State.from_point(other, 1), triangle_metric
            )


class TestAscent:
    def test_same_block_states_have_no_upper_certificate(self):
        candidate = MetricCandidate.from_rho(m2_admissible(1.0))
        shape = candidate.shape
        phi = State.from_pure(shape, PureState(block=0, vector=[1.0, 0.0]))
        psi = State.from_pure(shape, PureState(block=0, vector=[0.0, 1.0]))
        bracket = mk_distance(phi, psi, candidate, max_iter=200)
        assert bracket.method == "ascent"
        assert bracket.lower > 0.0
        assert math.isinf(bracket.upper)
        assert not bracket.unbounded

    def test_disjoint_blocks_are_bracketed(self):
        candidate = _m2_plus_point()
        shape = candidate.shape
        phi = State.from_pure(shape, PureState(block=0, vector=[1.0, 0.0]))
        psi = State.from_point(shape, 1)
        bracket = mk_distance(phi, psi, candidate, max_iter=200)
        assert 0.0 < bracket.lower <= bracket.upper + 1e-9
        assert not bracket.crossed
        assert bracket.upper == pytest.approx(1.0, abs=1e-6)

    def test_ascent_stays_below_the_pure_state_bound(self):
        candidate = _m2_plus_point()
        shape = candidate.shape
        rng = np.random.default_rng(29)
        w = PureState(block=1, vector=[1.0])
        for _ in range(20):
            g = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            v = PureState(block=0, vector=g / np.linalg.norm(g))
            phi, psi = State.from_pure(shape, v), State.from_pure(shape, w)
            bracket = mk_distance(phi, psi, candidate, max_iter=100)
            assert bracket.lower <= pure_state_bound(v, w, candidate) + 1e-8
            assert not bracket.crossed

    def test_value_above_the_certified_bound_is_flagged(self, monkeypatch, capsys):
        candidate = _m2_plus_point()
        shape = candidate.shape
        monkeypatch.setattr(
            "qmetric.lipschitz._decomposition_bound", lambda phi, psi, rho: 1e-3
        )
        phi = State.from_pure(shape, PureState(block=0, vector=[1.0, 0.0]))
        bracket = mk_distance(phi, State.from_point(shape, 1), candidate, max_iter=50)
        assert bracket.crossed
        assert bracket.upper == 1e-3
        assert bracket.lower > bracket.upper
        assert "exceeds the certified bound" in capsys.readouterr().err

    def test_equal_states_are_at_distance_zero(self):
        candidate = MetricCandidate.from_rho(m2_admissible(1.0))
        phi = State.from_pure(candidate.shape, PureState(block=0, vector=[1.0, 0.0]))
        bracket = mk_distance(phi, phi, candidate)
        assert bracket.lower == bracket.upper == 0.0

    def test_ascent_is_reproducible(self):
        candidate = MetricCandidate.from_rho(m2_admissible(1.0))
        shape = candidate.shape
        phi = State.from_pure(shape, PureState(block=0, vector=[1.0, 0.0]))
        psi = State.from_pure(shape, PureState(block=0, vector=[0.6, 0.8]))
        first = mk_distance(phi, psi, candidate, max_iter=100)
        second = mk_distance(phi, psi, candidate, max_iter=100)
        assert first.lower == second.lower

    def test_pure_decomposition_reassembles_the_state(self):
        shape = AlgebraShape(blocks=(2, 1))
        density = np.zeros((3, 3))
        density[:2, :2] = [[0.3, 0.1], [0.1, 0.2]]
        density[2, 2] = 0.5
        state = State.from_matrix(shape, density)
        rebuilt = sum(
            w * np.outer(v.embed(shape), v.embed(shape).conj())
            for w, v in pure_decomposition(state)
        )
        assert np.allclose(rebuilt, density)
