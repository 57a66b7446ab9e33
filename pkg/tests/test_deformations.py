import math

import numpy as np
import pytest

from fcontact.deformations import ANTI_ROTATION, ROTATION, RotationMatrix, antirotate, basic_residuals, \
    check_basic, compose_checks, lie_transfer_residual, rotate, torsion_transfer_residual, \
    transferred_thetas, type2
from fcontact.exceptions import DimensionError, InvalidMatrixError, PreconditionError
from fcontact.expr import parse
from fcontact.fields import OneForm
from fcontact.structures import Level, compare_structures, omega_matrix, verify


def _max_difference(first, second, points):
    return max(compare_structures(first, second, points).values())


def _rotation(angle):
    return RotationMatrix([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])


def _random_thetas(item, rng, scale=0.4):
    return item.thetas(rng.uniform(-scale, scale, size=(item.structure.s, 2 * item.n)))


class TestRotationMatrix:
    def test_row_sums(self):
        A = _rotation(math.pi / 6)
        assert np.allclose(A.row_sums, [math.cos(math.pi / 6) - 0.5, 0.5 + math.cos(math.pi / 6)])
        assert A.s == 2

    @pytest.mark.parametrize('matrix, residual', [
        ([[1.0, 0.1], [0.0, 1.0]], 'orthogonality'),
        ([[math.cos(math.pi / 4), -math.sin(math.pi / 4)], [math.sin(math.pi / 4), math.cos(math.pi / 4)]],
         'row_sum'),
    ])
    def test_invalid(self, matrix, residual):
        with pytest.raises(InvalidMatrixError) as info:
            RotationMatrix(matrix)
        assert residual in info.value.residuals

    def test_not_square(self):
        with pytest.raises(InvalidMatrixError):
            RotationMatrix([[1.0, 0.0]])


class TestRotations:
    def test_identity(self, s_model, points):
        S = s_model.structure
        identity = RotationMatrix(np.eye(2))
        assert _max_difference(rotate(S, identity), S, points(S)) <= 1e-14
        assert _max_difference(antirotate(S, identity), S, points(S)) <= 1e-14

    def test_swap(self, s_model, points):
        S = s_model.structure
        swapped = rotate(S, RotationMatrix([[0.0, 1.0], [1.0, 0.0]]))
        for p in points(S):
            assert np.allclose(swapped.eta[0].value(p), S.eta[1].value(p))
            assert np.allclose(swapped.xi[1].value(p), S.xi[0].value(p))
            assert np.allclose(swapped.g.value(p), S.g.value(p), atol=1e-14)

    def test_rotation_keeps_level_s(self, s_model, points):
        S = s_model.structure
        rotated = rotate(S, _rotation(math.pi / 6))
        report = verify(rotated, Level.S, samples=points(S))
        assert report.achieved is Level.S
        assert report.passed

    @pytest.mark.parametrize('s', [2, 3])
    def test_random_rotations_keep_level_and_omega(self, s, s_model, s_model_3, points, rotation_factory):
        item = s_model if s == 2 else s_model_3
        S = item.structure
        rng = np.random.default_rng(s)
        samples = points(S, 3)
        for _ in range(50):
            A = rotation_factory(s, rng)
            for deformed in (rotate(S, A), antirotate(S, A)):
                assert verify(deformed, Level.S, samples=samples).achieved is Level.S
                for p in samples:
                    assert np.allclose(omega_matrix(deformed, p), omega_matrix(S, p), atol=1e-12)

    def test_rotations_are_mutually_inverse(self, s_model_3, points, rotation_factory):
        S = s_model_3.structure
        A = rotation_factory(3, np.random.default_rng(7))
        samples = points(S)
        assert _max_difference(antirotate(rotate(S, A), A), S, samples) <= 1e-12
        assert _max_difference(rotate(antirotate(S, A), A), S, samples) <= 1e-12

    def test_characteristic_identities(self, s_model_3, points, rotation_factory):
        S = s_model_3.structure
        rotated = rotate(S, rotation_factory(3, np.random.default_rng(8)))
        for p in points(S):
            assert np.allclose(sum(xi.value(p) for xi in rotated.xi), sum(xi.value(p) for xi in S.xi))
            X = np.array([xi.value(p) for xi in rotated.xi]).T
            assert np.allclose(X.T @ rotated.g.value(p) @ X, np.eye(3), atol=1e-12)

    def test_size_mismatch(self, sasakian):
        with pytest.raises(DimensionError):
            rotate(sasakian.structure, RotationMatrix(np.eye(2)))


class TestTypeTwo:
    def test_zero_forms_change_nothing(self, s_model, points):
        S = s_model.structure
        zero = s_model.thetas(np.zeros((2, 2)))
        assert _max_difference(type2(S, zero, samples=points(S)), S, points(S)) <= 1e-15

    def test_random_horizontal_forms_keep_level_s(self, s_model, points):
        S = s_model.structure
        rng = np.random.default_rng(20)
        samples = points(S, 4)
        for _ in range(20):
            deformed = type2(S, _random_thetas(s_model, rng), samples=samples)
            report = verify(deformed, Level.S, samples=samples)
            assert report.achieved is Level.S, report.to_dict()
            assert report.residual('f_squared') <= 1e-9
            assert all(xi is original for xi, original in zip(deformed.xi, S.xi))

    def test_default_family(self, s_model, points):
        S = s_model.structure
        deformed = type2(S, s_model.thetas(), samples=points(S))
        assert verify(deformed, Level.S, samples=points(S)).passed

    def test_additive_composition_and_inverse(self, s_model, points):
        S = s_model.structure
        rng = np.random.default_rng(21)
        samples = points(S)
        a = rng.uniform(-0.4, 0.4, size=(2, 2))
        b = rng.uniform(-0.4, 0.4, size=(2, 2))
        twice = type2(type2(S, s_model.thetas(a), samples=samples), s_model.thetas(b), samples=samples)
        once = type2(S, s_model.thetas(a + b), samples=samples)
        assert _max_difference(twice, once, samples) <= 1e-10
        undone = type2(type2(S, s_model.thetas(a), samples=samples), s_model.thetas(-a), samples=samples)
        assert _max_difference(undone, S, samples) <= 1e-10

    def test_non_closed_form_is_rejected(self, s_model, points):
        S = s_model.structure
        chart = S.chart
        bad = OneForm.from_exprs(chart, [parse(text, chart) for text in ('0', 'x1', '0', '0')])
        with pytest.raises(PreconditionError) as info:
            type2(S, [bad, s_model.thetas()[1]], samples=points(S))
        assert info.value.residuals['theta_1']['closed'] == pytest.approx(0.5)
        assert max(info.value.residuals['theta_2'].values()) <= 1e-12

    def test_vertical_form_is_not_basic(self, s_model, points):
        S = s_model.structure
        vertical = OneForm.constant(S.chart, [0.0, 0.0, 1.0, 0.0])
        residuals = basic_residuals(S, [vertical, vertical], points(S))
        assert residuals['theta_1']['annihilates_xi'] == pytest.approx(2.0)
        with pytest.raises(PreconditionError):
            check_basic(S, [vertical, vertical], points(S))

    def test_form_count(self, s_model):
        with pytest.raises(DimensionError):
            type2(s_model.structure, s_model.thetas()[:1])

    def test_catalog_forms_are_closed_and_basic(self, s_model, points):
        residuals = basic_residuals(s_model.structure, s_model.thetas(), points(s_model.structure))
        assert all(value <= 1e-12 for forms in residuals.values() for value in forms.values())

    def test_transfer_identities(self, s_model, points):
        S = s_model.structure
        thetas = s_model.thetas()
        for p in points(S, 3):
            assert lie_transfer_residual(S, thetas, p) <= 1e-10
            assert torsion_transfer_residual(S, thetas, p) <= 1e-10


class TestComposition:
    def test_transferred_forms_for_identity(self, s_model, points):
        thetas = s_model.thetas()
        moved = transferred_thetas(RotationMatrix(np.eye(2)), thetas)
        for p in points(s_model.structure, 2):
            for a, b in zip(moved, thetas):
                assert np.array_equal(a.value(p), b.value(p))
        with pytest.raises(ValueError):
            transferred_thetas(RotationMatrix(np.eye(2)), thetas, 'reflection')

    @pytest.mark.parametrize('kind', [ROTATION, ANTI_ROTATION])
    @pytest.mark.parametrize('s', [2, 3])
    def test_paths_agree(self, kind, s, s_model, s_model_3, points, rotation_factory):
        item = s_model if s == 2 else s_model_3
        rng = np.random.default_rng(30 + s)
        for _ in range(20):
            A = rotation_factory(s, rng)
            result = compose_checks(item.structure, A, _random_thetas(item, rng), kind,
                                    samples=points(item.structure, 4))
            assert result['passed'], result
            assert result['max_difference'] <= 1e-10
            assert result['kind'] == kind

    def test_zero_forms(self, s_model, points, rotation_factory):
        S = s_model.structure
        A = rotation_factory(2, np.random.default_rng(3))
        result = compose_checks(S, A, s_model.thetas(np.zeros((2, 2))), samples=points(S))
        assert result['max_difference'] <= 1e-12
