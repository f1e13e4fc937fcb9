"""Unit tests for angle/projection/pose math."""

import numpy as np
import pytest

from msi_forge import geometry as g
from msi_forge.errors import GeometryDomainError


class TestErpPixelAngles:
    def test_image_center_is_forward(self):
        theta, phi = g.erp_pixel_to_angles(256 / 2 - 0.5, 128 / 2 - 0.5, 256, 128)
        assert theta == pytest.approx(0.0, abs=1e-15)
        assert phi == pytest.approx(0.0, abs=1e-15)

    def test_corner_pixel_4x2(self):
        theta, phi = g.erp_pixel_to_angles(0, 0, 4, 2)
        assert theta == pytest.approx(-3 * np.pi / 4)
        assert phi == pytest.approx(np.pi / 4)

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(0, 640, 1000)
        y = rng.uniform(0, 320, 1000)
        theta, phi = g.erp_pixel_to_angles(x, y, 640, 320)
        x2, y2 = g.angles_to_erp_pixel(theta, phi, 640, 320)
        np.testing.assert_allclose(x2, x, atol=1e-10)
        np.testing.assert_allclose(y2, y, atol=1e-10)


class TestDirections:
    def test_forward_axis(self):
        np.testing.assert_allclose(g.angles_to_direction(0.0, 0.0), [1, 0, 0])

    def test_quarter_turn_left(self):
        np.testing.assert_allclose(
            g.angles_to_direction(np.pi / 2, 0.0), [0, 0, -1], atol=1e-15
        )

    def test_45_deg_elevation(self):
        d = g.angles_to_direction(0.0, np.pi / 4)
        np.testing.assert_allclose(d, [np.sqrt(2) / 2, np.sqrt(2) / 2, 0], atol=1e-15)

    def test_unit_norm(self):
        rng = np.random.default_rng(1)
        theta = rng.uniform(-np.pi, np.pi, 500)
        phi = rng.uniform(-np.pi / 2, np.pi / 2, 500)
        d = g.angles_to_direction(theta, phi)
        np.testing.assert_allclose(np.linalg.norm(d, axis=-1), 1.0, atol=1e-14)


class TestProjectErp:
    def test_forward(self):
        theta, phi = g.project_point_erp(np.array([1.0, 0.0, 0.0]))
        assert theta == pytest.approx(0.0) and phi == pytest.approx(0.0)

    def test_quadrant(self):
        theta, phi = g.project_point_erp(np.array([0.0, 0.0, -1.0]))
        assert theta == pytest.approx(np.pi / 2)
        assert phi == pytest.approx(0.0)

    def test_elevated(self):
        theta, phi = g.project_point_erp(np.array([1.0, 1.0, 0.0]))
        assert theta == pytest.approx(0.0)
        assert phi == pytest.approx(np.pi / 4)

    def test_round_trip_direction(self):
        rng = np.random.default_rng(2)
        p = rng.normal(size=(1000, 3))
        theta, phi = g.project_point_erp(p)
        d = g.angles_to_direction(theta, phi)
        np.testing.assert_allclose(
            d, p / np.linalg.norm(p, axis=-1, keepdims=True), atol=1e-12
        )


class TestProjectOds:
    def test_fronto_point_left(self):
        vc = g.ViewingCircle(0.032)
        theta, phi = g.project_point_ods(np.array([2.0, 0.0, 0.0]), vc, "left")
        assert theta == pytest.approx(np.arcsin(0.016), abs=1e-15)
        assert phi == pytest.approx(0.0)

    def test_fronto_point_right_sign_flip(self):
        vc = g.ViewingCircle(0.032)
        theta, phi = g.project_point_ods(np.array([2.0, 0.0, 0.0]), vc, "right")
        assert theta == pytest.approx(-np.arcsin(0.016), abs=1e-15)
        assert phi == pytest.approx(0.0)

    def test_zero_radius_degenerates_to_erp(self):
        vc = g.ViewingCircle(0.0)
        rng = np.random.default_rng(3)
        p = rng.normal(size=(200, 3)) * 5
        for eye in ("left", "right"):
            to, po = g.project_point_ods(p, vc, eye)
            te, pe = g.project_point_erp(p)
            np.testing.assert_allclose(to, te, atol=1e-14)
            np.testing.assert_allclose(po, pe, atol=1e-14)

    def test_inside_viewing_circle_rejected(self):
        vc = g.ViewingCircle(0.032)
        with pytest.raises(GeometryDomainError):
            g.project_point_ods(np.array([0.01, 0.0, 0.0]), vc, "left")


class TestOdsRay:
    def test_forward_left(self):
        vc = g.ViewingCircle(0.032)
        o, d = g.ods_ray(0.0, 0.0, vc, "left")
        np.testing.assert_allclose(o, [0, 0, 0.032], atol=1e-15)
        np.testing.assert_allclose(d, [1, 0, 0], atol=1e-15)

    def test_forward_right(self):
        vc = g.ViewingCircle(0.032)
        o, d = g.ods_ray(0.0, 0.0, vc, "right")
        np.testing.assert_allclose(o, [0, 0, -0.032], atol=1e-15)
        np.testing.assert_allclose(d, [1, 0, 0], atol=1e-15)

    def test_zero_radius_collapses_to_erp(self):
        vc = g.ViewingCircle(0.0)
        o, d = g.ods_ray(0.7, -0.2, vc, "left")
        np.testing.assert_allclose(o, [0, 0, 0])
        np.testing.assert_allclose(d, g.angles_to_direction(0.7, -0.2))

    def test_project_ray_point_round_trip(self):
        # A point along an ODS ray re-projects to the ray's angles.
        vc = g.ViewingCircle(0.032)
        rng = np.random.default_rng(4)
        for eye in ("left", "right"):
            theta = rng.uniform(-np.pi, np.pi, 200)
            phi = rng.uniform(-1.4, 1.4, 200)
            o, d = g.ods_ray(theta, phi, vc, eye)
            p = o + 3.0 * d
            t2, p2 = g.project_point_ods(p, vc, eye)
            np.testing.assert_allclose(g.wrap_angle(t2 - theta), 0, atol=1e-12)
            np.testing.assert_allclose(p2, phi, atol=1e-12)


class TestPinhole:
    def test_principal_ray(self):
        intr = g.PinholeIntrinsics(100.0, 63.5, 63.5, 128, 128)
        o, d = g.pinhole_ray(63.5, 63.5, intr, g.Pose.identity())
        np.testing.assert_allclose(o, [0, 0, 0])
        np.testing.assert_allclose(d, [1, 0, 0], atol=1e-15)

    def test_45_deg_right(self):
        intr = g.PinholeIntrinsics(100.0, 63.5, 63.5, 128, 128)
        _, d = g.pinhole_ray(63.5 + 100.0, 63.5, intr, g.Pose.identity())
        expect = np.array([1.0, 0.0, -1.0]) / np.sqrt(2)
        np.testing.assert_allclose(d, expect, atol=1e-15)

    def test_rotation_linearity(self):
        intr = g.PinholeIntrinsics(80.0, 40.0, 30.0, 96, 64)
        pose = g.sample_transform(np.random.default_rng(5), 0.3, 0.1)
        _, d0 = g.pinhole_ray(12.0, 50.0, intr, g.Pose.identity())
        o, d = g.pinhole_ray(12.0, 50.0, intr, pose)
        np.testing.assert_allclose(d, pose.rotation @ d0, atol=1e-14)
        np.testing.assert_allclose(o, pose.translation)


class TestRaySphereExit:
    def test_centered(self):
        t = g.ray_sphere_exit(np.zeros(3), np.array([0.0, 1.0, 0.0]), 1.0)
        assert t == pytest.approx(1.0)

    def test_axial(self):
        t = g.ray_sphere_exit(np.array([0.5, 0, 0.0]), np.array([1.0, 0, 0]), 1.0)
        assert t == pytest.approx(0.5)

    def test_pythagoras(self):
        t = g.ray_sphere_exit(np.array([0.0, 0.6, 0.0]), np.array([1.0, 0, 0]), 1.0)
        assert t == pytest.approx(0.8)

    def test_exit_point_on_sphere(self):
        rng = np.random.default_rng(6)
        o = rng.normal(size=(500, 3)) * 0.3
        d = rng.normal(size=(500, 3))
        d /= np.linalg.norm(d, axis=-1, keepdims=True)
        t = g.ray_sphere_exit(o, d, 2.0)
        p = o + t[:, None] * d
        np.testing.assert_allclose(np.linalg.norm(p, axis=-1), 2.0, atol=1e-12)


class TestAreaWeights:
    def test_4x2_exact(self):
        w = g.area_weights(4, 2)
        np.testing.assert_allclose(w, np.pi / 2, rtol=1e-14)

    def test_total_is_sphere_area(self):
        for width, height in [(4, 2), (64, 32), (33, 17)]:
            assert g.area_weights(width, height).sum() == pytest.approx(
                4 * np.pi, rel=1e-12
            )

    def test_row_symmetry(self):
        w = g.area_weights(16, 9)
        np.testing.assert_allclose(w, w[::-1], rtol=1e-14)


class TestVCoordinate:
    def test_equator_rows(self):
        # Even height: the two middle rows straddle the equator symmetrically.
        assert g.v_coordinate(63.5, 128) == pytest.approx(0.0, abs=1e-14)

    def test_near_pole(self):
        assert g.v_coordinate(0, 4096) == pytest.approx(1.0, abs=1e-3)

    def test_symmetry(self):
        height = 33
        for y in range(height):
            assert g.v_coordinate(y, height) == pytest.approx(
                g.v_coordinate(height - 1 - y, height), abs=1e-14
            )


class TestPose:
    def test_identity_apply(self):
        p = np.array([1.0, 2.0, 3.0])
        np.testing.assert_allclose(g.Pose.identity().apply(p), p)

    def test_invert_round_trip(self):
        pose = g.sample_transform(np.random.default_rng(7), 0.5, 0.4)
        x = np.random.default_rng(8).normal(size=(20, 3))
        back = g.pose_invert(pose).apply(pose.apply(x))
        np.testing.assert_allclose(back, x, atol=1e-12)

    def test_translation_cancels(self):
        fwd = g.Pose.from_translation([0.1, -0.2, 0.3])
        bwd = g.Pose.from_translation([-0.1, 0.2, -0.3])
        combo = g.pose_compose(bwd, fwd)
        np.testing.assert_allclose(combo.rotation, np.eye(3))
        np.testing.assert_allclose(combo.translation, 0, atol=1e-15)

    def test_compose_applies_second_argument_first(self):
        a = g.sample_transform(np.random.default_rng(9), 0.4, 0.2)
        b = g.sample_transform(np.random.default_rng(10), 0.4, 0.2)
        x = np.array([0.3, -0.1, 0.9])
        np.testing.assert_allclose(
            g.pose_compose(a, b).apply(x), a.apply(b.apply(x)), atol=1e-14
        )

    def test_json_round_trip(self):
        pose = g.sample_transform(np.random.default_rng(11), 1.0, 0.5)
        back = g.Pose.from_json(pose.to_json())
        np.testing.assert_allclose(back.rotation, pose.rotation, atol=1e-15)
        np.testing.assert_allclose(back.translation, pose.translation, atol=1e-15)

    def test_non_orthonormal_rejected(self):
        with pytest.raises((ValueError, GeometryDomainError)):
            g.Pose(np.eye(3) * 1.01, np.zeros(3))


class TestSampleTransform:
    def test_zero_scale_is_identity(self):
        pose = g.sample_transform(np.random.default_rng(12), 0.0, 0.0)
        np.testing.assert_allclose(pose.rotation, np.eye(3))
        np.testing.assert_allclose(pose.translation, 0)

    def test_seed_determinism(self):
        a = g.sample_transform(np.random.default_rng(13), 0.2, 0.1)
        b = g.sample_transform(np.random.default_rng(13), 0.2, 0.1)
        np.testing.assert_array_equal(a.rotation, b.rotation)
        np.testing.assert_array_equal(a.translation, b.translation)

    def test_within_bounds(self):
        rng = np.random.default_rng(14)
        for _ in range(50):
            pose = g.sample_transform(rng, np.deg2rad(1.7), 0.01)
            assert np.linalg.norm(pose.translation, np.inf) <= 0.01 + 1e-12


class TestWrapAngle:
    def test_already_in_range(self):
        assert g.wrap_angle(0.5) == pytest.approx(0.5)

    def test_wraps_down(self):
        assert g.wrap_angle(np.pi + 0.1) == pytest.approx(-np.pi + 0.1)

    def test_wraps_up(self):
        assert g.wrap_angle(-np.pi - 0.1) == pytest.approx(np.pi - 0.1)
