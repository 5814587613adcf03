import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aekernels import (Camera, CameraRig, ConfigurationError, GridSpec, RadialBasisField, azimuth_of,
                       parse_rig, radial_basis_field, rig_center)
from aekernels.tensor import rotation_matrix


def test_rig_center_single_camera():
    assert rig_center(CameraRig([Camera("f", 0, 0, 0, 800, 800)])).tolist() == [0.0, 0.0]


def test_rig_center_pair():
    rig = CameraRig([Camera("a", 1, 0, 0, 800, 800), Camera("b", -1, 0, 0, 800, 800)])
    assert rig_center(rig).tolist() == [0.0, 0.0]


def test_rig_center_hexagon():
    cams = [Camera(str(n), math.cos(n * math.pi / 3), math.sin(n * math.pi / 3), 0, 1, 1) for n in range(6)]
    assert np.abs(rig_center(CameraRig(cams))).max() <= 1e-12


def test_rig_center_empty():
    with pytest.raises(ConfigurationError):
        rig_center(CameraRig([]))


@pytest.mark.parametrize("point, expected", [((1, 0), 0.0), ((0, 1), math.pi / 2), ((-1, 0), math.pi),
                                             ((0, -1), -math.pi / 2), ((-1, -0.0), math.pi)])
def test_azimuth_convention(point, expected):
    assert azimuth_of(point, (0, 0)) == pytest.approx(expected, abs=1e-15)


def test_azimuth_of_coincident_is_zero():
    assert azimuth_of((2, 3), (2, 3)) == 0.0


@settings(max_examples=100, deadline=None)
@given(x=st.floats(-50, 50), y=st.floats(-50, 50), delta=st.floats(-10, 10),
       cx=st.floats(-3, 3), cy=st.floats(-3, 3))
def test_azimuth_equivariance(x, y, delta, cx, cy):
    if math.hypot(x - cx, y - cy) < 1e-3:
        return
    p = rotation_matrix(delta) @ np.array([x - cx, y - cy]) + (cx, cy)
    diff = azimuth_of(p, (cx, cy)) - azimuth_of((x, y), (cx, cy)) - delta
    assert abs(math.remainder(diff, 2 * math.pi)) <= 1e-12


@pytest.fixture
def field15():
    grid = GridSpec.centered(15, 15, 0.4)
    return grid, radial_basis_field(grid, (0.0, 0.0))


def test_basis_forward_and_left(field15):
    _, f = field15
    assert f.e_r[10, 7].tolist() == [1.0, 0.0] and f.e_o[10, 7].tolist() == [0.0, 1.0]
    assert f.e_r[7, 10].tolist() == [0.0, 1.0] and f.e_o[7, 10].tolist() == [-1.0, 0.0]
    assert f.alpha[7, 10] == pytest.approx(math.pi / 2)


def test_degenerate_center(field15):
    _, f = field15
    assert f.degenerate.sum() == 1 and f.degenerate[7, 7]
    assert f.alpha[7, 7] == 0.0
    assert f.e_r[7, 7].tolist() == [1.0, 0.0] and f.e_o[7, 7].tolist() == [0.0, 1.0]


def test_basis_orthonormal_right_handed_radial(field15):
    grid, f = field15
    np.testing.assert_allclose(np.linalg.norm(f.e_r, axis=-1), 1.0, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(f.e_o, axis=-1), 1.0, atol=1e-12)
    assert np.abs(np.sum(f.e_r * f.e_o, axis=-1)).max() <= 1e-12
    cross = f.e_r[..., 0] * f.e_o[..., 1] - f.e_r[..., 1] * f.e_o[..., 0]
    np.testing.assert_allclose(cross, 1.0, atol=1e-12)
    d = grid.cell_centers()
    radial_cross = d[..., 0] * f.e_r[..., 1] - d[..., 1] * f.e_r[..., 0]
    assert np.abs(radial_cross[~f.degenerate]).max() <= 1e-12
    assert np.all(np.sum(d * f.e_r, axis=-1)[~f.degenerate] > 0)


def test_alpha_matches_azimuth_of(field15):
    grid, f = field15
    pts = grid.cell_centers()
    for i, j in [(0, 0), (3, 12), (14, 7), (7, 0)]:
        assert f.alpha[i, j] == pytest.approx(azimuth_of(pts[i, j], (0, 0)), abs=1e-12)


@pytest.mark.parametrize("delta", [0.3, 1.0, -2.2])
def test_field_of_rotated_points_equals_rotated_basis(delta):
    # evaluate the field analytically at rotated cell centres
    center = np.array([0.7, -0.4])
    grid = GridSpec(9, 9, 1.0, (-3.6, -4.1))
    f = radial_basis_field(grid, center)
    rot = rotation_matrix(delta)
    pts = grid.cell_centers().reshape(-1, 2)
    rotated = (pts - center) @ rot.T + center
    for n, p in enumerate(rotated):
        i, j = divmod(n, 9)
        d = p - center
        er = d / np.linalg.norm(d)
        assert np.abs(er - rot @ f.e_r[i, j]).max() <= 1e-12
        assert np.abs(np.array([-er[1], er[0]]) - rot @ f.e_o[i, j]).max() <= 1e-12


def test_uniform_field():
    f = RadialBasisField.uniform(3, 4)
    assert (f.e_r == [1.0, 0.0]).all() and (f.e_o == [0.0, 1.0]).all() and not f.alpha.any()


def test_parse_rig():
    text = """
    # nuScenes-like pair
    camera front x=1.5 y=0 yaw=0 fx=1266.4 fy=1266.4
    camera back  x=-1.0 y=0.0 yaw=3.14159 fx=800 fy=800   # trailing comment
    """
    rig = parse_rig(text)
    assert [c.name for c in rig.cameras] == ["front", "back"]
    assert rig.center().tolist() == [0.25, 0.0]


@pytest.mark.parametrize("line, fragment", [
    ("camera a x=1 y=0 yaw=0 fx=1", "missing fy"),
    ("camera a x=1 y=0 yaw=0 fx=1 fy=abc", "fy is not a number"),
    ("cam a x=1 y=0 yaw=0 fx=1 fy=1", "expected 'camera"),
    ("camera a x=1 y=0 yaw=0 fx=1 fy=1 z=2", "unknown field"),
    ("camera a x=1 y=0 yaw=0 fx=-1 fy=1", "positive"),
])
def test_parse_rig_errors_report_line(line, fragment):
    with pytest.raises(ConfigurationError) as exc:
        parse_rig("\n# header\n" + line, source="rig.txt")
    assert "rig.txt:3" in str(exc.value) and fragment in str(exc.value)
