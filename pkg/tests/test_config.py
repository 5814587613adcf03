import pytest

from aekernels import ConfigurationError
from aekernels.config import RunConfig, load_config


def test_defaults_match_published_constants():
    cfg = RunConfig()
    assert (cfg.depth_bins, cfg.virtual_depth, cfg.virtual_focal) == (180, 54.0, 800.0)
    assert (cfg.fixed_near, cfg.fixed_far, cfg.fixed_step) == (2.0, 54.0, 0.5)
    assert cfg.fixed_spec().bins == 104


def test_load(tmp_path):
    (tmp_path / "rig.txt").write_text("camera a x=2 y=0 yaw=0 fx=1 fy=1\ncamera b x=0 y=2 yaw=0 fx=1 fy=1\n")
    (tmp_path / "run.cfg").write_text("# grid\nheight = 21\nwidth=17\nresolution=0.25\nrig=rig.txt\n")
    cfg = load_config(tmp_path / "run.cfg")
    assert (cfg.height, cfg.width, cfg.resolution) == (21, 17, 0.25)
    assert cfg.azimuth_center().tolist() == [1.0, 1.0]
    g = cfg.grid()
    assert g.to_cell((0.0, 0.0)).tolist() == [10.0, 8.0]


@pytest.mark.parametrize("text, fragment", [
    ("tol_exactt=1e-9", "unknown key"),
    ("height", "expected key=value"),
    ("height=abc", "not a valid"),
    ("height=3\nheight=4", "duplicate"),
    ("tol_gradient=0", "must be positive"),
    ("kernel_extent=4", "odd"),
])
def test_errors(tmp_path, text, fragment):
    (tmp_path / "bad.cfg").write_text(text)
    with pytest.raises(ConfigurationError, match=fragment):
        load_config(tmp_path / "bad.cfg")


def test_override():
    cfg = RunConfig().with_overrides({"seed": "7", "virtual_focal": "900"})
    assert cfg.seed == 7 and cfg.virtual_focal == 900.0
