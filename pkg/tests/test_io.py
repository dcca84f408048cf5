import json
import math

import numpy as np
import pytest

from manifold_lens.estimators import EstimatorParams, batch_estimate
from manifold_lens.geometry import DensityModel, NoiseModel, sample, sphere_model, torus3d_model
from manifold_lens.io import dumps, points_header, read_cloud, read_measure, write_cloud, write_point_table


@pytest.mark.parametrize("model", [sphere_model(1, 2), sphere_model(2, 3), torus3d_model(2.0, 0.5)])
def test_cloud_round_trip(tmp_path, model):
    cloud = sample(model, DensityModel(), NoiseModel("iid_ball", 0.01), 50, 4)
    csv_path, sidecar = write_cloud(cloud, tmp_path / "cloud.csv")
    back = read_cloud(csv_path)
    for name in ("points", "clean", "foot", "tangents"):
        np.testing.assert_array_equal(getattr(back, name), getattr(cloud, name))
    assert back.seed == cloud.seed
    assert json.loads(sidecar.read_text())["schema"] == "manifold-lens/cloud/1"


def test_plain_coordinates(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("0.0,1.0\n2.0,3.0\n")
    cloud = read_cloud(path)
    np.testing.assert_array_equal(cloud.points, [[0.0, 1.0], [2.0, 3.0]])
    assert cloud.metadata["has_ground_truth"] is False


def test_point_table(tmp_path):
    cloud = sample(sphere_model(1, 2), DensityModel(), NoiseModel(), 30, 1)
    res = batch_estimate(cloud.points[[0, 1, 2]].tolist() + [[9.0, 9.0]], EstimatorParams(r=0.5, eta=0.05))
    path = tmp_path / "points.csv"
    write_point_table(res.estimates, 2, path)
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == points_header(2)
    assert len(lines) == 5
    assert lines[-1].split(",")[2] == ""


def test_read_measure(tmp_path):
    weighted = tmp_path / "w.csv"
    weighted.write_text("x0,weight\n0.0,1\n2.0,3\n")
    mu = read_measure(weighted)
    np.testing.assert_allclose(mu.weights, [0.25, 0.75])
    plain = tmp_path / "p.csv"
    plain.write_text("0.0,0.0\n1.0,1.0\n")
    np.testing.assert_allclose(read_measure(plain).weights, [0.5, 0.5])


def test_dumps_canonical():
    text = dumps({"b": np.float64(math.inf), "a": [np.int64(1), math.nan], "c": np.bool_(True)})
    assert json.loads(text) == {"a": [1, "nan"], "b": "inf", "c": True}
    assert text.index('"a"') < text.index('"b"')
    assert text == dumps(json.loads(text))
