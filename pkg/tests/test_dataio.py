import numpy as np
import pytest

from specdenoise import dataio
from specdenoise.errors import DataError
from specdenoise.synth import SceneConfig, default_templates, generate_dataset


@pytest.fixture(scope="module")
def small_dataset(grid):
    cfg = SceneConfig(
        templates=default_templates()[:3], n_per_class=8, n_bland=10,
        n_groups=4, seed=11,
    )
    return generate_dataset(cfg, grid)


def test_dataset_csv_roundtrip(tmp_path, small_dataset):
    path = tmp_path / "ds.csv"
    dataio.write_dataset_csv(path, small_dataset)
    header = path.read_text().splitlines()[0]
    assert header.startswith("id,group_id,label,kind,w0001,")
    assert header.endswith("w0350")
    back = dataio.read_dataset_csv(path, split_assignment=small_dataset.split_assignment)
    assert np.array_equal(back.ids, small_dataset.ids)
    assert np.array_equal(back.labels, small_dataset.labels)
    assert np.array_equal(back.group_ids, small_dataset.group_ids)
    assert np.array_equal(back.kinds, small_dataset.kinds)
    # 11 significant digits of precision survive the round trip
    assert np.allclose(back.values, small_dataset.values, rtol=1e-9, atol=0)


def test_dataset_csv_deterministic(tmp_path, small_dataset):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    dataio.write_dataset_csv(p1, small_dataset)
    dataio.write_dataset_csv(p2, small_dataset)
    assert p1.read_bytes() == p2.read_bytes()


def test_wavelengths_sidecar_single_row(tmp_path, grid):
    path = tmp_path / "wavelengths.csv"
    dataio.write_wavelengths_csv(path, grid)
    text = path.read_text().strip()
    assert "\n" not in text
    assert len(text.split(",")) == 350
    back = dataio.read_wavelengths_csv(path)
    assert back.segment_break == grid.segment_break
    assert np.allclose(back.wavelengths, grid.wavelengths, rtol=1e-10)


def test_split_manifest_roundtrip(tmp_path):
    assignment = {0: "train", 3: "test", 1: "val", 2: "train"}
    path = tmp_path / "splits.csv"
    dataio.write_split_manifest(path, assignment)
    assert dataio.read_split_manifest(path) == assignment
    # rows sorted by group id for reproducible bytes
    lines = path.read_text().splitlines()
    assert lines[1] == "0,train"
    assert lines[-1] == "3,test"


def test_read_missing_file_raises():
    with pytest.raises(DataError):
        dataio.read_dataset_csv("/nonexistent/nope.csv")
    with pytest.raises(DataError):
        dataio.read_split_manifest("/nonexistent/nope.csv")


def test_read_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(DataError):
        dataio.read_dataset_csv(path)
