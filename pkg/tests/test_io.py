import json

import numpy as np
import pytest

from tubal import io as tio

from conftest import rand_tensor


def test_tensor_container_round_trip(tmp_path):
    x = rand_tensor(40, (3, 4, 5))
    path = tmp_path / "x.bin"
    tio.save_tensor(path, x)
    assert np.array_equal(tio.load_tensor(path), x)
    assert np.array_equal(tio.load_array(path), x)


def test_vector_and_matrix_round_trip(tmp_path):
    v = np.linspace(-1, 1, 7)
    a = rand_tensor(41, (4, 6, 1))[:, :, 0]
    tio.save_vector(tmp_path / "v.bin", v)
    tio.save_matrix(tmp_path / "a.bin", a)
    assert np.array_equal(tio.load_vector(tmp_path / "v.bin"), v)
    assert np.array_equal(tio.load_matrix(tmp_path / "a.bin"), a)


def test_container_magic_mismatch(tmp_path):
    v = np.zeros(3)
    tio.save_vector(tmp_path / "v.bin", v)
    with pytest.raises(ValueError):
        tio.load_tensor(tmp_path / "v.bin")


def test_container_rejects_garbage(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOPE" + b"\x00" * 24)
    with pytest.raises(ValueError):
        tio.load_array(path)


def test_container_rejects_truncated_payload(tmp_path):
    x = rand_tensor(42, (2, 2, 2))
    path = tmp_path / "x.bin"
    tio.save_tensor(path, x)
    raw = path.read_bytes()
    path.write_bytes(raw[:-8])
    with pytest.raises(ValueError):
        tio.load_tensor(path)


def test_json_debug_round_trip():
    x = rand_tensor(43, (2, 3, 4))
    doc = tio.tensor_to_json(x)
    assert doc["dims"] == [2, 3, 4]
    back = tio.tensor_from_json(json.dumps(doc))
    assert np.array_equal(back, x)


def test_json_debug_rejects_wrong_kind():
    with pytest.raises(ValueError):
        tio.tensor_from_json({"kind": "other", "dims": [1, 1, 1], "slices": [[[0.0]]]})
