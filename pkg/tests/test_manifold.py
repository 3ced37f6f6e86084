"""Spec files: validation, sampling determinism, compilation."""

import numpy as np
import pytest

from statmanifold import ManifoldSpec, SampleSpec, SpecValidationError


def minimal_spec(**overrides):
    data = {
        "name": "test",
        "dim": 2,
        "coordinates": ["x1", "x2"],
        "metric": {"11": "1", "12": "0", "22": "1"},
        "cubic": {"111": "x1"},
        "parameters": {},
        "sample": {"box": {"x1": [-1.0, 1.0], "x2": [-1.0, 1.0]}, "count": 10, "seed": 1,
                   "strategy": "uniform"},
    }
    data.update(overrides)
    return ManifoldSpec.from_dict(data)


def test_valid_spec_passes():
    minimal_spec().validate()


def test_missing_metric_component():
    spec = minimal_spec(metric={"11": "1", "22": "1"})
    with pytest.raises(SpecValidationError, match="missing metric component '12'"):
        spec.validate()


def test_unsorted_cubic_key_rejected():
    spec = minimal_spec(cubic={"121": "x1"})
    with pytest.raises(SpecValidationError, match="sorted index triple"):
        spec.validate()


def test_unsorted_metric_key_rejected():
    spec = minimal_spec(metric={"11": "1", "21": "0", "22": "1"})
    with pytest.raises(SpecValidationError, match="sorted index pair"):
        spec.validate()


def test_duplicate_and_reserved_names():
    with pytest.raises(SpecValidationError, match="duplicate coordinate"):
        minimal_spec(coordinates=["x1", "x1"]).validate()
    with pytest.raises(SpecValidationError, match="invalid coordinate name"):
        minimal_spec(coordinates=["x1", "sin"]).validate()


def test_dimension_range():
    with pytest.raises(SpecValidationError, match="dim must be"):
        minimal_spec(dim=1, coordinates=["x1"], metric={"11": "1"}, cubic={},
                     sample={"box": {"x1": [0, 1]}, "count": 4, "seed": 1,
                             "strategy": "uniform"}).validate()


def test_expression_errors_are_collected():
    spec = minimal_spec(metric={"11": "1 +", "12": "0", "22": "x9"})
    with pytest.raises(SpecValidationError) as err:
        spec.validate()
    text = str(err.value)
    assert "metric[11]" in text and "metric[22]" in text


def test_box_must_be_ordered_and_complete():
    with pytest.raises(SpecValidationError, match="lo < hi"):
        minimal_spec(sample={"box": {"x1": [1.0, -1.0], "x2": [0.0, 1.0]},
                             "count": 4, "seed": 1, "strategy": "uniform"}).validate()
    with pytest.raises(SpecValidationError, match="missing coordinate"):
        minimal_spec(sample={"box": {"x1": [0.0, 1.0]}, "count": 4, "seed": 1,
                             "strategy": "uniform"}).validate()
    with pytest.raises(SpecValidationError, match="strategy"):
        minimal_spec(sample={"box": {"x1": [0.0, 1.0], "x2": [0.0, 1.0]},
                             "count": 4, "seed": 1, "strategy": "sobol"}).validate()


def test_probe_detects_domain_violation():
    # 1/x1 blows up inside a box straddling zero
    spec = minimal_spec(metric={"11": "1 + 1/x1", "12": "0", "22": "1"})
    with pytest.raises(SpecValidationError, match="leaves its domain"):
        spec.validate()


def test_probe_detects_indefinite_metric():
    spec = minimal_spec(metric={"11": "-1", "12": "0", "22": "1"})
    with pytest.raises(SpecValidationError, match="positive definite"):
        spec.validate()


def test_sampling_is_deterministic_and_has_corners():
    spec = minimal_spec()
    a = spec.sample_points()
    b = spec.sample_points()
    np.testing.assert_array_equal(a, b)
    assert a.shape == (10 + 4, 2)  # count + 2^m corners
    corners = a[-4:]
    assert set(map(tuple, corners.round(12))) == {
        (-0.8, -0.8), (-0.8, 0.8), (0.8, -0.8), (0.8, 0.8)
    }
    c = spec.sample_points(seed=2)
    assert not np.array_equal(a[:10], c[:10])


def test_grid_strategy_covers_count():
    spec = minimal_spec(sample={"box": {"x1": [0.0, 1.0], "x2": [0.0, 1.0]},
                                "count": 10, "seed": 1, "strategy": "grid"})
    pts = spec.sample_points()
    assert pts.shape[0] == 16 + 4  # 4x4 grid plus corners
    np.testing.assert_array_equal(pts, spec.sample_points())


def test_points_respect_box():
    spec = minimal_spec()
    pts = spec.sample_points(count=200)
    assert np.all(pts >= -1.0) and np.all(pts <= 1.0)


def test_content_hash_tracks_content():
    a = minimal_spec().content_hash()
    assert a == minimal_spec().content_hash()
    b = minimal_spec(cubic={"111": "x2"}).content_hash()
    assert a != b


def test_compiled_cubic_is_totally_symmetric():
    spec = minimal_spec(cubic={"112": "x1 + x2"})
    compiled = spec.compile()
    pts = spec.sample_points(count=5)
    jets = compiled.cubic_jets(pts, 2)
    v = np.stack([[jets[i, j, k].value for k in range(2)] for i in range(2) for j in range(2)])
    c112 = jets[0, 0, 1].value
    assert np.allclose(jets[0, 1, 0].value, c112)
    assert np.allclose(jets[1, 0, 0].value, c112)
    assert np.allclose(jets[1, 1, 1].value, 0.0)
    assert v.shape == (4, 2, pts.shape[0])


def test_malformed_document_rejected():
    with pytest.raises(SpecValidationError):
        ManifoldSpec.from_dict({"name": "x"})


def test_sample_spec_roundtrip():
    spec = minimal_spec()
    again = ManifoldSpec.from_dict(spec.to_dict())
    assert again.to_json() == spec.to_json()
    assert isinstance(again.sample, SampleSpec)
