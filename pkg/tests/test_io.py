import json

import numpy as np
import pytest

from posekit.exceptions import MalformedInput
from posekit.geometry import PinholeCamera
from posekit.io import dumps, format_float, read_json, read_poses, read_records, write_json, write_poses
from posekit.representation import Pose


class TestJson:
    def test_floats_carry_17_significant_digits(self):
        assert format_float(0.1) == "0.10000000000000001"
        assert format_float(2.0) == "2.0"
        assert format_float(1e20) == "1e+20"

    def test_numpy_values(self):
        assert dumps({"a": np.arange(3), "b": np.float32(0.5), "c": np.bool_(True)}) == '{"a": [0, 1, 2], "b": 0.5, "c": true}'

    def test_floats_survive_a_round_trip(self, rng):
        values = rng.normal(size=50) * 10.0 ** rng.integers(-8, 8, size=50)
        assert json.loads(dumps(values)) == values.tolist()

    def test_non_finite_float(self):
        with pytest.raises(ValueError):
            dumps([float("nan")])

    def test_indented_output_parses(self, tmp_path):
        data = {"table": {"Joint Error": {"Baseline": 1.5}}, "runs": [{"seed": 0}], "empty": []}
        write_json(tmp_path / "out.json", data)
        assert read_json(tmp_path / "out.json") == data

    def test_syntax_error_names_the_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "a": 1,\n  "b": \n}')
        with pytest.raises(MalformedInput) as info:
            read_json(path)
        assert info.value.line_number == 4
        assert f"{path}:4" in str(info.value)

    def test_invalid_utf8_names_the_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_bytes(b'{\n  "a": "\xff\xfe"\n}')
        with pytest.raises(MalformedInput) as info:
            read_json(path)
        assert info.value.line_number == 2
        assert "invalid UTF-8" in str(info.value)


class TestRecords:
    def test_pose_round_trip(self, tmp_path, rng):
        camera = PinholeCamera(1145.0, 1144.0, 512.0, 515.0)
        poses = [
            Pose(rng.normal(size=(17, 3)), sample_id="a", subject="S9"),
            Pose(rng.normal(size=(17, 2)), sample_id="b", subject="S11", camera=camera, root_depth=5123.5),
        ]
        write_poses(tmp_path / "poses.jsonl", poses)
        loaded = read_poses(tmp_path / "poses.jsonl")
        for original, restored in zip(poses, loaded):
            np.testing.assert_array_equal(restored.coords, original.coords)
            assert (restored.sample_id, restored.subject, restored.dims) == (
                original.sample_id, original.subject, original.dims,
            )
        assert loaded[1].camera == camera
        assert loaded[1].root_depth == 5123.5

    def test_extras_and_key(self, tmp_path):
        write_poses(tmp_path / "b.jsonl", [Pose(np.ones((2, 3)), sample_id="x")], key="bones", extras=[{"note": 1}])
        [(line_number, record)] = read_records(tmp_path / "b.jsonl")
        assert line_number == 1
        assert record["note"] == 1
        assert record["bones"] == [[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]]

    def test_blank_lines_are_skipped(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text('\n{"id": "a", "joints": [[0, 0]]}\n\n{"id": "b", "joints": [[1, 1]]}\n')
        assert [line for line, _ in read_records(path)] == [2, 4]

    @pytest.mark.parametrize(
        "line, reason",
        [
            ("{not json", "invalid JSON"),
            ("[1, 2]", "not a JSON object"),
            ('{"id": "a"}', "missing 'joints'"),
            ('{"id": "a", "joints": [["x", 1]]}', "numeric"),
            ('{"id": "a", "joints": [[1, 2, 3, 4]]}', "rows"),
            ('{"id": "a", "dims": 3, "joints": [[1, 2]]}', "'dims' is 3"),
            ('{"id": "a", "joints": [[1, NaN]]}', "non-finite"),
            ('{"id": "a", "joints": [[1, 2]], "camera": {"fx": 0, "fy": 1, "cx": 0, "cy": 0}}', "Focal"),
        ],
    )
    def test_malformed_record_names_file_and_line(self, tmp_path, line, reason):
        path = tmp_path / "p.jsonl"
        path.write_text('{"id": "ok", "joints": [[0, 0]]}\n' + line + "\n")
        with pytest.raises(MalformedInput) as info:
            read_poses(path)
        assert info.value.line_number == 2
        assert f"{path}:2" in str(info.value)
        assert reason in str(info.value)

    def test_invalid_utf8_names_the_line(self, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_bytes(b'{"id": "ok", "joints": [[0, 0]]}\n\xff\xfe\n{"id": "b", "joints": [[1, 1]]}\n')
        with pytest.raises(MalformedInput) as info:
            read_records(path)
        assert info.value.line_number == 2
        assert f"{path}:2" in str(info.value)
        assert "invalid UTF-8" in str(info.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(MalformedInput):
            read_records(tmp_path / "absent.jsonl")
