"""Scenario dataset files"""
import json

import pytest

from errors import DatasetParseError, FormatVersionError
from scenarios.dataset import DATASET_FORMAT, load_dataset, save_dataset
from scenarios.generator import generate_grouped_test_set, generate_scenario


class TestDatasetFiles:

    def test_save_and_load_preserve_every_field(self, tmp_path):
        specs = generate_grouped_test_set([3, 5], [0.0, 1.0], 2, seed=8)
        path = tmp_path / "scenarios.jsonl"
        assert save_dataset(specs, str(path)) == len(specs)
        assert load_dataset(str(path)) == specs

    def test_empty_dataset(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        save_dataset([], str(path))
        assert load_dataset(str(path)) == []

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "old.jsonl"
        path.write_text(json.dumps({"format": DATASET_FORMAT, "version": 99}) + "\n")
        with pytest.raises(FormatVersionError):
            load_dataset(str(path))

    def test_malformed_record_names_line_and_record(self, tmp_path):
        path = tmp_path / "broken.jsonl"
        save_dataset([generate_scenario(2, 0.5, seed=1), generate_scenario(2, 0.5, seed=2)], str(path))
        lines = path.read_text().splitlines()
        lines[2] = lines[2][:-5]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(DatasetParseError) as info:
            load_dataset(str(path))
        assert info.value.line_number == 3
        assert info.value.record_index == 1
        assert "line 3" in str(info.value)

    def test_unknown_kind_is_parse_error(self, tmp_path):
        path = tmp_path / "kind.jsonl"
        save_dataset([generate_scenario(1, 1.0, seed=1)], str(path))
        text = path.read_text().replace('"CV"', '"TRUCK"')
        path.write_text(text)
        with pytest.raises(DatasetParseError):
            load_dataset(str(path))

    def test_not_a_dataset(self, tmp_path):
        path = tmp_path / "other.jsonl"
        path.write_text('{"hello": 1}\n')
        with pytest.raises(DatasetParseError):
            load_dataset(str(path))
