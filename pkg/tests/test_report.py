"""
Tests for report module
"""

import json

import pandas as pd
import pytest

from quantum_curves.report import Report, df_to_json_string, make_table, with_source


@pytest.fixture
def table():
    rows = [{"mu": "2", "M": "1/2"}, {"mu": "4", "M": "1/2"}]
    return make_table(rows, ["mu", "M"])


class TestMakeTable:
    """Test table construction"""

    def test_column_order(self, table):
        """Test columns follow the requested order"""
        assert list(table.columns) == ["mu", "M"]

    def test_cells_are_strings(self):
        """Test non-string cells are printed"""
        df = make_table([{"k": 1, "value": "x"}])
        assert df["k"].tolist() == ["1"]

    def test_missing_cells(self):
        """Test missing cells become empty strings"""
        df = make_table([{"a": "1"}, {"a": "2", "b": "3"}], ["a", "b"])
        assert df["b"].tolist() == ["", "3"]

    def test_empty(self):
        """Test an empty table keeps its header"""
        df = make_table([], ["order", "residual"])
        assert len(df) == 0
        assert list(df.columns) == ["order", "residual"]

    def test_with_source(self, table):
        """Test the provenance column is added to a copy"""
        sourced = with_source(table, "oracle")
        assert sourced["expected_source"].tolist() == ["oracle", "oracle"]
        assert "expected_source" not in table.columns


class TestJsonSidecar:
    """Test the JSON sidecar format"""

    def test_fields(self, table):
        """Test title, shape, columns and data"""
        result = json.loads(df_to_json_string(table, "Belyi counts"))
        assert result["title"] == "Belyi counts"
        assert result["shape"] == {"rows": 2, "columns": 2}
        assert result["columns"] == ["mu", "M"]
        assert result["data"][0] == {"mu": "2", "M": "1/2"}
        assert "warning" not in result

    def test_truncation(self):
        """Test large tables are truncated with a warning"""
        df = make_table([{"n": str(i)} for i in range(20)])
        result = json.loads(df_to_json_string(df, max_rows=5))
        assert len(result["data"]) == 5
        assert "total: 20 rows" in result["warning"]

    def test_sorted_keys(self, table):
        """Test keys are sorted so the sidecar is deterministic"""
        text = df_to_json_string(table, "t")
        assert text.index('"columns"') < text.index('"data"') < text.index('"shape"')


class TestReport:
    """Test report rendering and writing"""

    def test_text(self, table):
        """Test the title line followed by the table without index"""
        text = Report("counts", table).to_text()
        lines = text.splitlines()
        assert lines[0] == "counts"
        assert lines[1].split() == ["mu", "M"]
        assert lines[2].split() == ["2", "1/2"]

    def test_empty_text(self):
        """Test an empty report"""
        report = Report("nothing", pd.DataFrame())
        assert report.to_text() == "nothing\n(no rows)\n"

    def test_notes(self, table):
        """Test notes follow the table"""
        text = Report("counts", table, notes=["depth 5"]).to_text()
        assert text.endswith("depth 5\n")

    def test_write(self, table, tmp_path):
        """Test writing the text report and its sidecar"""
        output = tmp_path / "report.txt"
        text = Report("counts", table).write(output)
        assert output.read_text() == text
        sidecar = json.loads((tmp_path / "report.json").read_text())
        assert sidecar["title"] == "counts"

    def test_write_without_output(self, table, tmp_path):
        """Test no files without an output path"""
        Report("counts", table).write()
        assert list(tmp_path.iterdir()) == []

    def test_deterministic(self, table, tmp_path):
        """Test two writes of the same report are byte-identical"""
        first, second = tmp_path / "a.txt", tmp_path / "b.txt"
        Report("counts", table).write(first)
        Report("counts", table).write(second)
        assert first.read_bytes() == second.read_bytes()
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
