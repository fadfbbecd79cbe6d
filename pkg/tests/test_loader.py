"""Tests for the JSON / CSV file formats (src.schema.loader)."""

import json

import numpy as np
import pandas as pd
import pytest

from src import __version__
from src.errors import DomainError, ParseError
from src.geometry.hermitian import HpdMatrix
from src.sampling.generators import sample_lognormal, sample_lognormal_curves
from src.schema.loader import (
    load_curve,
    load_curve_sample,
    load_matrix,
    load_report,
    load_sample,
    read_json,
    save_curve_sample,
    save_matrix,
    save_sample,
    save_table,
    write_report,
)
from src.schema.models import HpdCurveSample, HpdSample


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

@pytest.fixture
def sample():
    return sample_lognormal(HpdMatrix.identity(2), 0.5, 6, seed=1)


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


# ===================================================================
# Samples
# ===================================================================

class TestSamples:
    """SampleFile reading and writing."""

    def test_sample_round_trip_is_exact(self, sample, tmp_path):
        path = tmp_path / "sample.json"
        save_sample(sample, path)
        back = load_sample(path)
        assert isinstance(back, HpdSample)
        assert np.array_equal(back.obs, sample.obs)

    def test_real_sample_omits_imaginary_parts(self, tmp_path):
        s = sample_lognormal(HpdMatrix.identity(2), 0.5, 3, seed=2, complex_valued=False)
        path = tmp_path / "real.json"
        save_sample(s, path)
        doc = json.loads(path.read_text())
        assert doc["complex"] is False
        assert "im" not in doc["observations"][0]

    def test_curve_sample_detected_by_grid(self, tmp_path):
        curves = sample_lognormal_curves(3, [0.0, 0.5, 1.0], 2, 0.3, seed=1)
        path = tmp_path / "curves.json"
        save_curve_sample(curves, path)
        back = load_sample(path)
        assert isinstance(back, HpdCurveSample)
        assert np.array_equal(back.curves, curves.curves)
        assert isinstance(load_curve_sample(path), HpdCurveSample)

    def test_matrix_sample_is_not_a_curve_sample(self, sample, tmp_path):
        path = tmp_path / "sample.json"
        save_sample(sample, path)
        with pytest.raises(DomainError, match="grid"):
            load_curve_sample(path)

    def test_minimal_hand_written_sample(self, tmp_path):
        path = _write(tmp_path, "toy.json",
                      '{"observations": [{"re": [[2.0]]}, {"re": [[3.0]]}]}')
        s = load_sample(path)
        assert (s.n, s.dim) == (2, 1)

    def test_non_pd_observation(self, tmp_path):
        path = _write(tmp_path, "bad.json",
                      '{"observations": [{"re": [[1.0, 0.0], [0.0, -2.0]]}]}')
        with pytest.raises(DomainError, match="observation 0"):
            load_sample(path)


# ===================================================================
# Parse errors
# ===================================================================

class TestParseErrors:
    """Malformed input maps to ParseError."""

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError, match="not found"):
            read_json(tmp_path / "absent.json")

    def test_syntax_error_has_position(self, tmp_path):
        path = _write(tmp_path, "broken.json", '{\n  "observations": [\n}')
        with pytest.raises(ParseError) as exc_info:
            read_json(path)
        assert exc_info.value.line == 3
        assert "line 3" in str(exc_info.value)

    def test_missing_observations(self, tmp_path):
        path = _write(tmp_path, "empty.json", '{"dim": 2}')
        with pytest.raises(ParseError, match="observations"):
            load_sample(path)

    def test_missing_real_part(self, tmp_path):
        path = _write(tmp_path, "nore.json", '{"observations": [{"im": [[0.0]]}]}')
        with pytest.raises(ParseError, match="malformed"):
            load_sample(path)

    @pytest.mark.parametrize("entry", ['{"re": [[1.0, 0.0], [0.0]]}', '{"re": [["x"]]}'])
    def test_unreadable_entries(self, tmp_path, entry):
        path = _write(tmp_path, "ragged.json", '{"observations": [' + entry + "]}")
        with pytest.raises(ParseError, match="malformed"):
            load_sample(path)

    def test_report_requires_keys(self, tmp_path):
        path = _write(tmp_path, "report.json", '{"command": "depth", "params": {}}')
        with pytest.raises(ParseError, match="results"):
            load_report(path)

    def test_curve_must_be_a_list(self, tmp_path):
        path = _write(tmp_path, "curve.json", '{"curve": 3}')
        with pytest.raises(ParseError, match="list"):
            load_curve(path)


# ===================================================================
# Matrices, curves and reports
# ===================================================================

class TestMatricesAndReports:
    """Single matrices, query curves and ReportFiles."""

    def test_matrix_round_trip(self, tmp_path):
        m = HpdMatrix(np.array([[2.0, 0.5j], [-0.5j, 1.0]]))
        path = tmp_path / "m.json"
        save_matrix(m, path)
        assert load_matrix(path).allclose(m, atol=0.0)

    def test_matrix_from_center_report(self, tmp_path):
        m = HpdMatrix(np.diag([2.0, 3.0]))
        path = tmp_path / "center.json"
        write_report("center", {"type": "mean"}, {"type": "mean", "matrix": m.to_dict()}, path)
        assert load_matrix(path).allclose(m, atol=0.0)

    def test_curve_forms(self, tmp_path):
        entries = [{"re": [[1.0]]}, {"re": [[2.0]]}]
        bare = _write(tmp_path, "bare.json", json.dumps(entries))
        wrapped = _write(tmp_path, "wrapped.json", json.dumps({"curve": entries}))
        assert load_curve(bare).shape == (2, 1, 1)
        assert np.array_equal(load_curve(bare), load_curve(wrapped))

    def test_write_report_provenance(self, tmp_path):
        path = tmp_path / "out" / "report.json"
        doc = write_report("cr", {"seed": 3}, {"values": np.array([0.5, 0.25])}, path)
        assert doc["results"]["values"] == [0.5, 0.25]
        assert doc["provenance"]["version"] == __version__
        assert "PCG64" in doc["provenance"]["rng"]
        assert load_report(path)["params"] == {"seed": 3}

    def test_write_report_to_stdout(self, capsys):
        write_report("depth", {}, {"x": 1})
        out = json.loads(capsys.readouterr().out)
        assert out["command"] == "depth"

    def test_save_table(self, tmp_path):
        df = pd.DataFrame({"method": ["gdd"], "value": [1 / 3]})
        path = tmp_path / "tables" / "t.csv"
        save_table(df, path)
        back = pd.read_csv(path, float_precision="round_trip")
        assert back.loc[0, "value"] == 1 / 3
        assert list(back.columns) == ["method", "value"]
