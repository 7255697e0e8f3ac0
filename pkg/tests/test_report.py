import json
import math

import pytest
from hypothesis import given, strategies as st

from qgeo.errors import ContractError
from qgeo.report import HEADER, ReportRow, emit_report, parse_csv, rows_to_csv, rows_to_json

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


def test_empty_report_rejected():
    with pytest.raises(ContractError):
        rows_to_csv([])
    with pytest.raises(ContractError):
        rows_to_json([])


def test_single_row_csv():
    text = rows_to_csv([ReportRow("s", 0.5, "x", 1.0, 1.0, 0.0)])
    lines = text.strip().split("\n")
    assert len(lines) == 2
    assert lines[0] == ",".join(HEADER)
    assert lines[1].endswith(",true")


@given(finite, finite, finite, finite)
def test_csv_round_trip_is_exact(a, b, c, d):
    row = ReportRow("s", "k", "q", complex(a, b), complex(c, d), 1.0)
    back = parse_csv(rows_to_csv([row]))[0]
    assert back["value_re"] == a and back["value_im"] == b
    ref = back["reference"]
    assert complex(ref) == complex(c, d)


def test_json_round_trip():
    rows = [ReportRow("s", 1, "q", 1 + 2j, 0.5j, 0.1), ReportRow("s", 2, "r", 0.25, 0.25, 0.0)]
    recs = json.loads(rows_to_json(rows))
    assert recs[0]["reference"] == {"re": 0.0, "im": 0.5}
    assert recs[1]["reference"] == 0.25 and recs[1]["pass"] is True
    assert recs[0]["value_im"] == 2.0 and recs[0]["pass"] is False


def test_at_least_mode():
    ok = ReportRow("s", 0, "ratio", 4.1, 3.9, 123.0, "at_least")
    bad = ReportRow("s", 0, "ratio", 3.0, 3.9, 123.0, "at_least")
    assert ok.passed and ok.abs_error == 0
    assert not bad.passed and bad.abs_error == pytest.approx(0.9)


def test_nan_value_fails():
    row = ReportRow("s", 0, "error:DomainError", float("nan"), 0.0, 1.0)
    assert not row.passed
    assert "nan" in rows_to_csv([row])
    assert json.loads(rows_to_json([row]))[0]["value_re"] == "nan"


def test_emit_report(tmp_path):
    rows = [ReportRow("s", 0, "q", 1.0, 1.0, 0.0)]
    path = emit_report(rows, tmp_path / "out", "r", "json")
    assert path.name == "r.json" and path.exists()
    with pytest.raises(ContractError):
        emit_report(rows, tmp_path, "r", "xml")
    assert math.isclose(parse_csv(emit_report(rows, tmp_path, "r").read_text())[0]["value_re"], 1.0)
