import io
import json
import math

import numpy as np
import pytest

from proxcvx.catalog import Box, builtin
from proxcvx.certify import alpha_interval
from proxcvx.state import Attainment
from proxcvx.writer import (
    TRACE_COLUMNS, WITNESS_COLUMNS, CsvWriter, TraceRowAdapter, WitnessRowAdapter, _fmt, to_json_text,
    write_json, write_witness_csv,
)


@pytest.mark.parametrize("value, text", [
    (None, ""),
    (3, "3"),
    (0.5, "0.5"),
    ((2.0, 3.0), "2.0;3.0"),
    (np.float64(1.25), "1.25"),
    ("upper", "upper"),
])
def test_fmt(value, text):
    """
    Cells are written as plain numbers, ";"-joined vectors or text; None is empty.
    """
    assert _fmt(value) == text


def test_trace_row_adapter_orders_cells():
    """
    Trace rows follow the header order.
    """
    row = TraceRowAdapter(2, (1.0,), -0.5, 0.25)
    assert row.values == ["2", "1.0", "-0.5", "0.25", ""]


def test_witness_row_adapter_fills_missing_cells():
    """
    Missing witness cells are written empty.
    """
    row = WitnessRowAdapter({"z": (0.0,), "bound_type": "vacuous"})
    assert row.values == ["0.0", "", "", "", "", "vacuous", ""]


def test_writer_ignores_rows_when_closed():
    """
    A closed writer drops rows.
    """
    writer = CsvWriter(TRACE_COLUMNS)
    writer._dump(TraceRowAdapter(0, (0.0,), 0.0, 0.0))
    assert writer.rows_written == 0


def test_writer_context_manager_flushes_stream():
    """
    Leaving the context flushes a borrowed stream without closing it.
    """
    buffer = io.StringIO()
    with CsvWriter(("a", "b")).open(buffer) as writer:
        writer._dump(WitnessRowAdapter({}))
    assert buffer.getvalue().splitlines()[0] == "a,b"
    assert not buffer.closed


def test_write_witness_csv_from_certificate():
    """
    The binding row of negquad is written as z, xbar, x, lhs, ip, type, bound.
    """
    f = builtin("negquad")
    cert = alpha_interval(f, Box.interval(0.0, 1.0), zgrid=[0.0], xgrid=[0.0, 0.5, 1.0], record_rows=True)
    buffer = io.StringIO()
    assert write_witness_csv(cert, buffer) == 3
    lines = buffer.getvalue().splitlines()
    assert lines[0] == ",".join(WITNESS_COLUMNS)
    assert lines[1] == "0.0,1.0,0.0,-2.0,-1.0,upper,2.0"


def test_json_text_is_sorted_and_stamped():
    """
    JSON keys are sorted and a timestamp is added unless disabled.
    """
    text = to_json_text({"b": 1, "a": math.inf, "c": Attainment.DIVERGENT})
    data = json.loads(text)
    assert list(data) == ["a", "b", "c", "timestamp"]
    assert data["a"] == "+inf"
    assert data["c"] == "divergent"
    assert "timestamp" not in json.loads(to_json_text({"a": 1}, timestamp=False))


def test_write_json_to_file(tmp_path):
    """
    Reports can be written to a path.
    """
    path = tmp_path / "report.json"
    write_json({"value": np.float64(2.5)}, str(path), timestamp=False)
    assert json.loads(path.read_text()) == {"value": 2.5}


def test_numpy_scalars_serialise_as_plain_json():
    """
    numpy booleans and integers nested in a report become JSON true/false and ints.
    """
    rate = np.array([1.0, 0.5])
    report = {"cases": {"halfsquare": {"ok": rate[-1] <= np.max(rate), "steps": np.int64(3)}}}
    data = json.loads(to_json_text(report, timestamp=False))
    assert data["cases"]["halfsquare"]["ok"] is True, "numpy bool should become JSON true"
    assert data["cases"]["halfsquare"]["steps"] == 3
