import csv
import json
from abc import ABC, abstractmethod
from datetime import datetime, timezone
from typing import IO, List, Optional, Sequence, Union

from .report import _jsonable

TRACE_COLUMNS = ("k", "x", "h", "step_norm", "fejer_dist")
WITNESS_COLUMNS = ("z", "xbar", "x", "lhs", "ip", "bound_type", "bound_value")

Target = Union[str, IO[str]]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (tuple, list)):
        return ";".join(_fmt(v) for v in value)
    if isinstance(value, str):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    return repr(float(value))


class _ICsvRecord(ABC):
    """Minimal interface of one CSV row.

    Decouples `CsvWriter` from traces and certificates: anything that can
    list its cells in column order can be dumped.
    """

    @property
    @abstractmethod
    def values(self) -> List[str]:
        """list of str: Formatted cells in column order."""
        ...


class TraceRowAdapter(_ICsvRecord):
    """One PPA iterate as a trace CSV row.

    Parameters
    ----------
    k : int
        Iteration index (0 for ``x0``).
    x : sequence of float
        The iterate; coordinates are joined with ``;``.
    h : float
        Objective value at the iterate.
    step_norm : float
        ``|x^k - x^{k-1}|``.
    fejer_dist : float, optional
        Distance to the anchor minimiser, blank when unknown.
    """

    def __init__(self, k: int, x: Sequence[float], h: float, step_norm: float, fejer_dist: Optional[float] = None):
        self._cells = (k, tuple(x), h, step_norm, fejer_dist)

    @property
    def values(self) -> List[str]:
        return [_fmt(v) for v in self._cells]


class WitnessRowAdapter(_ICsvRecord):
    """One classified ``(z, x)`` constraint of an alpha certificate."""

    def __init__(self, row: dict):
        self._row = row

    @property
    def values(self) -> List[str]:
        return [_fmt(self._row.get(column)) for column in WITNESS_COLUMNS]


class CsvWriter:
    """Streaming CSV writer with a fixed header.

    Attributes
    ----------
    columns : tuple of str
        Header cells.
    f : file object or None
        The output stream.

    Examples
    --------
    >>> writer = TraceWriter()
    >>> writer.open("trace.csv")
    >>> # ProximalPointMethod calls writer._dump() once per iterate
    >>> writer.close()
    """

    def __init__(self, columns: Sequence[str]):
        self.columns = tuple(columns)
        self.f = None
        self._owned = False
        self._csv = None
        self.rows_written = 0

    # ---------------------------------------------------------
    # Open / close
    # ---------------------------------------------------------
    def open(self, target: Target):
        """Open a file name or attach to an open text stream, then write the header."""
        if isinstance(target, str):
            self.f = open(target, "w", newline="")
            self._owned = True
        else:
            self.f = target
            self._owned = False
        self._csv = csv.writer(self.f, lineterminator="\n")
        self._write_header()
        return self

    def close(self):
        """Close the file if this writer opened it."""
        if not self.f:
            return
        if self._owned:
            self.f.close()
        else:
            self.f.flush()
        self.f = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # ---------------------------------------------------------
    # Rows
    # ---------------------------------------------------------
    def _write_header(self):
        if not self.f:
            return
        self._csv.writerow(self.columns)

    def _dump(self, record: _ICsvRecord):
        """Append one row."""
        if not self.f:
            return
        self._csv.writerow(record.values)
        self.rows_written += 1


class TraceWriter(CsvWriter):
    """CSV writer for PPA traces: ``k, x, h, step_norm, fejer_dist``."""

    def __init__(self):
        super().__init__(TRACE_COLUMNS)


class WitnessWriter(CsvWriter):
    """CSV writer for certificate constraint tables."""

    def __init__(self):
        super().__init__(WITNESS_COLUMNS)


def write_trace_csv(trace, target: Target) -> int:
    """Write every row of a `PPATrace`; returns the number of rows."""
    writer = TraceWriter().open(target)
    try:
        for row in trace.rows():
            writer._dump(TraceRowAdapter(*row))
    finally:
        writer.close()
    return writer.rows_written


def write_witness_csv(certificate, target: Target) -> int:
    """Write the constraint rows of an `AlphaCertificate` computed with ``record_rows=True``."""
    writer = WitnessWriter().open(target)
    try:
        for row in certificate.rows:
            writer._dump(WitnessRowAdapter(row))
    finally:
        writer.close()
    return writer.rows_written


def to_json_text(payload: dict, timestamp: bool = True) -> str:
    """Serialise a report deterministically (sorted keys); the only varying field is ``timestamp``."""
    data = dict(_jsonable(payload))
    if timestamp:
        data["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_json(payload: dict, target: Target, timestamp: bool = True):
    text = to_json_text(payload, timestamp)
    if isinstance(target, str):
        with open(target, "w") as f:
            f.write(text)
    else:
        target.write(text)
