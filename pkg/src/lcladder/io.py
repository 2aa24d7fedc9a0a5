"""CSV/JSON serialisation with fixed number formatting.

``standard`` precision writes 6 significant digits, ``exact`` writes 17 so a
value re-parsed with ``float`` re-serialises to identical bytes.
"""
from __future__ import annotations

import csv
import json
import math
from typing import Iterable, TextIO

import numpy as np

PRECISIONS = {"standard": 6, "exact": 17}

TRACE_COLUMNS = ["n", "p_re", "p_im", "c_re", "c_im", "abs_err"]
SECTION_COLUMNS = ["t", "v_re", "v_im", "envelope"]
SWEEP_COLUMNS = ["omega", "regime", "A", "z_re", "z_im", "zlim_re", "zlim_im",
                 "gamma_abs", "delta", "group_delay"]


def fmt(x, precision: str = "standard") -> str:
    """Lowercase scientific notation with the requested significant digits."""
    digits = PRECISIONS[precision]
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, f".{digits - 1}e")


def rounded(x, precision: str = "standard"):
    """Round a float (or nested containers of floats) through :func:`fmt`."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if not math.isfinite(x) else float(fmt(x, precision))
    if isinstance(x, complex):
        return [rounded(x.real, precision), rounded(x.imag, precision)]
    if isinstance(x, dict):
        return {k: rounded(v, precision) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [rounded(v, precision) for v in x]
    return x


def dump_json(obj, fh: TextIO, precision: str = "standard"):
    json.dump(rounded(obj, precision), fh, indent=2)
    fh.write("\n")


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_csv(fh: TextIO, header: list[str], rows: Iterable[Iterable]):
    w = _writer(fh)
    w.writerow(header)
    for row in rows:
        w.writerow(row)


def trace_rows(trace, precision: str = "standard"):
    """CSV rows ``n, p_re, p_im, c_re, c_im, abs_err`` of an :class:`IterationTrace`."""
    for n, p, c, err in trace.rows():
        yield [str(n), fmt(p.real, precision), fmt(p.imag, precision),
               fmt(c.real, precision), fmt(c.imag, precision), fmt(err, precision)]


def write_trace_csv(trace, fh: TextIO, precision: str = "standard"):
    write_csv(fh, TRACE_COLUMNS, trace_rows(trace, precision))


def section_rows(section_trace, precision: str = "standard", with_section: bool = False):
    prefix = [str(section_trace.section)] if with_section else []
    for t, v, e in zip(section_trace.times, section_trace.voltage, section_trace.envelope):
        yield prefix + [fmt(t, precision), fmt(v.real, precision), fmt(v.imag, precision), fmt(e, precision)]


def write_sections_csv(traces, fh: TextIO, precision: str = "standard"):
    """Long format: one row per (section, t)."""
    w = _writer(fh)
    w.writerow(["section"] + SECTION_COLUMNS)
    for tr in traces:
        for row in section_rows(tr, precision, with_section=True):
            w.writerow(row)


def write_section_csv(trace, fh: TextIO, precision: str = "standard"):
    write_csv(fh, SECTION_COLUMNS, section_rows(trace, precision))


def read_csv(fh: TextIO):
    """Header and rows as lists of strings."""
    rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def reserialize_csv(text: str, precision: str = "exact") -> str:
    """Parse numeric cells with ``float`` and format them again.

    Integer-looking cells (``n``, ``section``) and labels pass through.
    """
    import io as _io

    header, rows = read_csv(_io.StringIO(text))
    out = _io.StringIO()
    w = _writer(out)
    w.writerow(header)
    for row in rows:
        cells = []
        for cell in row:
            if cell == "" or cell.lstrip("-").isdigit():
                cells.append(cell)
                continue
            try:
                cells.append(fmt(float(cell), precision))
            except ValueError:
                cells.append(cell)
        w.writerow(cells)
    return out.getvalue()
