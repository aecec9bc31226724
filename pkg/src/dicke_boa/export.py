"""Atomic CSV export and plot-script emission.

Every CSV carries a header row whose column names include their unit in
brackets. Numbers are written with a fixed format so identical inputs give
byte-identical files.
"""
from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path

import numpy as np


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "nan" if np.isnan(v) else f"{float(v):.12e}"
    return str(v)


def atomic_write(path, text: str) -> Path:
    """Write ``text`` to a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_csv(path, columns, rows) -> Path:
    """``columns`` are (name, unit) pairs; unitless columns use unit "1"."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"{name} [{unit}]" for name, unit in columns])
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("row length does not match the header")
        w.writerow([_fmt(v) for v in row])
    return atomic_write(path, buf.getvalue())


_SCRIPT = '''"""Plot {title} from {csv_name}. Generated file; needs matplotlib."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{csv_name}"
with open(path) as fh:
    rows = list(csv.reader(fh))
head, body = rows[0], rows[1:]
col = {{name: k for k, name in enumerate(head)}}


def values(name):
    out = []
    for r in body:
        try:
            out.append(float(r[col[name]]))
        except ValueError:
            out.append(float("nan"))
    return out


x, y = values("{x}"), values("{y}")
c = values("{c}") if "{c}" else None
plt.scatter(x, y, c=c, s=4)
plt.xlabel("{x}")
plt.ylabel("{y}")
plt.title("{title}")
plt.savefig(path.rsplit(".", 1)[0] + ".pdf")
'''


def write_plot_script(path, csv_name: str, x: str, y: str, color: str = "", title: str = "") -> Path:
    """Emit a standalone scatter-plot script for one CSV (columns by header name)."""
    return atomic_write(path, _SCRIPT.format(csv_name=csv_name, x=x, y=y, c=color, title=title or csv_name))
