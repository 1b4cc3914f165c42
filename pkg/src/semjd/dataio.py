"""CSV input/output for observation paths and selection tables.

Path files carry a header ``t,X1,...,Xp`` followed by rows of the time grid
and observations.  Values are written with 17 significant digits, which
round-trips float64 exactly.
"""

import numpy as np

from .errors import MalformedRow, NonUniformGrid, TooFewRows
from .experiment import CRITERIA, FAILED, SelectionTable
from .likelihood import PathData

GRID_RTOL = 1e-9
FLOAT_FMT = "%.17g"


def write_path_csv(path: PathData, filename: str) -> None:
    """Write a path with its time grid; inverse of :func:`ingest_csv`."""
    t = np.arange(path.x.shape[0]) * path.h
    header = "t," + ",".join(f"X{j + 1}" for j in range(path.p))
    with open(filename, "w") as fh:
        fh.write(header + "\n")
        for i in range(path.x.shape[0]):
            row = [FLOAT_FMT % t[i]] + [FLOAT_FMT % v for v in path.x[i]]
            fh.write(",".join(row) + "\n")


def ingest_csv(filename: str) -> PathData:
    """Read an observation path, inferring the step from the time column.

    Raises :class:`TooFewRows` (need at least two increments),
    :class:`MalformedRow` (arity or parse failure) or
    :class:`NonUniformGrid` (spacing off by more than 1e-9 relative).
    """
    with open(filename) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise TooFewRows(f"{filename}: empty file")
    rows = []
    ncol = None
    for lineno, line in enumerate(lines[1:], start=2):
        fields = [f.strip() for f in line.split(",")]
        if ncol is None:
            ncol = len(fields)
            if ncol < 2:
                raise MalformedRow(f"{filename}:{lineno}: need a time column plus data")
        elif len(fields) != ncol:
            raise MalformedRow(f"{filename}:{lineno}: expected {ncol} fields, got {len(fields)}")
        try:
            rows.append([float(f) for f in fields])
        except ValueError as exc:
            raise MalformedRow(f"{filename}:{lineno}: {exc}") from exc
    if len(rows) < 3:
        raise TooFewRows(f"{filename}: need at least 3 rows (2 increments)")
    data = np.asarray(rows)
    t = data[:, 0]
    dt = np.diff(t)
    if np.any(dt <= 0.0):
        raise NonUniformGrid(f"{filename}: time column must be strictly increasing")
    # endpoint slope is immune to the ulp wobble of consecutive differences
    h = float(t[-1] - t[0]) / (len(t) - 1)
    if np.max(np.abs(dt - h)) > GRID_RTOL * h:
        raise NonUniformGrid(f"{filename}: spacing varies by more than {GRID_RTOL:g} relative")
    return PathData(h, data[:, 1:])


def write_selection_csv(table: SelectionTable, filename: str) -> None:
    """Long-format tally: criterion, n, model, count, fraction."""
    with open(filename, "w") as fh:
        fh.write("criterion,n,model,count,fraction\n")
        for criterion in CRITERIA:
            for n in sorted(table.counts[criterion]):
                for model in table.model_names + [FAILED]:
                    count = table.counts[criterion][n][model]
                    frac = FLOAT_FMT % (count / table.replications)
                    fh.write(f"{criterion},{n},{model},{count},{frac}\n")
