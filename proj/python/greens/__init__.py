"""Green's functions of Schroedinger operators with Dirichlet walls."""

from ._greens import *  # noqa: F401,F403
from ._greens import ResultTable, __version__


def table_columns(table: ResultTable) -> dict:
    """Column name -> list of values, complex pairs merged back."""
    cols = {name: [row[i] for row in table.rows] for i, name in enumerate(table.columns)}
    out = {}
    for name, values in cols.items():
        if name.endswith("_im") and name[:-3] + "_re" in cols:
            continue
        if name.endswith("_re") and name[:-3] + "_im" in cols:
            base = name[:-3]
            out[base] = [complex(a, b) for a, b in zip(values, cols[base + "_im"])]
        else:
            out[name] = values
    return out
