"""
Reporting Module

Renders results for standard output:
- Deterministic JSON (sorted keys, no timestamps)
- CSV through pandas
- LaTeX pmatrix bodies with \\frac entries
- Console tables through tabulate
"""

import json
from fractions import Fraction

import numpy as np
import pandas as pd
from tabulate import tabulate

from .exact_linalg import format_rational


def latex_rational(value):
    """Integers as-is, other rationals as \\frac{p}{q} with a leading minus sign."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    sign = "-" if value < 0 else ""
    return f"{sign}\\frac{{{abs(value.numerator)}}}{{{value.denominator}}}"


def latex_pmatrix(matrix):
    """
    pmatrix environment for an exact matrix, one row per line.

    Example:
        \\begin{pmatrix}
        -1 & 1 \\\\
        1 & -1
        \\end{pmatrix}
    """
    rows = [" & ".join(latex_rational(v) for v in row) for row in matrix.tolist()]
    return "\\begin{pmatrix}\n" + " \\\\\n".join(rows) + "\n\\end{pmatrix}"


def _json_default(value):
    # numpy scalars coming out of DataFrame records
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dumps_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, default=_json_default) + "\n"


def matrix_to_csv(matrix):
    """Rows of "p/q" strings, no header."""
    frame = pd.DataFrame([[format_rational(v) for v in row] for row in matrix.tolist()])
    return frame.to_csv(index=False, header=False)


def frame_to_csv(frame):
    return frame.to_csv(index=False)


def matrix_table(matrix):
    return tabulate([[format_rational(v) for v in row] for row in matrix.tolist()], tablefmt="grid")


def frame_table(frame):
    return tabulate(frame.values.tolist(), headers=list(frame.columns), tablefmt="grid")


def records_table(records, headers):
    return tabulate(records, headers=headers, tablefmt="grid")


def stamp_text(text, fmt, version):
    """Prefix CSV or LaTeX output with a version comment line."""
    marker = "%" if fmt == "latex" else "#"
    return f"{marker} krein_analyzer {version}\n{text}"
