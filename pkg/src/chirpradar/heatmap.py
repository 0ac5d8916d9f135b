"""Heatmap CSV tables and dependency-free SVG rendering."""

from __future__ import annotations

import csv

import numpy as np

HEATMAP_COLUMNS = ("tau", "omega", "re", "im", "abs")


def write_heatmap_csv(path, A) -> None:
    """One row per (tau, omega) cell; floats written with repr so they read back exactly."""
    A = np.asarray(A, dtype=complex)
    mag = np.abs(A)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HEATMAP_COLUMNS)
        for t in range(A.shape[0]):
            for o in range(A.shape[1]):
                v = A[t, o]
                w.writerow([t, o, repr(float(v.real)), repr(float(v.imag)), repr(float(mag[t, o]))])


def read_heatmap_csv(path, column: str = "abs") -> np.ndarray:
    """Read one column of a heatmap CSV back into a (tau, omega) matrix."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    n_t = 1 + max(int(r["tau"]) for r in rows)
    n_o = 1 + max(int(r["omega"]) for r in rows)
    out = np.zeros((n_t, n_o))
    for r in rows:
        out[int(r["tau"]), int(r["omega"])] = float(r[column])
    return out


def render_svg(values, cell: int = 3, title: str = "") -> str:
    """Grayscale heatmap, white = minimum, black = maximum.

    ``values[tau, omega]`` is drawn with tau along x and omega upward.  Equal
    neighbouring cells in a row are merged into one rect.
    """
    v = np.asarray(values, dtype=float)
    n_t, n_o = v.shape
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo if hi > lo else 1.0
    level = np.rint(255 * (1 - (v - lo) / span)).astype(int)
    W, H = n_t * cell, n_o * cell
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" shape-rendering="crispEdges">'
    ]
    if title:
        out.append(f"<title>{title}</title>")
    for o in range(n_o):
        y = (n_o - 1 - o) * cell
        t = 0
        while t < n_t:
            g = level[t, o]
            run = 1
            while t + run < n_t and level[t + run, o] == g:
                run += 1
            out.append(
                f'<rect x="{t * cell}" y="{y}" width="{run * cell}" height="{cell}" '
                f'fill="rgb({g},{g},{g})"/>'
            )
            t += run
    out.append("</svg>")
    return "\n".join(out) + "\n"
