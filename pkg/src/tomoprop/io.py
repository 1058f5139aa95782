"""File formats: CSV payloads with JSON metadata sidecars.

All writers go through a temp-file-plus-rename so a crashed run never
leaves a half-written file, and all floats are printed with 17
significant digits so identical configurations give byte-identical
output.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .grids import UniformGrid
from .states import DensityMatrix
from .tomography import CONVENTION_VERSION, Tomogram, angle_grid

_FMT = "%.17g"


def _fmt(value: float) -> str:
    return _FMT % float(value)


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write text to path via a sibling temp file and an atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header: list[str], rows) -> str:
    import io as _io

    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def meta_path_for(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def write_metadata(path: str | Path, meta: dict) -> None:
    payload = dict(meta)
    payload.setdefault("convention_version", CONVENTION_VERSION)
    atomic_write_text(meta_path_for(path), json.dumps(payload, indent=2, sort_keys=True) + "\n")


# --- tomograms ---------------------------------------------------------------


def write_tomogram(path: str | Path, tomo: Tomogram, meta: dict | None = None) -> None:
    """Tomogram CSV: header X,theta,w; theta outer, X inner, row major."""
    x = tomo.x_grid.points
    theta = tomo.theta_grid.points
    rows = []
    for j, th in enumerate(theta):
        for i, xi in enumerate(x):
            rows.append((_fmt(xi), _fmt(th), _fmt(tomo.values[j, i])))
    atomic_write_text(path, _csv_text(["X", "theta", "w"], rows))
    payload = dict(meta or {})
    payload.update(
        {
            "x_grid": {"lower": tomo.x_grid.lower, "upper": tomo.x_grid.upper, "count": tomo.x_grid.count},
            "theta_count": tomo.theta_grid.count,
        }
    )
    write_metadata(path, payload)


def read_tomogram(path: str | Path) -> Tomogram:
    path = Path(path)
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != ["X", "theta", "w"]:
            raise InvalidInputError(f"not a tomogram file (header {header}): {path}")
        data = np.array([[float(c) for c in row] for row in reader])
    if data.size == 0:
        raise InvalidInputError(f"empty tomogram file: {path}")
    x_unique = np.unique(data[:, 0])
    theta_unique = np.unique(data[:, 1])
    n_x, n_theta = x_unique.size, theta_unique.size
    if n_x * n_theta != data.shape[0]:
        raise InvalidInputError(f"tomogram file is not a complete lattice: {path}")
    values = data[:, 2].reshape(n_theta, n_x)
    x_grid = UniformGrid(float(x_unique[0]), float(x_unique[-1]), n_x)
    meta = {}
    mp = meta_path_for(path)
    if mp.exists():
        meta = json.loads(mp.read_text())
    return Tomogram(
        x_grid=x_grid,
        theta_grid=angle_grid(n_theta),
        values=values,
        meta=dict(meta, negative_tol=1e-9),
    )


# --- kernel scans ------------------------------------------------------------


def write_kernel_scan(path: str | Path, rows, meta: dict | None = None) -> None:
    """Kernel scan CSV: one row (k, mu, nu, mu_p, nu_p, t, eps, value) per query."""
    out = []
    for k, mu, nu, mu_p, nu_p, t, eps, value in rows:
        out.append(
            tuple(_fmt(v) for v in (k, mu, nu, mu_p, nu_p, t, eps, value.real, value.imag))
        )
    atomic_write_text(path, _csv_text(["k", "mu", "nu", "mu_p", "nu_p", "t", "eps", "re", "im"], out))
    write_metadata(path, meta or {})


# --- optical tomograms -------------------------------------------------------


def write_optical(path: str | Path, x: np.ndarray, phi: np.ndarray, values: np.ndarray, meta: dict | None = None) -> None:
    """Optical tomogram CSV: header X,phi,w; phi outer, X inner."""
    rows = []
    for j, ph in enumerate(np.atleast_1d(phi)):
        for i, xi in enumerate(x):
            rows.append((_fmt(xi), _fmt(ph), _fmt(values[j, i])))
    atomic_write_text(path, _csv_text(["X", "phi", "w"], rows))
    write_metadata(path, meta or {})


# --- Green-function grids ----------------------------------------------------


def write_green_grid(path: str | Path, x: np.ndarray, y: np.ndarray, t: float, values: np.ndarray, meta: dict | None = None) -> None:
    """Propagator grid CSV: header x,y,t,re,im; x outer, y inner."""
    rows = []
    for i, xi in enumerate(x):
        for j, yj in enumerate(y):
            rows.append(
                (_fmt(xi), _fmt(yj), _fmt(t), _fmt(values[i, j].real), _fmt(values[i, j].imag))
            )
    atomic_write_text(path, _csv_text(["x", "y", "t", "re", "im"], rows))
    write_metadata(path, meta or {})


def read_grid_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Generic reader returning (header, float matrix) for any CSV payload."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        data = np.array([[float(c) for c in row] for row in reader])
    return header, data


# --- density matrices --------------------------------------------------------


def write_density(path_base: str | Path, rho: DensityMatrix, meta: dict | None = None) -> tuple[Path, Path]:
    """Write a density matrix as a real/imag CSV pair plus a report sidecar.

    path_base "rho.csv" becomes rho.real.csv and rho.imag.csv; each file is
    a bare matrix with a one-line `# x: lower upper count` comment header.
    """
    base = Path(path_base)
    stem = base.name[:-4] if base.name.endswith(".csv") else base.name
    grid_line = f"# x: {_fmt(rho.grid.lower)} {_fmt(rho.grid.upper)} {rho.grid.count}\n"
    paths = []
    for tag, part in (("real", rho.values.real), ("imag", rho.values.imag)):
        target = base.with_name(f"{stem}.{tag}.csv")
        body = "\n".join(",".join(_fmt(v) for v in row) for row in part)
        atomic_write_text(target, grid_line + body + "\n")
        paths.append(target)
    payload = dict(meta or {})
    payload.update(
        {
            "trace": rho.trace(),
            "hermiticity_defect": rho.hermiticity_defect(),
            "grid": {"lower": rho.grid.lower, "upper": rho.grid.upper, "count": rho.grid.count},
        }
    )
    write_metadata(paths[0], payload)
    return paths[0], paths[1]


def read_density(path_real: str | Path) -> DensityMatrix:
    path_real = Path(path_real)
    path_imag = path_real.with_name(path_real.name.replace(".real.", ".imag."))

    def load(path):
        lines = Path(path).read_text().splitlines()
        if not lines or not lines[0].startswith("# x:"):
            raise InvalidInputError(f"missing grid header in {path}")
        lower, upper, count = lines[0][4:].split()
        grid = UniformGrid(float(lower), float(upper), int(count))
        matrix = np.array([[float(c) for c in row.split(",")] for row in lines[1:]])
        return grid, matrix

    grid, real = load(path_real)
    _, imag = load(path_imag)
    return DensityMatrix(grid=grid, values=real + 1j * imag)
