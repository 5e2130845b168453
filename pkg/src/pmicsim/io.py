"""File emitters: CSV density slices and 16-bit binary PGM carpets."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import PmicError, ValidationError
from .propagator import DensityField

PGM_MAX = 65535


class OutputError(PmicError, OSError):
    """An output file could not be written."""


def _open_for_write(path, mode):
    try:
        return open(path, mode, **({"newline": ""} if "b" not in mode else {}))
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_csv_slice(path, y, density) -> None:
    """``y,density`` header, one row per sample, 15 significant digits, LF endings."""
    y = np.asarray(y, dtype=float)
    density = np.asarray(density, dtype=float)
    if y.shape != density.shape or y.ndim != 1:
        raise ValidationError("y and density must be vectors of equal length")
    with _open_for_write(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y", "density"])
        for a, b in zip(y, density):
            w.writerow([f"{a:.15g}", f"{b:.15g}"])


def read_csv_slice(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


def pgm_bytes(values) -> bytes:
    """Encode a nonnegative matrix as a P5 image with 16-bit big-endian samples."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 2 or v.size == 0:
        raise ValidationError("PGM needs a non-empty 2-D field")
    peak = float(v.max())
    if not peak > 0:
        raise ValidationError("field is identically zero; cannot normalise")
    pix = np.floor(v / peak * PGM_MAX + 0.5).clip(0, PGM_MAX).astype(">u2")
    height, width = v.shape
    header = f"P5\n# max={peak!r}\n{width} {height}\n{PGM_MAX}\n".encode("ascii")
    return header + pix.tobytes()


def write_pgm_carpet(path, field: DensityField | np.ndarray) -> None:
    """Width = y samples, height = t samples, first row = earliest time."""
    values = field.values if isinstance(field, DensityField) else field
    data = pgm_bytes(values)
    with _open_for_write(path, "wb") as fh:
        fh.write(data)


def read_pgm(path) -> tuple[np.ndarray, float]:
    """Pixels and the recorded peak density of a file written by ``write_pgm_carpet``."""
    raw = Path(path).read_bytes()
    lines = raw.split(b"\n", 4)
    if lines[0] != b"P5":
        raise ValidationError("not a binary PGM")
    peak = float(lines[1].split(b"=", 1)[1])
    width, height = (int(x) for x in lines[2].split())
    pix = np.frombuffer(lines[4], dtype=">u2").reshape(height, width)
    return pix, peak
