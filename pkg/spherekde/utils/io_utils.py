# spherekde/utils/io_utils.py
# Point-file parsing and atomic file output.

import logging
import os
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

from spherekde.errors import InputFormatError
from spherekde.estimator import Sample
from spherekde.geometry import spherical_to_cartesian

logger = logging.getLogger(__name__)


def _read_cells(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(
            path,
            header=None,
            dtype=str,
            skip_blank_lines=False,
            keep_default_na=False,
            skipinitialspace=True,
        )
    except FileNotFoundError:
        raise InputFormatError(f"{path}: no such file")
    except pd.errors.EmptyDataError:
        raise InputFormatError(f"{path}: file is empty")
    except pd.errors.ParserError as e:
        raise InputFormatError(f"{path}: inconsistent column count ({e})")


def read_points(path, spherical: bool = False) -> np.ndarray:
    """Raw coordinates from a CSV point file, one point per line, optional header.

    With `spherical`, each row is (theta, phi) in radians, theta the colatitude.
    """
    path = Path(path)
    cells = _read_cells(path)
    cells = cells.fillna("")
    blank = (cells.apply(lambda col: col.str.strip()) == "").all(axis=1)
    numeric = cells.apply(pd.to_numeric, errors="coerce")

    keep = []
    for i in range(len(cells)):
        if blank.iloc[i]:
            continue
        row = numeric.iloc[i]
        if row.notna().all():
            keep.append(i)
            continue
        if i == 0 and row.isna().all():
            logger.debug("%s: treating the first line as a header", path)
            continue
        raw = ",".join(cells.iloc[i].tolist())
        raise InputFormatError(f"{path}: line {i + 1}: could not parse {raw!r} as numbers")

    if not keep:
        raise InputFormatError(f"{path}: no points found")
    values = numeric.iloc[keep].to_numpy(dtype=float)

    if spherical:
        if values.shape[1] != 2:
            raise InputFormatError(f"{path}: --spherical expects 2 columns (theta, phi), got {values.shape[1]}")
        return spherical_to_cartesian(values[:, 0], values[:, 1])
    if values.shape[1] < 3:
        raise InputFormatError(f"{path}: points need d >= 3 columns, got {values.shape[1]}")
    return values


def read_point_file(path, spherical: bool = False, with_cache: bool = True) -> Sample:
    points = read_points(path, spherical)
    logger.info("📥 Read %d points (d=%d) from %s", points.shape[0], points.shape[1], path)
    return Sample.from_points(points, with_cache=with_cache)


def write_text_atomic(path, text: str) -> Path:
    """Write to a temporary file beside `path`, then rename over it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        "w", dir=path.parent, prefix=f".{path.name}.", suffix=".tmp", delete=False, encoding="utf-8"
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, path)
    except BaseException:
        Path(handle.name).unlink(missing_ok=True)
        raise
    return path


def write_frame_atomic(path, frame: pd.DataFrame, float_format: str | None = None) -> Path:
    return write_text_atomic(path, frame.to_csv(index=False, float_format=float_format, lineterminator="\n"))


def write_point_file(path, sample: Sample) -> Path:
    columns = ["x", "y", "z"] if sample.d == 3 else [f"x{k + 1}" for k in range(sample.d)]
    frame = pd.DataFrame(np.asarray(sample.points), columns=columns)
    return write_frame_atomic(path, frame, float_format="%.17g")
