"""Ball-model point clouds on disk: binary PLY and CSV."""
import logging
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from hypam.errors import InputError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _vertex_dtype(with_pieces: bool) -> np.dtype:
    fields = [("x", "<f8"), ("y", "<f8"), ("z", "<f8")]
    if with_pieces:
        fields.append(("piece", "<i4"))
    return np.dtype(fields)


def _check_points(points, pieces) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    if pieces is not None:
        pieces = np.asarray(pieces, dtype=np.int32).reshape(-1)
        if len(pieces) != len(points):
            raise InputError(f"{len(pieces)} piece tags for {len(points)} points")
    return points, pieces


def write_ply(path: PathLike, points, pieces=None) -> Path:
    """Binary little-endian PLY with float64 x, y, z and an optional int32 piece tag."""
    points, pieces = _check_points(points, pieces)
    path = Path(path)
    header = ["ply", "format binary_little_endian 1.0", "comment hypam ball-model cloud",
              f"element vertex {len(points)}",
              "property double x", "property double y", "property double z"]
    if pieces is not None:
        header.append("property int piece")
    header.append("end_header")

    rows = np.empty(len(points), dtype=_vertex_dtype(pieces is not None))
    rows["x"], rows["y"], rows["z"] = points.T
    if pieces is not None:
        rows["piece"] = pieces
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(rows.tobytes())
    logger.info("Wrote %d points to %s", len(points), path)
    return path


def read_ply(path: PathLike) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    with open(path, "rb") as fh:
        data = fh.read()
    marker = b"end_header\n"
    end = data.find(marker)
    if not data.startswith(b"ply\n") or end < 0:
        raise InputError(f"{path} is not a PLY file")
    header = data[:end].decode("ascii").splitlines()
    if "format binary_little_endian 1.0" not in header:
        raise InputError(f"{path}: only binary little-endian PLY is supported")
    count = next(int(line.split()[2]) for line in header if line.startswith("element vertex"))
    with_pieces = "property int piece" in header
    rows = np.frombuffer(data[end + len(marker):], dtype=_vertex_dtype(with_pieces), count=count)
    points = np.column_stack([rows["x"], rows["y"], rows["z"]])
    return points, (rows["piece"].astype(np.int32) if with_pieces else None)


def write_csv(path: PathLike, points, pieces=None) -> Path:
    points, pieces = _check_points(points, pieces)
    path = Path(path)
    if pieces is None:
        np.savetxt(path, points, delimiter=",", header="x,y,z", comments="", fmt="%.17g")
    else:
        table = np.column_stack([points, pieces]).astype(object)
        np.savetxt(path, table, delimiter=",", header="x,y,z,piece", comments="",
                   fmt=["%.17g", "%.17g", "%.17g", "%d"])
    logger.info("Wrote %d points to %s", len(points), path)
    return path


def read_csv(path: PathLike) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            columns = fh.readline().strip().split(",")
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise InputError(f"Cannot read a point cloud from {path}: {exc}") from exc
    if table.size == 0:
        return np.zeros((0, 3)), (np.zeros(0, dtype=np.int32) if len(columns) > 3 else None)
    if columns[:3] != ["x", "y", "z"] or table.shape[1] != len(columns):
        raise InputError(f"{path}: expected columns x,y,z[,piece], got {','.join(columns)}")
    pieces = table[:, 3].astype(np.int32) if len(columns) > 3 else None
    return table[:, :3].copy(), pieces


def write_cloud(path: PathLike, points, pieces=None) -> Path:
    """Write by extension: ``.ply`` or ``.csv``."""
    suffix = Path(path).suffix.lower()
    if suffix == ".ply":
        return write_ply(path, points, pieces)
    if suffix == ".csv":
        return write_csv(path, points, pieces)
    raise InputError(f"Unknown cloud format {suffix!r}; use .ply or .csv")


def read_cloud(path: PathLike) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    suffix = Path(path).suffix.lower()
    if suffix == ".ply":
        return read_ply(path)
    if suffix == ".csv":
        return read_csv(path)
    raise InputError(f"Unknown cloud format {suffix!r}; use .ply or .csv")
