"""Shift / rotation / shuffle data: generation, text files, loading.

File layout follows the CEC distributions: whitespace-separated decimal text,
shift vectors one per line, rotation matrices as stacked row-major ``D x D``
blocks, shuffles as 1-based permutations.  Files are named per function id of
this benchmark and per dimension::

    shift_data_<F>_D<D>.txt     M_<F>_D<D>.txt     shuffle_data_<F>_D<D>.txt

A dimension-free ``shift_data_<F>.txt`` is also accepted, as in CEC; shift
lines longer than ``D`` are truncated to their first ``D`` values.
"""
from __future__ import annotations

import os
import warnings
from pathlib import Path

import numpy as np

from ..core import ConfigurationError
from .catalog import TransformData, catalog_entry, chunk_sizes

SHIFT_RANGE = 80.0
ORTHO_WARN_TOL = 1e-6


class DataError(Exception):
    """A transform-data file is missing, malformed or has the wrong shape."""


class OrthogonalityWarning(UserWarning):
    pass


def _n_transforms(function_id: int) -> int:
    e = catalog_entry(function_id)
    return e.n_components if e.kind == "composition" else 1


def file_names(function_id: int, D: int) -> dict[str, str]:
    names = {"shift": f"shift_data_{function_id}_D{D}.txt", "rotation": f"M_{function_id}_D{D}.txt"}
    if catalog_entry(function_id).kind == "hybrid":
        names["shuffle"] = f"shuffle_data_{function_id}_D{D}.txt"
    return names


def random_rotation(rng: np.random.Generator, D: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-corrected)."""
    q, r = np.linalg.qr(rng.standard_normal((D, D)))
    return q * np.sign(np.diag(r))


def generate_transform_data(seed: int, function_id: int, D: int) -> TransformData:
    """Transform data fully determined by ``(seed, function_id, D)``."""
    if D < 2:
        raise ConfigurationError("dimension must be at least 2")
    e = catalog_entry(function_id)
    if e.kind == "hybrid":
        chunk_sizes(e.proportions, D)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(function_id), int(D)]))
    n = _n_transforms(function_id)
    shifts = rng.uniform(-SHIFT_RANGE, SHIFT_RANGE, size=(n, D))
    rotations = np.stack([random_rotation(rng, D) for _ in range(n)])
    perm = rng.permutation(D) if e.kind == "hybrid" else None
    return TransformData(shifts, rotations, perm, source="generated")


def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def write_transform_data(out_dir, function_id: int, data: TransformData) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = file_names(function_id, data.D)
    written = []
    path = out_dir / names["shift"]
    path.write_text("".join(_fmt(row) + "\n" for row in data.shifts))
    written.append(path)
    path = out_dir / names["rotation"]
    path.write_text("".join(_fmt(row) + "\n" for m in data.rotations for row in m))
    written.append(path)
    if "shuffle" in names:
        path = out_dir / names["shuffle"]
        path.write_text(" ".join(str(int(i) + 1) for i in data.permutation) + "\n")
        written.append(path)
    return written


def _rows(path: Path, parse):
    """Yield (line_number, values) for every non-blank line."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"{path}: cannot read ({exc})") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        try:
            yield lineno, [parse(t) for t in tokens]
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc


def load_shifts(path, n: int, D: int) -> np.ndarray:
    path = Path(path)
    rows = []
    for lineno, values in _rows(path, float):
        if len(values) < D:
            raise DataError(f"{path}:{lineno}: expected {D} values, found {len(values)}")
        rows.append(values[:D])
        if len(rows) == n:
            break
    if len(rows) < n:
        raise DataError(f"{path}: expected {n} shift vector(s), found {len(rows)}")
    return np.array(rows, dtype=np.float64)


def load_rotations(path, n: int, D: int) -> np.ndarray:
    path = Path(path)
    rows = []
    for lineno, values in _rows(path, float):
        if len(values) != D:
            raise DataError(f"{path}:{lineno}: expected {D} values per matrix row, found {len(values)}")
        rows.append(values)
        if len(rows) == n * D:
            break
    if len(rows) < n * D:
        raise DataError(f"{path}: expected {n} matrix block(s) of {D} rows, found {len(rows)} rows")
    mats = np.array(rows, dtype=np.float64).reshape(n, D, D)
    for k, m in enumerate(mats):
        err = np.max(np.abs(m @ m.T - np.eye(D)))
        if err > ORTHO_WARN_TOL:
            warnings.warn(
                f"{path}: matrix {k} deviates from orthogonality by {err:.2e}; accepted as stored",
                OrthogonalityWarning,
                stacklevel=2,
            )
    return mats


def load_permutation(path, D: int) -> np.ndarray:
    path = Path(path)
    values = []
    last_line = 0
    for lineno, row in _rows(path, int):
        values.extend(row)
        last_line = lineno
    if len(values) != D:
        raise DataError(f"{path}:{last_line}: expected a permutation of length {D}, found {len(values)} entries")
    perm = np.array(values, dtype=np.int64) - 1
    if not np.array_equal(np.sort(perm), np.arange(D)):
        raise DataError(f"{path}:{last_line}: not a permutation of 1..{D}")
    return perm


def missing_files(data_dir, function_id: int, D: int) -> list[Path]:
    data_dir = Path(data_dir)
    missing = []
    for kind, name in file_names(function_id, D).items():
        path = data_dir / name
        if kind == "shift" and not path.exists():
            alt = data_dir / f"shift_data_{function_id}.txt"
            if alt.exists():
                continue
        if not path.exists():
            missing.append(path)
    return missing


def load_transform_data(data_dir, function_id: int, D: int) -> TransformData:
    data_dir = Path(data_dir)
    gone = missing_files(data_dir, function_id, D)
    if gone:
        raise DataError("missing transform data: " + ", ".join(str(p) for p in gone))
    names = file_names(function_id, D)
    shift_path = data_dir / names["shift"]
    if not shift_path.exists():
        shift_path = data_dir / f"shift_data_{function_id}.txt"
    n = _n_transforms(function_id)
    shifts = load_shifts(shift_path, n, D)
    rotations = load_rotations(data_dir / names["rotation"], n, D)
    perm = load_permutation(data_dir / names["shuffle"], D) if "shuffle" in names else None
    return TransformData(shifts, rotations, perm, source="file")


def default_data_dir():
    """Directory named by ``DEBENCH_DATA_DIR``, if set."""
    value = os.environ.get("DEBENCH_DATA_DIR")
    return Path(value) if value else None
