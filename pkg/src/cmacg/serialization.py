"""File formats for the command-line tools.

Complex CSV layout: an m-by-r complex matrix serializes as m rows of 2r
columns, column pairs ordered (Re, Im) per matrix column.  Stacked draws
prepend a ``draw_index`` column repeated on each of the draw's m rows.
Floats are written with 17 significant digits, which round-trips IEEE
doubles exactly.

JSON layout: a draw is an m-by-r nesting of two-element [re, im] lists,
row-major; files hold {"draws": [...]} or {"log_densities": [...]} or
{"matrix": [...]}.

Every metadata sidecar carries at least the effective seed, dimensions,
draw count, a checksum of the canonical serialization of the parameter
matrix, and the tool version, so a published result is reproducible from
the sidecar alone.  Output files are written atomically.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

import numpy as np

from .errors import ValidationError


def format_float(x: float) -> str:
    return f"{x:.17g}"


def matrix_to_csv(mat: np.ndarray) -> str:
    """Single complex matrix as headerless CSV, one text row per matrix row."""
    mat = np.asarray(mat, dtype=np.complex128)
    lines = []
    for row in mat:
        cells = []
        for value in row:
            cells.append(format_float(value.real))
            cells.append(format_float(value.imag))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _parse_csv_rows(text: str, path_hint: str) -> list[list[float]]:
    rows = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([float(cell) for cell in line.split(",")])
        except ValueError as exc:
            raise ValidationError(f"{path_hint}: line {line_no} is not numeric: {exc}") from exc
    if not rows:
        raise ValidationError(f"{path_hint}: no data rows")
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise ValidationError(f"{path_hint}: ragged rows with widths {sorted(widths)}")
    return rows


def matrix_from_csv(text: str, path_hint: str = "matrix file") -> np.ndarray:
    """Parse a single complex matrix from headerless (Re, Im)-pair CSV."""
    rows = _parse_csv_rows(text, path_hint)
    width = len(rows[0])
    if width % 2 != 0:
        raise ValidationError(
            f"{path_hint}: expected an even column count of (Re, Im) pairs, got {width}"
        )
    data = np.asarray(rows, dtype=float)
    return data[:, 0::2] + 1j * data[:, 1::2]


def draws_to_csv(draws: np.ndarray) -> str:
    """Stacked draws (n, m, r) as CSV with a leading draw_index column."""
    draws = np.asarray(draws, dtype=np.complex128)
    lines = []
    for index, mat in enumerate(draws):
        for row in mat:
            cells = [str(index)]
            for value in row:
                cells.append(format_float(value.real))
                cells.append(format_float(value.imag))
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def draws_from_csv(text: str, path_hint: str = "draws file") -> np.ndarray:
    """Parse stacked draws back into an (n, m, r) complex array."""
    rows = _parse_csv_rows(text, path_hint)
    width = len(rows[0])
    if width < 3 or (width - 1) % 2 != 0:
        raise ValidationError(
            f"{path_hint}: expected draw_index plus (Re, Im) pairs, got {width} columns"
        )
    data = np.asarray(rows, dtype=float)
    indices = data[:, 0]
    if not np.all(indices == np.round(indices)):
        raise ValidationError(f"{path_hint}: draw_index column is not integral")
    indices = indices.astype(int)
    boundaries = np.flatnonzero(np.diff(indices)) + 1
    blocks = np.split(data[:, 1:], boundaries)
    expected = np.arange(len(blocks))
    starts = np.concatenate([[0], boundaries])
    if not np.array_equal(indices[starts], expected):
        raise ValidationError(
            f"{path_hint}: draw_index must run 0..n-1 in contiguous blocks"
        )
    rows_per_draw = {block.shape[0] for block in blocks}
    if len(rows_per_draw) != 1:
        raise ValidationError(f"{path_hint}: draws have inconsistent row counts")
    stacked = np.stack(blocks)
    return stacked[:, :, 0::2] + 1j * stacked[:, :, 1::2]


def _complex_to_pairs(mat: np.ndarray) -> list:
    return [[[value.real, value.imag] for value in row] for row in np.asarray(mat)]


def _pairs_to_complex(nested, path_hint: str) -> np.ndarray:
    arr = np.asarray(nested, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValidationError(
            f"{path_hint}: expected rows of [re, im] pairs, got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def dump_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def draws_to_json(draws: np.ndarray) -> str:
    return dump_json({"draws": [_complex_to_pairs(mat) for mat in np.asarray(draws)]})


def draws_from_json(text: str, path_hint: str = "draws file") -> np.ndarray:
    try:
        payload = json.loads(text)
        nested = payload["draws"]
    except (json.JSONDecodeError, TypeError, KeyError) as exc:
        raise ValidationError(f"{path_hint}: not a draws JSON document: {exc}") from exc
    if not nested:
        raise ValidationError(f"{path_hint}: empty draws list")
    return np.stack([_pairs_to_complex(mat, path_hint) for mat in nested])


def matrix_to_json(mat: np.ndarray) -> str:
    return dump_json({"matrix": _complex_to_pairs(mat)})


def values_to_csv(values) -> str:
    lines = [f"{index},{format_float(float(v))}" for index, v in enumerate(values)]
    return "\n".join(lines) + "\n"


def values_to_json(values) -> str:
    return dump_json({"log_densities": [float(v) for v in values]})


def param_checksum(mat: np.ndarray) -> str:
    """SHA-256 of the canonical CSV serialization of a parameter matrix."""
    return hashlib.sha256(matrix_to_csv(mat).encode("ascii")).hexdigest()


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def sidecar_path(output_path: str) -> str:
    return output_path + ".meta.json"


def write_sidecar(output_path: str, metadata: dict) -> str:
    path = sidecar_path(output_path)
    write_atomic(path, dump_json(metadata))
    return path
