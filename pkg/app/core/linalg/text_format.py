"""Plain-text matrix and vector files.

Matrix: ``R C`` header, then R lines of C numbers separated by single spaces.
Vector: ``N`` header, then N lines of one number each. ``\\n`` line endings,
17 significant digits on write.
"""

from pathlib import Path

import numpy as np

from ..errors import DimensionError


def format_real(value: float) -> str:
    return format(float(value), ".17g")


def write_matrix(path: str | Path, matrix) -> None:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {matrix.shape}")
    rows, cols = matrix.shape
    lines = [f"{rows} {cols}"]
    lines.extend(" ".join(format_real(value) for value in row) for row in matrix)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_vector(path: str | Path, vector) -> None:
    vector = np.asarray(vector, dtype=np.float64).ravel()
    lines = [str(vector.shape[0])]
    lines.extend(format_real(value) for value in vector)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _parse_real(token: str, path, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise DimensionError(f"{path}:{line_no}: not a number: {token!r}") from None
    if not np.isfinite(value):
        raise DimensionError(f"{path}:{line_no}: non-finite entry {token!r}")
    return value


def _parse_count(token: str, path) -> int:
    try:
        count = int(token)
    except ValueError:
        raise DimensionError(f"{path}:1: bad header token {token!r}") from None
    if count < 0:
        raise DimensionError(f"{path}:1: negative size {count}")
    return count


def read_matrix(path: str | Path) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DimensionError(f"{path}: empty matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise DimensionError(f"{path}:1: expected 'R C' header, got {lines[0]!r}")
    rows, cols = (_parse_count(token, path) for token in header)
    body = lines[1 : 1 + rows]
    if len(body) != rows:
        raise DimensionError(f"{path}: expected {rows} rows, found {len(body)}")
    matrix = np.empty((rows, cols))
    for i, line in enumerate(body):
        tokens = line.split()
        if len(tokens) != cols:
            raise DimensionError(f"{path}:{i + 2}: expected {cols} entries, found {len(tokens)}")
        matrix[i] = [_parse_real(token, path, i + 2) for token in tokens]
    return matrix


def read_vector(path: str | Path) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DimensionError(f"{path}: empty vector file")
    size = _parse_count(lines[0].strip(), path)
    body = lines[1 : 1 + size]
    if len(body) != size:
        raise DimensionError(f"{path}: expected {size} entries, found {len(body)}")
    return np.array([_parse_real(line.strip(), path, i + 2) for i, line in enumerate(body)], dtype=np.float64)
