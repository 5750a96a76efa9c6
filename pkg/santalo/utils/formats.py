"""Plain-text formats for polytopes and lattice functions.

V-polytope: header ``n m`` then ``m`` vertex rows; the negation closure may be
stored half and is completed on load. H-polytope: header ``n m`` then rows
``a_1 ... a_n b``. Lattice function: header ``n L h`` then the values in
row-major lattice order, whitespace separated.
"""

from pathlib import Path

import numpy as np

from santalo.errors import DomainError


def _rows(text: str) -> list[list[float]]:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append([float(tok) for tok in line.split()])
    if not rows:
        raise DomainError("empty file")
    return rows


def _header(rows: list[list[float]], width: int) -> list[float]:
    head = rows[0]
    if len(head) != width:
        raise DomainError(f"header must have {width} fields, got {len(head)}")
    return head


def parse_vertices(text: str) -> np.ndarray:
    rows = _rows(text)
    n, m = (int(v) for v in _header(rows, 2))
    body = np.asarray(rows[1:], dtype=float)
    if body.shape != (m, n):
        raise DomainError(f"expected {m} rows of {n} coordinates, got {body.shape}")
    return body


def parse_halfspaces(text: str) -> tuple[np.ndarray, np.ndarray]:
    rows = _rows(text)
    n, m = (int(v) for v in _header(rows, 2))
    body = np.asarray(rows[1:], dtype=float)
    if body.shape != (m, n + 1):
        raise DomainError(f"expected {m} rows of {n + 1} numbers, got {body.shape}")
    return body[:, :n], body[:, n]


def parse_grid(text: str) -> tuple[int, float, float, np.ndarray]:
    rows = _rows(text)
    n_raw, L, h = _header(rows, 3)
    n = int(n_raw)
    values = np.asarray([v for row in rows[1:] for v in row], dtype=float)
    side = int(round(2 * L / h)) + 1
    if values.size != side**n:
        raise DomainError(f"expected {side}^{n} lattice values, got {values.size}")
    return n, L, h, values.reshape((side,) * n)


def format_vertices(vertices: np.ndarray) -> str:
    m, n = vertices.shape
    lines = [f"{n} {m}"] + [" ".join(repr(float(x)) for x in row) for row in vertices]
    return "\n".join(lines) + "\n"


def format_halfspaces(A: np.ndarray, b: np.ndarray) -> str:
    m, n = A.shape
    lines = [f"{n} {m}"] + [
        " ".join(repr(float(x)) for x in (*row, rhs)) for row, rhs in zip(A, b, strict=True)
    ]
    return "\n".join(lines) + "\n"


def format_grid(n: int, L: float, h: float, values: np.ndarray) -> str:
    flat = " ".join(repr(float(v)) for v in np.ravel(values, order="C"))
    return f"{n} {L!r} {h!r}\n{flat}\n"


def read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
