"""Rotated surface code geometry, syndromes and logical parities.

Qubits sit on a d x d grid indexed row-major.  Plaquette ``(i, j)`` with
``i, j`` in ``-1 .. d-1`` covers the grid cells ``(i, j), (i, j+1), (i+1, j),
(i+1, j+1)`` clipped to the lattice.  Plaquettes with ``i + j`` even are
X-type, odd ones are Z-type.  Weight-2 plaquettes on the top and bottom edges
are kept only when X-type, those on the left and right edges only when
Z-type.  Corner plaquettes of weight one are dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

__all__ = [
    "Face",
    "CodeLayout",
    "build_layout",
    "syndrome_of",
    "logical_parity",
    "layout_to_json",
    "layout_from_json",
]


@dataclass(frozen=True)
class Face:
    kind: str
    qubit_indices: frozenset
    anchor: tuple = field(default=(0, 0), compare=False)

    def __post_init__(self):
        if self.kind not in ("X", "Z"):
            raise ValueError(f"face kind must be 'X' or 'Z', got {self.kind!r}")
        if len(self.qubit_indices) not in (2, 4):
            raise ValueError("faces have weight 2 or 4")

    @property
    def weight(self) -> int:
        return len(self.qubit_indices)


@dataclass(frozen=True)
class CodeLayout:
    """Immutable description of one distance-d rotated surface code."""

    distance: int
    qubits: tuple
    z_faces: tuple
    x_faces: tuple
    logical_z: frozenset
    logical_x: frozenset

    @property
    def n(self) -> int:
        return len(self.qubits)

    def faces(self, kind: str) -> tuple:
        return self.z_faces if kind == "Z" else self.x_faces

    def check_matrix(self, kind: str) -> np.ndarray:
        """Face-by-qubit incidence matrix (uint8) for faces of ``kind``."""
        faces = self.faces(kind)
        h = np.zeros((len(faces), self.n), dtype=np.uint8)
        for r, f in enumerate(faces):
            h[r, sorted(f.qubit_indices)] = 1
        return h

    def logical_vector(self, kind: str) -> np.ndarray:
        sup = self.logical_z if kind == "Z" else self.logical_x
        v = np.zeros(self.n, dtype=np.uint8)
        v[sorted(sup)] = 1
        return v

    def index(self, row: int, col: int) -> int:
        return row * self.distance + col


def _plaquette_cells(d: int, i: int, j: int) -> list:
    cells = []
    for r in (i, i + 1):
        for c in (j, j + 1):
            if 0 <= r < d and 0 <= c < d:
                cells.append(r * d + c)
    return cells


def build_layout(d: int) -> CodeLayout:
    """Build the distance-``d`` rotated surface code (``d >= 2``)."""
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ValueError(f"distance must be an integer >= 2, got {d!r}")
    d = int(d)
    x_faces, z_faces = [], []
    for i in range(-1, d):
        for j in range(-1, d):
            cells = _plaquette_cells(d, i, j)
            kind = "X" if (i + j) % 2 == 0 else "Z"
            if len(cells) == 4:
                pass
            elif len(cells) == 2:
                top_bottom = i in (-1, d - 1)
                if top_bottom and kind != "X":
                    continue
                if not top_bottom and kind != "Z":
                    continue
            else:
                continue
            face = Face(kind, frozenset(cells), (i, j))
            (x_faces if kind == "X" else z_faces).append(face)
    qubits = tuple((r, c) for r in range(d) for c in range(d))
    logical_z = frozenset((d - 1) * d + c for c in range(d))
    logical_x = frozenset(r * d for r in range(d))
    return CodeLayout(d, qubits, tuple(z_faces), tuple(x_faces), logical_z, logical_x)


def _as_bits(layout: CodeLayout, error) -> np.ndarray:
    e = np.asarray(error, dtype=np.uint8)
    if e.shape[-1] != layout.n:
        raise ValueError(f"error pattern has length {e.shape[-1]}, expected {layout.n}")
    return e


def syndrome_of(layout: CodeLayout, error, kind: str = "Z") -> np.ndarray:
    """Face parities of an error pattern.

    With ``kind='Z'`` (default) the error is a vector of X flips and the result
    lists the Z-face defects.  Batched inputs of shape ``(shots, n)`` are
    accepted.
    """
    e = _as_bits(layout, error)
    h = layout.check_matrix(kind)
    return (e.astype(np.int64) @ h.T.astype(np.int64) % 2).astype(np.uint8)


def logical_parity(layout: CodeLayout, error, kind: str = "Z"):
    """Parity of the error restricted to the ``kind`` logical support."""
    e = _as_bits(layout, error)
    v = layout.logical_vector(kind)
    out = (e.astype(np.int64) @ v.astype(np.int64)) % 2
    return int(out) if np.ndim(out) == 0 else out.astype(np.uint8)


def layout_to_json(layout: CodeLayout) -> str:
    payload = {
        "distance": layout.distance,
        "qubits": [list(q) for q in layout.qubits],
        "faces": [
            {"kind": f.kind, "indices": sorted(f.qubit_indices), "anchor": list(f.anchor)}
            for f in layout.x_faces + layout.z_faces
        ],
        "logical_z": sorted(layout.logical_z),
        "logical_x": sorted(layout.logical_x),
    }
    return json.dumps(payload, indent=2)


def layout_from_json(text: str) -> CodeLayout:
    data = json.loads(text)
    xs, zs = [], []
    for f in data["faces"]:
        face = Face(f["kind"], frozenset(f["indices"]), tuple(f.get("anchor", (0, 0))))
        (xs if face.kind == "X" else zs).append(face)
    return CodeLayout(
        int(data["distance"]),
        tuple(tuple(q) for q in data["qubits"]),
        tuple(zs),
        tuple(xs),
        frozenset(data["logical_z"]),
        frozenset(data["logical_x"]),
    )


def faces_containing(layout: CodeLayout, kind: str) -> list:
    """For every qubit, the positions (in ``layout.faces(kind)``) of faces touching it."""
    out = [[] for _ in range(layout.n)]
    for k, f in enumerate(layout.faces(kind)):
        for q in f.qubit_indices:
            out[q].append(k)
    return out


def iter_distances(ds: Iterable[int]):
    for d in ds:
        yield build_layout(d)
