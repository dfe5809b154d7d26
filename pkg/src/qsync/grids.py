"""Two-dimensional parameter sweep containers shared by the dynamics modules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import statecore
from .errors import ArgumentError


@dataclass
class SweepGrid:
    """Per-cell indicator layers over a 2D parameter grid.

    ``layers`` maps layer names to arrays of shape (len(values1), len(values2)).
    ``status`` holds per-cell flags ("ok", "degenerate", error text, ...);
    failed cells carry NaN in every layer and the run continues.
    """

    axis1: str
    axis2: str
    values1: np.ndarray
    values2: np.ndarray
    layers: dict
    status: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values1 = np.asarray(self.values1, dtype=float)
        self.values2 = np.asarray(self.values2, dtype=float)
        shape = (self.values1.size, self.values2.size)
        for name, layer in self.layers.items():
            if np.shape(layer) != shape:
                raise ArgumentError(f"layer {name!r} has shape {np.shape(layer)}, want {shape}")
        if np.shape(self.status) != shape:
            raise ArgumentError("status array shape mismatch")

    @classmethod
    def empty(cls, axis1, axis2, values1, values2, layer_names, meta=None):
        values1 = np.asarray(values1, dtype=float)
        values2 = np.asarray(values2, dtype=float)
        shape = (values1.size, values2.size)
        layers = {name: np.full(shape, np.nan) for name in layer_names}
        status = np.full(shape, "pending", dtype=object)
        return cls(axis1, axis2, values1, values2, layers, status, meta or {})

    def set_cell(self, i: int, j: int, values: dict, status: str = "ok") -> None:
        for name, v in values.items():
            self.layers[name][i, j] = v
        self.status[i, j] = status

    def to_csv(self, path) -> None:
        names = list(self.layers)
        header = [self.axis1, self.axis2, *names, "status"]
        rows = []
        for i, v1 in enumerate(self.values1):
            for j, v2 in enumerate(self.values2):
                rows.append(
                    [v1, v2, *(self.layers[k][i, j] for k in names), self.status[i, j]]
                )
        statecore.write_csv(path, header, rows)
