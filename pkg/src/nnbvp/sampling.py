"""Training and test point sets on the unit square."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

TEST_RESOLUTION = 21
RANDOM_GENERATOR = "numpy.random.default_rng (PCG64)"


class GridKind(str, enum.Enum):
    UNIFORM = "uniform"
    BOUNDARY_DENSE = "boundary-dense"
    INTERIOR_DENSE = "interior-dense"
    RANDOM = "random"


@dataclass(frozen=True)
class GridSpec:
    kind: GridKind
    resolution: int
    seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", GridKind(self.kind))
        except ValueError:
            names = ", ".join(k.value for k in GridKind)
            raise ValueError(f"unknown grid kind {self.kind!r}; choose one of {names}") from None
        if int(self.resolution) < 2:
            raise ValueError(f"grid resolution K must be >= 2, got {self.resolution}")
        object.__setattr__(self, "resolution", int(self.resolution))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def size(self) -> int:
        return self.resolution**2

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "resolution": self.resolution, "seed": self.seed}


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray = field(repr=False)  # (K*K, 2)
    spec: GridSpec

    def __len__(self) -> int:
        return self.points.shape[0]


def axis_coordinates(kind, k: int) -> np.ndarray:
    """1-D coordinates used for the tensor-product grids."""
    kind = GridKind(kind)
    t = np.arange(k) / (k - 1)
    if kind is GridKind.UNIFORM:
        return t
    if kind is GridKind.BOUNDARY_DENSE:
        return (1.0 - np.cos(np.pi * t)) / 2.0
    if kind is GridKind.INTERIOR_DENSE:
        return np.arccos(1.0 - 2.0 * t) / np.pi
    raise ValueError("random grids have no axis coordinates")


def _tensor(coords: np.ndarray) -> np.ndarray:
    x1, x2 = np.meshgrid(coords, coords, indexing="ij")
    return np.column_stack([x1.ravel(), x2.ravel()])


def generate(spec: GridSpec) -> PointSet:
    if spec.kind is GridKind.RANDOM:
        rng = np.random.default_rng(spec.seed)
        points = rng.uniform(0.0, 1.0, size=(spec.size, 2))
    else:
        points = _tensor(axis_coordinates(spec.kind, spec.resolution))
    points = np.clip(points, 0.0, 1.0)
    points.setflags(write=False)
    return PointSet(points, spec)


def test_grid() -> PointSet:
    """Uniform 21 x 21 evaluation grid, boundary included."""
    return generate(GridSpec(GridKind.UNIFORM, TEST_RESOLUTION))


test_grid.__test__ = False  # keep pytest from collecting it when imported into tests
