# models/graph.py
"""
Factor Graph Models
Assessment factors, the directed influence graph over them and its boolean matrix form.
"""
from enum import Enum
from typing import FrozenSet, Iterable, List, Sequence, Set, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from models.errors import MatrixShapeError, UnknownFactorError


class FactorKind(str, Enum):
    ROOT = "Root"
    INDEPENDENT = "Independent"
    DEPENDENT = "Dependent"


class Factor(BaseModel):
    """One node of the influence graph"""
    id: str = Field(..., min_length=1, pattern=r"^\S+$")
    name: str
    kind: FactorKind

    class Config:
        frozen = True


Edge = Tuple[str, str]


class FactorGraph(BaseModel):
    """
    Directed influence graph.
    Factor order is fixed at construction and defines matrix row/column order.
    """
    factors: Tuple[Factor, ...] = ()
    edges: FrozenSet[Edge] = frozenset()

    @field_validator('edges', mode='before')
    @classmethod
    def reject_duplicate_edges(cls, v):
        if isinstance(v, (list, tuple)):
            pairs = [tuple(e) for e in v]
            if len(set(pairs)) != len(pairs):
                raise ValueError("duplicate edge in edge list")
            return frozenset(pairs)
        return v

    @model_validator(mode='after')
    def check_structure(self):
        ids = [f.id for f in self.factors]
        if len(set(ids)) != len(ids):
            raise ValueError("factor ids must be unique")
        known = set(ids)
        for source, target in self.edges:
            if source == target:
                raise ValueError(f"self-loop on '{source}'")
            if source not in known or target not in known:
                raise ValueError(f"edge {source}->{target} references an unknown factor")
        return self

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(f.id for f in self.factors)

    def index(self, factor_id: str) -> int:
        for i, factor in enumerate(self.factors):
            if factor.id == factor_id:
                return i
        raise UnknownFactorError(f"unknown factor '{factor_id}'")

    def factor(self, factor_id: str) -> Factor:
        return self.factors[self.index(factor_id)]

    def has_factor(self, factor_id: str) -> bool:
        return any(f.id == factor_id for f in self.factors)

    def ordered_edges(self) -> List[Edge]:
        """Edges sorted by the factor order of (from, to)"""
        position = {fid: i for i, fid in enumerate(self.ids)}
        return sorted(self.edges, key=lambda e: (position[e[0]], position[e[1]]))

    def __str__(self) -> str:
        return f"FactorGraph({len(self.factors)} factors, {len(self.edges)} edges)"

    class Config:
        frozen = True


class BoolMatrix(BaseModel):
    """Square boolean relation matrix; cell (i, j) true iff order[i] -> order[j]"""
    order: Tuple[str, ...] = ()
    cells: np.ndarray = Field(default_factory=lambda: np.zeros((0, 0), dtype=bool))

    @field_validator('cells', mode='before')
    @classmethod
    def coerce_cells(cls, v):
        arr = np.array(v)
        if arr.size == 0:
            arr = np.zeros((0, 0), dtype=bool)
        if arr.dtype != np.bool_:
            if not np.isin(arr, (0, 1)).all():
                raise ValueError("matrix cells must be boolean or 0/1")
            arr = arr.astype(bool)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"matrix must be square, got shape {arr.shape}")
        arr.flags.writeable = False
        return arr

    @model_validator(mode='after')
    def check_order(self):
        if len(self.order) != self.cells.shape[0]:
            raise ValueError(
                f"order has {len(self.order)} ids but matrix is {self.cells.shape[0]}x{self.cells.shape[0]}"
            )
        if len(set(self.order)) != len(self.order):
            raise ValueError("matrix order ids must be unique")
        return self

    @classmethod
    def from_rows(cls, order: Sequence[str], rows: Iterable[Sequence]) -> "BoolMatrix":
        """Build from nested rows, raising MatrixShapeError on bad shapes"""
        rows = [list(r) for r in rows]
        n = len(order)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise MatrixShapeError(f"expected a {n}x{n} matrix for order {list(order)}")
        return cls(order=tuple(order), cells=np.array(rows, dtype=bool).reshape(n, n))

    @classmethod
    def zeros(cls, order: Sequence[str]) -> "BoolMatrix":
        n = len(order)
        return cls(order=tuple(order), cells=np.zeros((n, n), dtype=bool))

    @property
    def size(self) -> int:
        return len(self.order)

    def index(self, factor_id: str) -> int:
        try:
            return self.order.index(factor_id)
        except ValueError:
            raise UnknownFactorError(f"unknown factor '{factor_id}'")

    def cell(self, source: str, target: str) -> bool:
        return bool(self.cells[self.index(source), self.index(target)])

    def row_set(self, factor_id: str) -> Set[str]:
        row = self.cells[self.index(factor_id)]
        return {self.order[j] for j in np.flatnonzero(row)}

    def column(self, factor_id: str) -> Set[str]:
        col = self.cells[:, self.index(factor_id)]
        return {self.order[i] for i in np.flatnonzero(col)}

    def pairs(self) -> List[Edge]:
        """True cells as (from, to) pairs in row-major factor order"""
        return [(self.order[i], self.order[j]) for i, j in zip(*np.nonzero(self.cells))]

    def issubset(self, other: "BoolMatrix") -> bool:
        """Cellwise inclusion (same order required)"""
        if self.order != other.order:
            raise MatrixShapeError("matrices have different factor orders")
        return not np.any(self.cells & ~other.cells)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoolMatrix):
            return NotImplemented
        return self.order == other.order and np.array_equal(self.cells, other.cells)

    __hash__ = None

    def __str__(self) -> str:
        return f"BoolMatrix({self.size}x{self.size}, {int(self.cells.sum())} true)"

    class Config:
        frozen = True
        arbitrary_types_allowed = True
