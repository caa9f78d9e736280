# services/closure.py
"""
Transitive Closure Service
Warshall's boolean closure of the influence relation and an independent
graph-search reachability oracle.
"""
from collections import deque
from typing import List, Set, Union
import logging

import numpy as np

from models.errors import MatrixShapeError
from models.graph import BoolMatrix, Edge, FactorGraph
from services.influence_graph import CANONICAL_FACTORS, relation_set

logger = logging.getLogger(__name__)

MatrixLike = Union[BoolMatrix, np.ndarray]

# Printed closure of the printed relation, rows/columns [N, N1, N2, N3, N4, N5]
PRINTED_CLOSURE_ROWS = (
    (0, 0, 0, 0, 0, 0),
    (1, 0, 0, 0, 0, 1),
    (1, 0, 0, 0, 0, 1),
    (1, 0, 0, 0, 0, 1),
    (0, 0, 0, 0, 0, 1),
    (0, 0, 0, 0, 0, 0),
)
PRIORITY_FACTOR = "N5"


def _cells(m: MatrixLike) -> np.ndarray:
    if isinstance(m, BoolMatrix):
        return m.cells
    arr = np.asarray(m, dtype=bool)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MatrixShapeError(f"relation matrix must be square, got shape {arr.shape}")
    return arr


def _like(m: MatrixLike, cells: np.ndarray) -> MatrixLike:
    if isinstance(m, BoolMatrix):
        return BoolMatrix(order=m.order, cells=cells)
    return cells


def transitive_closure(m: MatrixLike) -> MatrixLike:
    """
    Smallest transitive relation containing m (Warshall).

    Cell (i, j) of the result is true iff a path of length >= 1 leads from i to j.
    The diagonal stays false unless i lies on a cycle. The input is not modified;
    a BoolMatrix in gives a BoolMatrix out, an ndarray in gives an ndarray out.
    """
    closure = _cells(m).copy()
    n = closure.shape[0]
    for k in range(n):
        # i -> k and k -> j  =>  i -> j
        closure |= np.outer(closure[:, k], closure[k, :])
    return _like(m, closure)


def is_transitive(m: MatrixLike) -> bool:
    """True iff m(i,j) and m(j,k) imply m(i,k) for all i, j, k"""
    cells = _cells(m)
    as_int = cells.astype(np.int64)
    composed = (as_int @ as_int) > 0
    return not np.any(composed & ~cells)


def reachable(graph: FactorGraph, from_id: str) -> Set[str]:
    """Factors reachable from from_id by a path of length >= 1 (breadth-first search)"""
    seen: Set[str] = set()
    queue = deque(relation_set(graph, from_id))
    while queue:
        node = queue.popleft()
        if node in seen:
            continue
        seen.add(node)
        queue.extend(relation_set(graph, node) - seen)
    return seen


def closure_delta(m: BoolMatrix) -> List[Edge]:
    """Pairs the closure adds to m, in row-major factor order"""
    closed = transitive_closure(m)
    added = closed.cells & ~m.cells
    delta = [(m.order[i], m.order[j]) for i, j in zip(*np.nonzero(added))]
    logger.debug(f"Closure adds {len(delta)} pairs: {delta}")
    return delta


def printed_closure() -> BoolMatrix:
    """Transcription of the printed closure matrix (archival)"""
    return BoolMatrix.from_rows([f.id for f in CANONICAL_FACTORS], PRINTED_CLOSURE_ROWS)


def matches_printed_closure(m: BoolMatrix) -> bool:
    """
    Compare the Priority column of m with the printed closure.

    Only that column is compared: it is the stated delta, while the printed
    Impact column omits reachable cells.
    """
    printed = printed_closure()
    if m.order != printed.order:
        return False
    return m.column(PRIORITY_FACTOR) == printed.column(PRIORITY_FACTOR)
