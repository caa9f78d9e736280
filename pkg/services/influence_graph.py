# services/influence_graph.py
"""
Influence Graph Service
Builds the risk-assessment factor graph, its relational sets and adjacency matrix.
"""
import json
from pathlib import Path
from typing import FrozenSet, List, Set, Union
import logging

import numpy as np

from models.errors import (
    DuplicateEdgeError,
    DuplicateFactorError,
    GraphDefinitionError,
    SelfLoopError,
    UnknownFactorError,
)
from models.graph import BoolMatrix, Edge, Factor, FactorGraph, FactorKind

logger = logging.getLogger(__name__)

# Row/column order of the canonical matrix
CANONICAL_FACTORS = (
    Factor(id="N", name="Risk", kind=FactorKind.ROOT),
    Factor(id="N1", name="Risk Type", kind=FactorKind.INDEPENDENT),
    Factor(id="N2", name="Risk Probability", kind=FactorKind.INDEPENDENT),
    Factor(id="N3", name="Risk Frequency", kind=FactorKind.INDEPENDENT),
    Factor(id="N4", name="Risk Impact", kind=FactorKind.DEPENDENT),
    Factor(id="N5", name="Risk Priority", kind=FactorKind.DEPENDENT),
)

# Each independent factor influences the risk itself and its impact; impact drives priority
CANONICAL_EDGES = (
    ("N1", "N"), ("N1", "N4"),
    ("N2", "N"), ("N2", "N4"),
    ("N3", "N"), ("N3", "N4"),
    ("N4", "N5"),
)

# The edge set as printed in the archival matrix (independent -> N4 cells missing)
PAPER_LITERAL_EDGES = (
    ("N1", "N"),
    ("N2", "N"),
    ("N3", "N"),
    ("N4", "N5"),
)


def canonical_factor_graph(paper_literal: bool = False) -> FactorGraph:
    """
    The six-factor risk assessment graph [N, N1, N2, N3, N4, N5].

    paper_literal=True returns the printed edge set instead, for archival comparison.
    """
    edges = PAPER_LITERAL_EDGES if paper_literal else CANONICAL_EDGES
    return FactorGraph(factors=CANONICAL_FACTORS, edges=frozenset(edges))


def relation_set(graph: FactorGraph, factor_id: str) -> Set[str]:
    """R(x): the factors directly influenced by factor_id"""
    if not graph.has_factor(factor_id):
        raise UnknownFactorError(f"unknown factor '{factor_id}'")
    return {target for source, target in graph.edges if source == factor_id}


def independent_factors(graph: FactorGraph) -> List[Factor]:
    return [f for f in graph.factors if f.kind == FactorKind.INDEPENDENT]


def adjacency_matrix(graph: FactorGraph) -> BoolMatrix:
    """M_R in the graph's factor order; cell (i, j) true iff edge order[i] -> order[j]"""
    order = graph.ids
    position = {fid: i for i, fid in enumerate(order)}
    cells = np.zeros((len(order), len(order)), dtype=bool)
    for source, target in graph.edges:
        cells[position[source], position[target]] = True
    return BoolMatrix(order=order, cells=cells)


def edges_from_matrix(matrix: BoolMatrix) -> FrozenSet[Edge]:
    """Inverse of adjacency_matrix on the edge set"""
    return frozenset(matrix.pairs())


def add_factor(graph: FactorGraph, factor: Factor) -> FactorGraph:
    """New graph with factor appended to the order"""
    if graph.has_factor(factor.id):
        raise DuplicateFactorError(f"factor id '{factor.id}' already in graph")
    return FactorGraph(factors=graph.factors + (factor,), edges=graph.edges)


def add_influence(graph: FactorGraph, from_id: str, to_id: str) -> FactorGraph:
    """New graph with the edge from_id -> to_id"""
    for factor_id in (from_id, to_id):
        if not graph.has_factor(factor_id):
            raise UnknownFactorError(f"unknown factor '{factor_id}'")
    if from_id == to_id:
        raise SelfLoopError(f"factor '{from_id}' cannot influence itself")
    if (from_id, to_id) in graph.edges:
        raise DuplicateEdgeError(f"edge {from_id}->{to_id} already in graph")
    return FactorGraph(factors=graph.factors, edges=graph.edges | {(from_id, to_id)})


# ============================================================================
# GRAPH-DEFINITION FILES
# ============================================================================

def load_graph(text: str) -> FactorGraph:
    """
    Parse a graph-definition document:
    {"factors": [{"id", "name", "kind"}, ...], "edges": [["N1", "N"], ...]}

    Other keys of the shared register envelope (project, risks, ...) are ignored.
    A risk register without a factors array is assessed on the canonical graph.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphDefinitionError(f"line {e.lineno}, column {e.colno}: {e.msg}")
    if isinstance(doc, dict) and 'factors' not in doc and isinstance(doc.get('risks'), list):
        logger.info("Register carries no factors; using the canonical factor graph")
        return canonical_factor_graph()
    if not isinstance(doc, dict) or not isinstance(doc.get('factors'), list):
        raise GraphDefinitionError("graph definition needs a 'factors' array")

    graph = FactorGraph()
    for i, entry in enumerate(doc['factors']):
        if not isinstance(entry, dict) or not isinstance(entry.get('id'), str):
            raise GraphDefinitionError(f"factors[{i}]: factor needs a string 'id'")
        try:
            kind = FactorKind(str(entry.get('kind', 'Dependent')).title())
        except ValueError:
            raise GraphDefinitionError(f"factors[{i}]: unknown kind {entry.get('kind')!r}")
        try:
            factor = Factor(id=entry['id'], name=entry.get('name', entry['id']), kind=kind)
        except ValueError as e:
            raise GraphDefinitionError(f"factors[{i}]: {e}")
        graph = add_factor(graph, factor)

    edges = doc.get('edges', [])
    if not isinstance(edges, list):
        raise GraphDefinitionError("'edges' must be an array of [from, to] pairs")
    for i, pair in enumerate(edges):
        if not isinstance(pair, list) or len(pair) != 2:
            raise GraphDefinitionError(f"edges[{i}]: expected [from, to]")
        try:
            graph = add_influence(graph, pair[0], pair[1])
        except UnknownFactorError as e:
            raise GraphDefinitionError(f"edges[{i}]: {e}")

    logger.info(f"Loaded {graph}")
    return graph


def load_graph_file(path: Union[str, Path]) -> FactorGraph:
    try:
        text = Path(path).read_text(encoding='utf-8')
    except UnicodeDecodeError as e:
        raise GraphDefinitionError(f"{path}: not valid UTF-8 at byte {e.start}")
    return load_graph(text)



def dump_graph(graph: FactorGraph) -> str:
    """Graph-definition document for graph; load_graph(dump_graph(g)) == g"""
    doc = {
        'factors': [{'id': f.id, 'name': f.name, 'kind': f.kind.value} for f in graph.factors],
        'edges': [list(edge) for edge in graph.ordered_edges()],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
