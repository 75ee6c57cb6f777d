"""
Graphs whose edges carry one weight per edge type, and the aggregation
schemes that reduce them to ordinary weighted graphs.

Both graph classes are immutable: the index and weight arrays are marked
read-only on construction and every operation returns a new object.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import (
    DimensionError,
    EmptyGraphError,
    GraphInvariantError,
    NegativeCompositeError,
    NegativeWeightError,
    ParseError,
    UnknownEdgeTypeError,
    UnknownNodeError,
    ZeroWeightTypeError,
)

logger = logging.getLogger(__name__)

TYPES_DIRECTIVE = "types:"
NODE_DIRECTIVE = "node:"


def _frozen(array, dtype):
    array = np.array(array, dtype=dtype, copy=True)
    array.flags.writeable = False
    return array


def _pair_keys(sources, targets, n_nodes):
    low = np.minimum(sources, targets)
    high = np.maximum(sources, targets)
    return low * n_nodes + high


@dataclass(frozen=True)
class WeightVector:
    """Aggregation coefficients, one per edge type."""

    alpha: tuple

    def __post_init__(self):
        alpha = tuple(float(value) for value in self.alpha)
        if not alpha:
            raise DimensionError("A weight vector needs at least one component")
        if not all(math.isfinite(value) for value in alpha):
            raise DimensionError(f"Weight vector components must be finite: {alpha}")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def unit(cls, values):
        values = np.asarray(values, dtype=float)
        norm = np.linalg.norm(values)
        if norm == 0:
            raise DimensionError("Cannot normalize the zero vector onto the sphere")
        return cls(tuple(values / norm))

    @classmethod
    def coordinate(cls, k, t):
        values = [0.0] * k
        values[t] = 1.0
        return cls(tuple(values))

    @property
    def dim(self):
        return len(self.alpha)

    @property
    def norm(self):
        return float(np.linalg.norm(self.alpha))

    def as_array(self):
        return np.array(self.alpha, dtype=float)

    def scaled(self, factor):
        return WeightVector(tuple(factor * value for value in self.alpha))


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph with a single nonnegative weight per edge."""

    nodes: tuple
    sources: np.ndarray
    targets: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        weights = np.asarray(self.weights, dtype=float)
        if not np.all(np.isfinite(weights)):
            raise NegativeWeightError("Edge weights must be finite")
        if np.any(weights < 0):
            raise NegativeWeightError("Edge weights must not be negative")
        keep = weights > 0
        object.__setattr__(self, "sources", _frozen(np.asarray(self.sources)[keep], np.int64))
        object.__setattr__(self, "targets", _frozen(np.asarray(self.targets)[keep], np.int64))
        object.__setattr__(self, "weights", _frozen(weights[keep], float))

    @classmethod
    def from_edges(cls, edges, nodes=()):
        nodes = list(dict.fromkeys(nodes))
        index = {node: i for i, node in enumerate(nodes)}
        sources, targets, weights = [], [], []
        for u, v, w in edges:
            for node in (u, v):
                if node not in index:
                    index[node] = len(nodes)
                    nodes.append(node)
            sources.append(index[u])
            targets.append(index[v])
            weights.append(w)
        return cls(tuple(nodes), sources, targets, weights)

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_edges(self):
        return len(self.weights)

    @cached_property
    def node_index(self):
        return {node: i for i, node in enumerate(self.nodes)}

    @cached_property
    def total_weight(self):
        return float(self.weights.sum())

    @cached_property
    def degrees(self):
        n = self.n_nodes
        return np.bincount(self.sources, self.weights, minlength=n) + np.bincount(
            self.targets, self.weights, minlength=n
        )

    @cached_property
    def adjacency(self):
        """Symmetric sparse adjacency matrix in CSR form."""
        n = self.n_nodes
        rows = np.concatenate([self.sources, self.targets])
        cols = np.concatenate([self.targets, self.sources])
        data = np.concatenate([self.weights, self.weights])
        return sparse.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()

    def edges(self):
        for s, t, w in zip(self.sources, self.targets, self.weights):
            yield self.nodes[s], self.nodes[t], float(w)

    def scaled(self, factor):
        return Graph(self.nodes, self.sources, self.targets, self.weights * factor)


@dataclass(frozen=True, eq=False)
class MultiGraph:
    """Undirected graph whose edges carry a vector of k per-type weights."""

    nodes: tuple
    edge_types: tuple
    sources: np.ndarray
    targets: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edge_types", tuple(self.edge_types))
        if not self.edge_types:
            raise DimensionError("A multigraph needs at least one edge type")
        if len(set(self.edge_types)) != len(self.edge_types):
            raise DimensionError(f"Duplicate edge type names in {self.edge_types}")
        k = len(self.edge_types)
        weights = np.asarray(self.weights, dtype=float).reshape(-1, k)
        sources = np.asarray(self.sources, dtype=np.int64)
        targets = np.asarray(self.targets, dtype=np.int64)
        if not len(sources) == len(targets) == len(weights):
            raise DimensionError("Edge index and weight arrays differ in length")
        if len(sources) and (
            min(sources.min(), targets.min()) < 0
            or max(sources.max(), targets.max()) >= len(self.nodes)
        ):
            raise UnknownNodeError("Edge endpoint outside the node set")
        if not np.all(np.isfinite(weights)):
            raise NegativeWeightError("Edge weights must be finite")
        if np.any(weights < 0):
            raise NegativeWeightError("Edge weights must not be negative")
        if len(weights) and np.any(weights.max(axis=1) <= 0):
            raise GraphInvariantError("Every stored edge needs a positive weight")
        loops = np.flatnonzero(sources == targets)
        if len(loops):
            raise GraphInvariantError(f"Self-loop on node {self.nodes[sources[loops[0]]]!r}")
        keys = _pair_keys(sources, targets, len(self.nodes))
        if len(np.unique(keys)) != len(keys):
            raise GraphInvariantError("More than one edge record for a node pair")
        object.__setattr__(self, "sources", _frozen(sources, np.int64))
        object.__setattr__(self, "targets", _frozen(targets, np.int64))
        object.__setattr__(self, "weights", _frozen(weights, float))

    @classmethod
    def from_edges(cls, edge_types, edges, nodes=()):
        """Build from `(u, v, weights)` records; `nodes` adds isolated nodes."""
        nodes = list(dict.fromkeys(nodes))
        index = {node: i for i, node in enumerate(nodes)}
        sources, targets, weights = [], [], []
        k = len(edge_types)
        for u, v, w in edges:
            if len(w) != k:
                raise DimensionError(
                    f"Edge ({u}, {v}) carries {len(w)} weights, expected {k}"
                )
            for node in (u, v):
                if node not in index:
                    index[node] = len(nodes)
                    nodes.append(node)
            sources.append(index[u])
            targets.append(index[v])
            weights.append(tuple(w))
        return cls(tuple(nodes), tuple(edge_types), sources, targets, np.reshape(weights, (-1, k)))

    @property
    def k(self):
        return len(self.edge_types)

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_edges(self):
        return len(self.weights)

    @cached_property
    def node_index(self):
        return {node: i for i, node in enumerate(self.nodes)}

    def type_index(self, name):
        try:
            return self.edge_types.index(name)
        except ValueError:
            raise UnknownEdgeTypeError(
                f"Unknown edge type {name!r}; known types: {', '.join(self.edge_types)}"
            ) from None

    def index_of(self, node):
        try:
            return self.node_index[node]
        except KeyError:
            raise UnknownNodeError(f"Unknown node {node!r}") from None

    def with_weights(self, weights, edge_types=None):
        """Same nodes and edge records with new weights; all-zero records are dropped."""
        weights = np.asarray(weights, dtype=float)
        keep = weights.max(axis=1) > 0 if len(weights) else np.zeros(0, dtype=bool)
        return MultiGraph(
            self.nodes,
            self.edge_types if edge_types is None else edge_types,
            self.sources[keep],
            self.targets[keep],
            weights[keep],
        )

    def _composite(self, weights):
        return Graph(self.nodes, self.sources, self.targets, weights)


def parse_multigraph(text, source=None):
    edge_types = None
    declared = []
    edges = []
    seen = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if edge_types is None and body.startswith(TYPES_DIRECTIVE):
                edge_types = _parse_types(body, number, source)
            continue
        if line.startswith(TYPES_DIRECTIVE):
            if edge_types is not None:
                raise ParseError("Duplicate types directive", number, source)
            edge_types = _parse_types(line, number, source)
            continue
        if edge_types is None:
            raise ParseError(
                f"Expected a '{TYPES_DIRECTIVE}' directive before {line!r}", number, source
            )
        if line.startswith(NODE_DIRECTIVE):
            node = line[len(NODE_DIRECTIVE):].strip()
            if not node:
                raise ParseError("Empty node declaration", number, source)
            declared.append(node)
            continue
        fields = raw.rstrip("\r\n").split("\t") if "\t" in raw else line.split()
        fields = [field.strip() for field in fields]
        if len(fields) < 3:
            raise ParseError(f"Expected 'u v w1 ... wk', got {line!r}", number, source)
        u, v, *values = fields
        if len(values) != len(edge_types):
            raise DimensionError(
                f"Line {number}: expected {len(edge_types)} weights, found {len(values)}"
            )
        try:
            weights = tuple(float(value) for value in values)
        except ValueError:
            raise ParseError(f"Couldn't convert weights {values} to numbers", number, source) from None
        if not all(math.isfinite(w) for w in weights):
            raise ParseError(f"Weights must be finite, got {values}", number, source)
        if any(w < 0 for w in weights):
            raise NegativeWeightError(f"Negative weight in {values}", number, source)
        if u == v:
            raise GraphInvariantError(f"Self-loop on node {u!r}", number, source)
        pair = frozenset((u, v))
        if pair in seen:
            raise GraphInvariantError(
                f"Duplicate edge ({u}, {v}); first given on line {seen[pair]}", number, source
            )
        seen[pair] = number
        if max(weights) == 0:
            logger.warning("Line %d: skipping edge (%s, %s) with all-zero weights", number, u, v)
            continue
        edges.append((u, v, weights))
    if edge_types is None:
        raise ParseError(f"Missing '{TYPES_DIRECTIVE}' directive", None, source)
    return MultiGraph.from_edges(edge_types, edges, nodes=declared)


def _parse_types(line, number, source):
    names = tuple(line[len(TYPES_DIRECTIVE):].split())
    if not names:
        raise ParseError("The types directive names no edge types", number, source)
    if len(set(names)) != len(names):
        raise ParseError(f"Duplicate edge type names in {names}", number, source)
    return names


def load_multigraph(path):
    path = Path(path)
    return parse_multigraph(path.read_text(encoding="utf-8"), source=path)


def format_multigraph(g):
    lines = [f"{TYPES_DIRECTIVE} {' '.join(g.edge_types)}"]
    touched = np.zeros(g.n_nodes, dtype=bool)
    touched[g.sources] = True
    touched[g.targets] = True
    lines.extend(f"{NODE_DIRECTIVE} {g.nodes[i]}" for i in np.flatnonzero(~touched))
    for s, t, w in zip(g.sources, g.targets, g.weights):
        values = "\t".join(repr(float(value)) for value in w)
        lines.append(f"{g.nodes[s]}\t{g.nodes[t]}\t{values}")
    return "\n".join(lines) + "\n"


def write_multigraph(g, path):
    Path(path).write_text(format_multigraph(g), encoding="utf-8")


def graph_as_multigraph(g, name="weight"):
    return MultiGraph(g.nodes, (name,), g.sources, g.targets, g.weights.reshape(-1, 1))


def write_graph(g, path):
    write_multigraph(graph_as_multigraph(g), path)


def load_graph(path):
    mg = load_multigraph(path)
    if mg.k != 1:
        raise DimensionError(
            f"{path}: expected a single-weight graph, found {mg.k} edge types"
        )
    return mg._composite(mg.weights[:, 0])


def normalize_edge_types(g):
    """Scale every edge type to unit L2 norm over the stored edges."""
    if g.n_edges == 0:
        raise EmptyGraphError("Cannot normalize a multigraph without edges")
    norms = np.sqrt((g.weights**2).sum(axis=0))
    for name, norm in zip(g.edge_types, norms):
        if norm == 0:
            raise ZeroWeightTypeError(f"Edge type {name!r} has no nonzero weight")
    return g.with_weights(g.weights / norms)


def extract_edge_type(g, name):
    return g._composite(g.weights[:, g.type_index(name)])


def aggregate_linear(g, alpha, clamp_negative=False):
    """Composite weight of each edge is the dot product of `alpha` and its weights."""
    if not isinstance(alpha, WeightVector):
        alpha = WeightVector(tuple(alpha))
    if alpha.dim != g.k:
        raise DimensionError(
            f"Weight vector has {alpha.dim} components, the multigraph has {g.k} edge types"
        )
    composite = g.weights @ alpha.as_array()
    if clamp_negative:
        composite = np.maximum(composite, 0.0)
    elif np.any(composite < 0):
        worst = int(np.argmin(composite))
        raise NegativeCompositeError(
            f"Composite weight {composite[worst]:.6g} on edge "
            f"({g.nodes[g.sources[worst]]}, {g.nodes[g.targets[worst]]}) is negative; "
            "enable clamping to truncate at 0"
        )
    return g._composite(composite)


def aggregate_product(g, type_a, type_b):
    """Edges endorsed by both types, weighted by the product of their weights."""
    a, b = g.type_index(type_a), g.type_index(type_b)
    return g._composite(g.weights[:, a] * g.weights[:, b])


def aggregate_union(g, type_a, type_b):
    a, b = g.type_index(type_a), g.type_index(type_b)
    return g._composite(np.maximum(g.weights[:, a], g.weights[:, b]))
