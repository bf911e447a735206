"""
Core graph data model. A LabeledGraph holds one class label per node plus out/in/label indexes, and a QueryGraph is a
LabeledGraph whose nodes also carry an investigation Category. Both are immutable once built; build them with
build_graph() and build_query().
"""
import logging
import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType

import networkx as nx

from InvestigativeSearchTools.exceptions import GraphBuildError, ConfigError

log = logging.getLogger(__name__)

_EMPTY = frozenset()
FIELD_BREAKS = re.compile(r"[\t\n\r]")


class Category(str, Enum):
    """Categorical node labels used to weight the nodes of an investigative query."""
    QF = 'QF'      # query focus, the persons being searched for
    IIRA = 'IIRA'  # individually innocuous but related activity
    IND = 'IND'    # indicator
    RF = 'RF'      # red flag indicator, individually sufficient
    NC = 'NC'      # no category

    @classmethod
    def parse(cls, value):
        """Returns the Category named by value. Raises ValueError listing the allowed values otherwise."""
        if isinstance(value, Category):
            return value
        try:
            return cls(value)
        except ValueError:
            raise ValueError('unknown category %r (allowed: %s)' % (value, ', '.join(c.value for c in cls)))


INDICATOR_CATEGORIES = frozenset([Category.IND, Category.RF])


class LabeledGraph(object):
    """
    Directed graph with a string class label on every node and optional labels on edges.

    Indexes are frozen at construction. Edge labels are kept for round trips but no matching operation looks at them.
    """

    def __init__(self, labels, out_index, in_index, label_index, edge_labels, num_edges):
        self._labels = labels
        self._out = out_index
        self._in = in_index
        self._label_index = label_index
        self._edge_labels = edge_labels
        self._num_edges = num_edges

    # node access
    @property
    def labels(self):
        return MappingProxyType(self._labels)

    @property
    def nodes(self):
        return self._labels.keys()

    @property
    def num_nodes(self):
        return len(self._labels)

    @property
    def num_edges(self):
        return self._num_edges

    def __len__(self):
        return len(self._labels)

    def __contains__(self, node):
        return node in self._labels

    def label(self, node):
        return self._labels[node]

    def nodes_with_label(self, label):
        return self._label_index.get(label, _EMPTY)

    # edge access
    def successors(self, node):
        return self._out.get(node, _EMPTY)

    def predecessors(self, node):
        return self._in.get(node, _EMPTY)

    def has_edge(self, src, dst):
        return dst in self._out.get(src, _EMPTY)

    def edge_label(self, src, dst):
        return self._edge_labels.get((src, dst))

    @property
    def edge_labels(self):
        return MappingProxyType(self._edge_labels)

    def iter_edges(self):
        for src, dsts in self._out.items():
            for dst in dsts:
                yield src, dst

    @property
    def edges(self):
        return frozenset(self.iter_edges())

    def rebuild_indexes(self):
        """
        Recomputes the out, in and label indexes from the edge and node sets.

        Returns
        -------
        tuple of dict
            (out_index, in_index, label_index), each mapping to frozensets and omitting empty entries.
        """
        out_index, in_index, label_index = {}, {}, {}
        for node, label in self._labels.items():
            label_index.setdefault(label, set()).add(node)
        for src, dst in self.iter_edges():
            out_index.setdefault(src, set()).add(dst)
            in_index.setdefault(dst, set()).add(src)
        return tuple({k: frozenset(v) for k, v in d.items()} for d in (out_index, in_index, label_index))

    def indexes_consistent(self):
        out_index, in_index, label_index = self.rebuild_indexes()
        return out_index == self._out and in_index == self._in and label_index == self._label_index

    def to_networkx(self):
        """Returns a networkx.DiGraph copy with 'label' attributes on nodes (and on labeled edges)."""
        nx_graph = nx.DiGraph()
        for node, label in self._labels.items():
            nx_graph.add_node(node, label=label)
        for src, dst in self.iter_edges():
            edge_label = self._edge_labels.get((src, dst))
            if edge_label is None:
                nx_graph.add_edge(src, dst)
            else:
                nx_graph.add_edge(src, dst, label=edge_label)
        return nx_graph

    def __eq__(self, other):
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return (self._labels == other._labels and self._out == other._out
                and self._edge_labels == other._edge_labels)

    def __ne__(self, other):
        res = self.__eq__(other)
        return res if res is NotImplemented else not res

    __hash__ = None

    def __repr__(self):
        return '%s(nodes=%d, edges=%d)' % (self.__class__.__name__, self.num_nodes, self.num_edges)


def _check_token(value, what, leading_hash=True):
    """Ids and labels are TSV fields: not blank and free of tabs and line breaks."""
    if not isinstance(value, str) or not value.strip():
        raise GraphBuildError('%s must be a non-blank string, got %r' % (what, value))
    if FIELD_BREAKS.search(value):
        raise GraphBuildError('%s may not contain tabs or line breaks, got %r' % (what, value))
    # a node id opens its line in the node TSV, where '#' starts a comment
    if not leading_hash and value.startswith('#'):
        raise GraphBuildError("%s may not start with '#', got %r" % (what, value))


def build_graph(node_records, edge_records):
    """Builds a LabeledGraph and all of its indexes.

    Parameters
    ----------
    node_records: iterable of (str, str)
        (node id, class label) pairs. Repeating an id with the same label is allowed, with another label it is not.
    edge_records: iterable of tuple
        (src, dst) or (src, dst, edge_label) tuples. Duplicate edges are collapsed.

    Returns
    -------
    LabeledGraph
    """
    labels = {}
    for record in node_records:
        node, label = record
        _check_token(node, 'node id', leading_hash=False)
        _check_token(label, 'label of node %s' % node)
        prev = labels.setdefault(node, label)
        if prev != label:
            raise GraphBuildError('node %s has conflicting labels %r and %r' % (node, prev, label))

    out_sets, in_sets, edge_labels = {}, {}, {}
    num_edges = 0
    for record in edge_records:
        if len(record) == 2:
            (src, dst), edge_label = record, None
        else:
            src, dst, edge_label = record
        for endpoint in (src, dst):
            if endpoint not in labels:
                raise GraphBuildError('unknown endpoint %s in edge (%s, %s)' % (endpoint, src, dst))
        if edge_label == '':
            edge_label = None
        if edge_label is not None:
            _check_token(edge_label, 'label of edge (%s, %s)' % (src, dst))

        succ = out_sets.setdefault(src, set())
        if dst not in succ:
            succ.add(dst)
            in_sets.setdefault(dst, set()).add(src)
            num_edges += 1
        if edge_label is not None:
            prev = edge_labels.setdefault((src, dst), edge_label)
            if prev != edge_label:
                raise GraphBuildError('edge (%s, %s) has conflicting labels %r and %r' % (src, dst, prev, edge_label))

    label_sets = {}
    for node, label in labels.items():
        label_sets.setdefault(label, set()).add(node)

    return LabeledGraph(labels,
                        {k: frozenset(v) for k, v in out_sets.items()},
                        {k: frozenset(v) for k, v in in_sets.items()},
                        {k: frozenset(v) for k, v in label_sets.items()},
                        edge_labels,
                        num_edges)


class QueryGraph(object):
    """
    A query pattern: a LabeledGraph plus a Category for every node.
    """

    def __init__(self, graph, categories):
        missing = [n for n in graph.nodes if n not in categories]
        if missing:
            raise GraphBuildError('query nodes without a category: %s' % ', '.join(sorted(missing)))
        self.graph = graph
        self._categories = {n: Category.parse(categories[n]) for n in graph.nodes}

    @property
    def nodes(self):
        return self.graph.nodes

    @property
    def num_nodes(self):
        return self.graph.num_nodes

    @property
    def num_edges(self):
        return self.graph.num_edges

    def __len__(self):
        return self.graph.num_nodes

    def __contains__(self, node):
        return node in self.graph

    def label(self, node):
        return self.graph.label(node)

    def category(self, node):
        return self._categories[node]

    def successors(self, node):
        return self.graph.successors(node)

    def predecessors(self, node):
        return self.graph.predecessors(node)

    def iter_edges(self):
        return self.graph.iter_edges()

    @property
    def edges(self):
        return self.graph.edges

    def nodes_in(self, *categories):
        """Sorted ids of the query nodes whose category is one of the given ones."""
        wanted = {Category.parse(c) for c in categories}
        return sorted(n for n, c in self._categories.items() if c in wanted)

    @property
    def qf_nodes(self):
        return self.nodes_in(Category.QF)

    def reachable_within(self, node, hop_bound):
        """
        Query nodes other than `node` reachable from it by a directed path of 1 to hop_bound edges.

        Returns
        -------
        dict
            node id -> length of the shortest such path
        """
        dist = {node: 0}
        found = {}
        frontier = deque([node])
        while frontier:
            cur = frontier.popleft()
            if dist[cur] == hop_bound:
                continue
            for nxt in self.graph.successors(cur):
                if nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    frontier.append(nxt)
                    if nxt != node:
                        found[nxt] = dist[nxt]
        return found

    def __eq__(self, other):
        if not isinstance(other, QueryGraph):
            return NotImplemented
        return self.graph == other.graph and self._categories == other._categories

    __hash__ = None

    def __repr__(self):
        return 'QueryGraph(nodes=%d, edges=%d, qf=%s)' % (self.num_nodes, self.num_edges, self.qf_nodes)


def build_query(node_records, edge_records):
    """Builds a QueryGraph.

    Parameters
    ----------
    node_records: iterable of (str, str, Category or str)
        (node id, class label, category)
    edge_records: iterable of (str, str)
        Directed query edges.

    Returns
    -------
    QueryGraph
    """
    node_records = list(node_records)
    categories = {}
    for node, _, category in node_records:
        try:
            category = Category.parse(category)
        except ValueError as e:
            raise GraphBuildError('query node %s: %s' % (node, e))
        prev = categories.setdefault(node, category)
        if prev != category:
            raise GraphBuildError('query node %s has conflicting categories %s and %s' % (node, prev.value,
                                                                                          category.value))
    graph = build_graph([(n, l) for n, l, _ in node_records], edge_records)
    return QueryGraph(graph, categories)


@dataclass
class ValidationReport(object):
    """Outcome of validate_query. The query is usable iff .violations is empty."""
    mode: str
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def render(self):
        lines = ['%s: %s' % (self.mode, 'OK' if self.ok else 'INVALID')]
        lines += ['violation: ' + v for v in self.violations]
        lines += ['warning: ' + w for w in self.warnings]
        return '\n'.join(lines)


VALIDATION_MODES = ('dual', 'investigative')


def validate_query(q, mode='investigative', hop_bound=2):
    """Checks that a query can be used for the given kind of matching.

    Parameters
    ----------
    q: QueryGraph
    mode: str
        'dual' only requires a non-empty, weakly connected pattern. 'investigative' additionally requires at least one
        QF node and at least one IND or RF node.
    hop_bound: int
        Used only to warn about indicators no relevant set can ever reach.

    Returns
    -------
    ValidationReport
        Lists every violation, never raises for a bad query.
    """
    if mode not in VALIDATION_MODES:
        raise ConfigError('unknown validation mode %r (allowed: %s)' % (mode, ', '.join(VALIDATION_MODES)))

    report = ValidationReport(mode=mode)
    if q.num_nodes == 0:
        report.violations.append('empty query')
        return report

    if not nx.is_weakly_connected(q.graph.to_networkx()):
        report.violations.append('query is not weakly connected')

    if mode == 'investigative':
        qf_nodes = q.qf_nodes
        indicators = q.nodes_in(*INDICATOR_CATEGORIES)
        if not qf_nodes:
            report.violations.append('no QF node')
        if not indicators:
            report.violations.append('no IND/RF node')

        if qf_nodes and indicators:
            covered = set()
            for u in qf_nodes:
                covered.update(q.reachable_within(u, hop_bound))
            for w in indicators:
                if w not in covered:
                    report.warnings.append('indicator %s is not a descendant within %d hops of any QF node; it can '
                                           'only match through full dual simulation matches' % (w, hop_bound))
    for w in report.warnings:
        log.warning(w)
    return report
