"""
Readers and writers for the node/edge TSV files and the JSON query format, plus dataset statistics.

Node TSV: `id<TAB>label`, one node per line. Edge TSV: `src<TAB>dst[<TAB>edge_label]`. Both are UTF-8, and blank lines
and lines starting with '#' are ignored. The query format is a JSON document
{"nodes": [{"id": .., "label": .., "category": "QF|IIRA|IND|RF|NC"}], "edges": [["src", "dst"]]}.
"""
import csv
import json
import logging
import os
import re
from dataclasses import dataclass, field

import pandas as pd

from InvestigativeSearchTools.exceptions import GraphFormatError, QueryFormatError, GraphBuildError
from InvestigativeSearchTools.graph import Category, build_graph, build_query

log = logging.getLogger(__name__)

NODE_COLUMNS = ['id', 'label']
EDGE_COLUMNS = ['src', 'dst', 'label']


def _scan_lines(path, max_fields):
    """0-based indices of blank and comment lines. Raises on lines with too many fields."""
    skipped = []
    try:
        with open(path, encoding='utf-8') as f:
            for i, line in enumerate(f):
                if line.startswith('#') or not line.strip():
                    skipped.append(i)
                elif line.count('\t') >= max_fields:
                    raise GraphFormatError('malformed line: expected at most %d tab separated fields' % max_fields,
                                           path, i + 1)
    except UnicodeDecodeError as e:
        raise GraphFormatError('not valid UTF-8 (%s)' % e.reason, path)
    except OSError as e:
        raise GraphFormatError('cannot read file (%s)' % (e.strerror or e), path)
    return skipped


def _row_to_line(row, skipped):
    """1-based file line number of a parsed row, given the sorted skipped line indices."""
    idx = row
    for s in skipped:
        if s <= idx:
            idx += 1
        else:
            break
    return idx + 1


def _read_tsv(path, names, n_required):
    """
    Reads a headerless TSV into a DataFrame of strings, one column per name, missing optional fields as ''.
    Returns the frame together with the skipped line indices (to map rows back to line numbers).
    """
    skipped = _scan_lines(path, len(names))
    try:
        df = pd.read_csv(path, sep='\t', header=None, names=names, dtype=str, quoting=csv.QUOTE_NONE,
                         keep_default_na=False, na_filter=False, index_col=False, skiprows=skipped,
                         skip_blank_lines=False, encoding='utf-8', engine='c')
    except pd.errors.EmptyDataError:
        df = pd.DataFrame(columns=names, dtype=str)
    except pd.errors.ParserError as e:
        m = re.search(r'line (\d+)', str(e))
        raise GraphFormatError('malformed file: %s' % e, path, int(m.group(1)) if m else None)
    df = df.fillna('')

    for col in names[:n_required]:
        bad = df.index[df[col].str.len() == 0]
        if len(bad):
            raise GraphFormatError('malformed line: missing %s field' % col, path, _row_to_line(int(bad[0]), skipped))
    return df, skipped


def load_graph(nodes_path, edges_path):
    """Reads a LabeledGraph from node and edge TSV files.

    Parameters
    ----------
    nodes_path: str
        Node TSV path.
    edges_path: str
        Edge TSV path.

    Returns
    -------
    LabeledGraph
    """
    nodes, node_skipped = _read_tsv(nodes_path, NODE_COLUMNS, 2)
    edges, edge_skipped = _read_tsv(edges_path, EDGE_COLUMNS, 2)
    log.info('read %d node records from %s, %d edge records from %s', len(nodes), nodes_path, len(edges), edges_path)

    distinct = nodes.drop_duplicates(subset=NODE_COLUMNS)
    conflicting = distinct.index[distinct['id'].duplicated()]
    if len(conflicting):
        row = int(conflicting[0])
        node = nodes.at[row, 'id']
        first = distinct['label'][distinct['id'] == node].iloc[0]
        raise GraphFormatError('node %s has conflicting labels %r and %r' % (node, first, nodes.at[row, 'label']),
                               nodes_path, _row_to_line(row, node_skipped))

    known = pd.Index(nodes['id'].unique())
    for col in ('src', 'dst'):
        unknown = edges.index[~edges[col].isin(known)]
        if len(unknown):
            row = int(unknown[0])
            raise GraphFormatError('edge references unknown node id %s' % edges.at[row, col], edges_path,
                                   _row_to_line(row, edge_skipped))

    try:
        return build_graph(zip(nodes['id'], nodes['label']),
                           zip(edges['src'], edges['dst'], edges['label']))
    except GraphBuildError as e:
        raise GraphFormatError(str(e), nodes_path)


def _makedirs_for(path):
    dirname = os.path.dirname(os.path.abspath(path))
    if not os.path.exists(dirname):
        os.makedirs(dirname)


def write_tsv(df, path):
    """
    Writes the string columns of df as headerless TSV lines, verbatim. Unlike to_csv nothing is quoted or escaped, so
    fields must not contain tabs or line breaks.
    """
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        if len(df):
            lines = df.iloc[:, 0].str.cat([df[col] for col in df.columns[1:]], sep='\t')
            f.write('\n'.join(lines))
            f.write('\n')


def save_graph(g, nodes_path, edges_path):
    """
    Writes g as node and edge TSVs, sorted by id so equal graphs give identical files. The edge label column is only
    written if some edge has a label.
    """
    _makedirs_for(nodes_path)
    _makedirs_for(edges_path)
    nodes = pd.DataFrame(sorted(g.labels.items()), columns=NODE_COLUMNS)
    write_tsv(nodes, nodes_path)

    edge_rows = sorted(g.iter_edges())
    if g.edge_labels:
        edges = pd.DataFrame([(s, d, g.edge_label(s, d) or '') for s, d in edge_rows], columns=EDGE_COLUMNS)
    else:
        edges = pd.DataFrame(edge_rows, columns=EDGE_COLUMNS[:2])
    write_tsv(edges, edges_path)


def load_query(query_path):
    """Reads a QueryGraph from the JSON query format. validate_query() is not run here.

    Returns
    -------
    QueryGraph
    """
    try:
        with open(query_path, encoding='utf-8') as f:
            doc = json.load(f)
    except OSError as e:
        raise QueryFormatError('cannot read file (%s)' % (e.strerror or e), query_path)
    except UnicodeDecodeError as e:
        raise QueryFormatError('not valid UTF-8 (%s)' % e.reason, query_path)
    except json.JSONDecodeError as e:
        raise QueryFormatError('invalid JSON: %s' % e.msg, query_path, e.lineno)
    return query_from_dict(doc, source=query_path)


def query_from_dict(doc, source=None):
    """Builds a QueryGraph from an already parsed query document."""
    if not isinstance(doc, dict) or not isinstance(doc.get('nodes'), list) or not isinstance(doc.get('edges', []),
                                                                                              list):
        raise QueryFormatError('query must be an object with a "nodes" list and an "edges" list', source)

    node_records = []
    for i, node in enumerate(doc['nodes']):
        if not isinstance(node, dict) or not all(k in node for k in ('id', 'label', 'category')):
            raise QueryFormatError('node %d needs "id", "label" and "category"' % i, source)
        try:
            category = Category.parse(node['category'])
        except ValueError as e:
            raise QueryFormatError('node %s: %s' % (node['id'], e), source)
        node_records.append((node['id'], node['label'], category))

    edge_records = []
    for i, edge in enumerate(doc.get('edges', [])):
        if not isinstance(edge, (list, tuple)) or len(edge) != 2:
            raise QueryFormatError('edge %d must be a [src, dst] pair' % i, source)
        edge_records.append(tuple(edge))

    try:
        return build_query(node_records, edge_records)
    except GraphBuildError as e:
        raise QueryFormatError(str(e), source)


def query_to_dict(q):
    return {'nodes': [{'id': n, 'label': q.label(n), 'category': q.category(n).value} for n in sorted(q.nodes)],
            'edges': [[s, d] for s, d in sorted(q.iter_edges())]}


def save_query(q, path):
    _makedirs_for(path)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(query_to_dict(q), f, indent=2, ensure_ascii=False)
        f.write('\n')


@dataclass
class GraphStats(object):
    """
    Node and edge counts of a graph.

    label_counts: label (or kind) -> number of nodes
    edge_counts: (source label, target label) -> number of edges
    """
    total_nodes: int = 0
    total_edges: int = 0
    label_counts: dict = field(default_factory=dict)
    edge_counts: dict = field(default_factory=dict)


def compute_stats(g, kinds=None, other_kind='other'):
    """Counts nodes per label and edges per (source label, target label).

    Parameters
    ----------
    g: LabeledGraph
    kinds: iterable of str
        If given, only these labels are reported as themselves and every other label is counted under other_kind.
        Useful when each tag string is its own label but a per-type table is wanted.
    other_kind: str
        Name for the collapsed labels.

    Returns
    -------
    GraphStats
    """
    labels = pd.Series(dict(g.labels), dtype=object)
    if kinds is not None:
        kinds = set(kinds)
        labels = labels.where(labels.isin(kinds), other_kind)

    label_counts = {}
    if len(labels):
        label_counts = {k: int(v) for k, v in labels.value_counts().sort_index().items()}

    edge_counts = {}
    if g.num_edges:
        edges = pd.DataFrame(list(g.iter_edges()), columns=['src', 'dst'])
        edges['src'] = edges['src'].map(labels)
        edges['dst'] = edges['dst'].map(labels)
        sizes = edges.groupby(['src', 'dst']).size().sort_index()
        edge_counts = {(s, d): int(n) for (s, d), n in sizes.items()}

    return GraphStats(total_nodes=g.num_nodes, total_edges=g.num_edges, label_counts=label_counts,
                      edge_counts=edge_counts)


def stats_to_dict(stats):
    return {'total_nodes': stats.total_nodes,
            'total_edges': stats.total_edges,
            'nodes_per_label': dict(sorted(stats.label_counts.items())),
            'edges_per_label_pair': [{'source': s, 'target': d, 'count': n}
                                     for (s, d), n in sorted(stats.edge_counts.items())]}


def render_stats(stats):
    """Aligned two column table in the layout of a dataset characteristics table."""
    rows = [('Total Nodes', stats.total_nodes)]
    rows += [('  Number of %s' % label, n) for label, n in sorted(stats.label_counts.items())]
    rows += [('Total Edges', stats.total_edges)]
    rows += [('  Number of links from %s to %s' % (s, d), n) for (s, d), n in sorted(stats.edge_counts.items())]
    df = pd.DataFrame(rows, columns=['Characteristics', 'Value'])
    df['Value'] = df['Value'].map('{:,}'.format)
    return df.to_string(index=False, justify='left')
