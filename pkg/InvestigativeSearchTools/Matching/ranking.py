"""
Turns an investigative simulation result into one PersonMatch per surviving anchor, ranks them red flags first and
then by relevant set size, and writes reports.
"""
import io
import json
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction

import pandas as pd

from InvestigativeSearchTools.exceptions import PreconditionError, GraphFormatError

REPORT_FORMATS = ('json', 'tsv')
RANK_KEYS = ('size', 'jaccard')
TSV_COLUMNS = ['anchor', 'full_match', 'has_red_flag', 'relevant_size', 'jaccard', 'matched_query_nodes', 'focus']


@dataclass(frozen=True)
class Subgraph(object):
    nodes: frozenset
    edges: frozenset


@dataclass(frozen=True)
class PersonMatch(object):
    """
    One ranked result, centred on a single QF anchor.

    anchor: (QF query node, data node)
    full_match: the anchor is in S_D and its relevant set covers every query node within the hop bound
    has_red_flag: some relevant set member matches an RF query node
    relevant_size: |R(u, v) & S_InvSim|, counted in (query node, data node) pairs
    matched_query_nodes: the QF node plus the query nodes of every member
    jaccard: node coverage of the query, see jaccard_similarity()
    subgraph: nodes and edges of the witness paths
    """
    anchor: tuple
    full_match: bool
    has_red_flag: bool
    relevant_size: int
    matched_query_nodes: frozenset
    jaccard: Fraction
    subgraph: Subgraph

    @property
    def focus(self):
        return self.anchor[0]

    @property
    def data_node(self):
        return self.anchor[1]


def _node_jaccard(matched, query_nodes):
    matched = set(matched)
    query_nodes = set(query_nodes)
    union = matched | query_nodes
    if not matched or not union:
        return Fraction(0)
    return Fraction(len(matched & query_nodes), len(union))


def jaccard_similarity(m, q):
    """
    Jaccard similarity between the query nodes a match covers and all query nodes. Since every matched node is a query
    node this is the fraction of the query that was matched.

    Returns
    -------
    fractions.Fraction
    """
    return _node_jaccard(m.matched_query_nodes, q.nodes)


def group_results(q, g, invsim_output):
    """Builds one PersonMatch per surviving anchor.

    Parameters
    ----------
    q: QueryGraph
    g: LabeledGraph
    invsim_output: InvSimResult

    Returns
    -------
    list of PersonMatch, in anchor order
    """
    relation = invsim_output.relation
    matches = []
    for anchor, rs in invsim_output.relevant_sets.items():
        u, v = anchor
        members = [m for m in rs.members if m in relation]
        matched = frozenset([u] + [m[0] for m in members])

        within_reach = set(q.reachable_within(u, invsim_output.hop_bound))
        full = within_reach <= matched and anchor in invsim_output.dual

        nodes, edges = {v}, set()
        for member in members:
            path = rs.paths[member]
            nodes.update(path)
            edges.update(zip(path[:-1], path[1:]))

        matches.append(PersonMatch(anchor=anchor,
                                   full_match=bool(full),
                                   has_red_flag=rs.has_red_flag(q),
                                   relevant_size=len(members),
                                   matched_query_nodes=matched,
                                   jaccard=_node_jaccard(matched, q.nodes),
                                   subgraph=Subgraph(frozenset(nodes), frozenset(edges))))
    return matches


def rank_key(m, rank_by='size'):
    """Sort key: red flags first, then larger relevant sets (or higher jaccard), then anchor ids ascending."""
    if rank_by == 'size':
        return (not m.has_red_flag, -m.relevant_size, m.data_node, m.focus)
    elif rank_by == 'jaccard':
        return (not m.has_red_flag, -m.jaccard, -m.relevant_size, m.data_node, m.focus)
    raise PreconditionError('unknown rank key %r (allowed: %s)' % (rank_by, ', '.join(RANK_KEYS)))


def rank_top_k(matches, k, rank_by='size'):
    """Returns the k best matches.

    Parameters
    ----------
    matches: list of PersonMatch
    k: int
        Positive number of results to keep.
    rank_by: str
        Secondary key after red flag presence: 'size' (relevant set size) or 'jaccard'.

    Returns
    -------
    list of PersonMatch, at most k long
    """
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise PreconditionError('k must be a positive integer, got %r' % (k,))
    return sorted(matches, key=lambda m: rank_key(m, rank_by))[:k]


def _to_record(m):
    return OrderedDict([
        ('anchor', m.data_node),
        ('full_match', m.full_match),
        ('has_red_flag', m.has_red_flag),
        ('relevant_size', m.relevant_size),
        ('jaccard', float(m.jaccard)),
        ('matched_query_nodes', sorted(m.matched_query_nodes)),
        ('subgraph', OrderedDict([('nodes', sorted(m.subgraph.nodes)),
                                  ('edges', [list(e) for e in sorted(m.subgraph.edges)])])),
        ('focus', m.focus),
    ])


def serialize_report(ranked, fmt='json'):
    """Writes ranked matches as a JSON array or as TSV rows (without the subgraph).

    Returns
    -------
    bytes
        UTF-8 report ending in a newline.
    """
    if fmt == 'json':
        return (json.dumps([_to_record(m) for m in ranked], indent=2, ensure_ascii=False) + '\n').encode('utf-8')

    elif fmt == 'tsv':
        rows = []
        for m in ranked:
            rec = _to_record(m)
            rows.append([rec['anchor'],
                         'true' if rec['full_match'] else 'false',
                         'true' if rec['has_red_flag'] else 'false',
                         str(rec['relevant_size']),
                         repr(rec['jaccard']),
                         ','.join(rec['matched_query_nodes']),
                         rec['focus']])
        df = pd.DataFrame(rows, columns=TSV_COLUMNS)
        return df.to_csv(sep='\t', index=False, lineterminator='\n').encode('utf-8')

    raise PreconditionError('unknown report format %r (allowed: %s)' % (fmt, ', '.join(REPORT_FORMATS)))


def _parse_bool(value):
    if value in (True, 'true'):
        return True
    if value in (False, 'false'):
        return False
    raise GraphFormatError('not a boolean: %r' % (value,))


def parse_report(payload, fmt='json', max_denominator=10 ** 6):
    """
    Reads a report written by serialize_report back into a list of dictionaries. jaccard comes back as an exact
    Fraction (recovered with limit_denominator) and matched_query_nodes as a sorted list.
    """
    if isinstance(payload, bytes):
        payload = payload.decode('utf-8')

    if fmt == 'json':
        records = json.loads(payload)
    elif fmt == 'tsv':
        df = pd.read_csv(io.StringIO(payload), sep='\t', dtype=str, keep_default_na=False)
        records = df.to_dict(orient='records')
        for rec in records:
            rec['matched_query_nodes'] = rec['matched_query_nodes'].split(',') if rec['matched_query_nodes'] else []
    else:
        raise PreconditionError('unknown report format %r (allowed: %s)' % (fmt, ', '.join(REPORT_FORMATS)))

    out = []
    for rec in records:
        rec = dict(rec)
        rec['full_match'] = _parse_bool(rec['full_match'])
        rec['has_red_flag'] = _parse_bool(rec['has_red_flag'])
        rec['relevant_size'] = int(rec['relevant_size'])
        rec['jaccard'] = Fraction(float(rec['jaccard'])).limit_denominator(max_denominator)
        rec['matched_query_nodes'] = sorted(rec['matched_query_nodes'])
        out.append(rec)
    return out
