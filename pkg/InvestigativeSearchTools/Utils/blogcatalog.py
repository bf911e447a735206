"""
One-shot converter from a raw BlogCatalog dump to the generic node/edge TSVs.

The raw directory must hold four two column relations (tab separated by default, any file extension):

    id_userid       person id -> user id
    userid_userid   user id -> user id (friendship, directed)
    userid_weblog   user id -> weblog id
    weblog_tag      weblog id -> tag string

Persons are labeled 'person', user ids 'userid', weblogs 'weblog', and every tag is labeled with its own tag string,
so a query can ask for a specific tag such as 'windows 7'. Each distinct tag string is one node.
"""
import csv
import logging
import os
from glob import glob

import pandas as pd

from InvestigativeSearchTools.exceptions import GraphFormatError
from InvestigativeSearchTools.graph import FIELD_BREAKS
from InvestigativeSearchTools.Utils import graph_io

log = logging.getLogger(__name__)

# relation -> (source kind, target kind)
RELATIONS = {'id_userid': ('person', 'userid'),
             'userid_userid': ('userid', 'userid'),
             'userid_weblog': ('userid', 'weblog'),
             'weblog_tag': ('weblog', 'tag')}
ID_PREFIX = {'person': 'i', 'userid': 'u', 'weblog': 'w', 'tag': 't:'}
BLOGCATALOG_KINDS = ('person', 'userid', 'weblog')


def _find_relation_file(raw_dir, name):
    hits = sorted(glob(os.path.join(raw_dir, name + '.*'))) + sorted(glob(os.path.join(raw_dir, name)))
    if not hits:
        raise GraphFormatError('missing %s relation file' % name, raw_dir)
    return hits[0]


def _node_ids(values, kind):
    prefix = ID_PREFIX[kind]
    values = values.str.strip()
    return values.where(values.str.startswith(prefix), prefix + values)


def convert_blogcatalog(raw_dir, out_dir, sep='\t'):
    """Converts the raw relations in raw_dir into nodes.tsv and edges.tsv in out_dir.

    Parameters
    ----------
    raw_dir: str
        Directory with the four relation files.
    out_dir: str
        Created if missing.
    sep: str
        Field separator of the raw files.

    Returns
    -------
    dict
        {'nodes': path, 'edges': path, 'num_nodes': int, 'num_edges': int}
    """
    node_frames, edge_frames = [], []
    for name, (src_kind, dst_kind) in RELATIONS.items():
        path = _find_relation_file(raw_dir, name)
        try:
            df = pd.read_csv(path, sep=sep, header=None, names=['src', 'dst'], dtype=str, usecols=[0, 1],
                             quoting=csv.QUOTE_NONE, keep_default_na=False, encoding='utf-8')
        except pd.errors.EmptyDataError:
            df = pd.DataFrame(columns=['src', 'dst'], dtype=str)
        except (OSError, pd.errors.ParserError, ValueError) as e:
            raise GraphFormatError('cannot parse relation file: %s' % e, path)
        # comment lines only; a '#' inside a tag such as 'c#' is data
        df = df[(df['src'].str.strip().str.len() > 0) & (df['dst'].str.strip().str.len() > 0)
                & ~df['src'].str.startswith('#')]
        broken = df.index[df['src'].str.contains(FIELD_BREAKS) | df['dst'].str.contains(FIELD_BREAKS)]
        if len(broken):
            raise GraphFormatError('field with a tab or line break: %r' % df.loc[broken[0]].tolist(), path)
        log.info('%s: %d rows', name, len(df))

        src = _node_ids(df['src'], src_kind)
        dst = _node_ids(df['dst'], dst_kind)
        edge_frames.append(pd.DataFrame({'src': src.values, 'dst': dst.values}))

        node_frames.append(pd.DataFrame({'id': src.values, 'label': src_kind}))
        if dst_kind == 'tag':
            node_frames.append(pd.DataFrame({'id': dst.values, 'label': df['dst'].str.strip().values}))
        else:
            node_frames.append(pd.DataFrame({'id': dst.values, 'label': dst_kind}))

    nodes = pd.concat(node_frames, ignore_index=True).drop_duplicates().sort_values(['id', 'label'])
    conflicting = nodes['id'][nodes['id'].duplicated()]
    if len(conflicting):
        raise GraphFormatError('node %s appears with more than one type' % conflicting.iloc[0], raw_dir)
    edges = pd.concat(edge_frames, ignore_index=True).drop_duplicates().sort_values(['src', 'dst'])

    if not os.path.exists(out_dir):
        os.makedirs(out_dir)
    nodes_path = os.path.join(out_dir, 'nodes.tsv')
    edges_path = os.path.join(out_dir, 'edges.tsv')
    graph_io.write_tsv(nodes, nodes_path)
    graph_io.write_tsv(edges, edges_path)
    log.info('wrote %d nodes to %s and %d edges to %s', len(nodes), nodes_path, len(edges), edges_path)
    return {'nodes': nodes_path, 'edges': edges_path, 'num_nodes': int(len(nodes)), 'num_edges': int(len(edges))}
