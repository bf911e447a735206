"""
Deterministic synthetic graphs for testing and benchmarking.

A GenSpec describes background layers of labeled nodes, the links between them, and how many copies of the query
pattern to plant. Planted copies are isolated from the background, so their relevant sets are known when they are
created and are written out as ground truth.

GenSpec JSON
------------
{
  "seed": 1,
  "persons": 4,                     # background nodes carrying the QF query node's label
  "query": "query.json",            # path relative to the spec file, or an inline query document
  "hop_bound": 2,
  "layers": [{"label": "account", "category": "IIRA", "count": 6,
              "vocabulary": [], "distinct_labels": false}],
  "links": [{"source": "person", "target": "account", "count": 5},
            {"source": "account", "target": "radical-ngram", "fanout": [0, 2]},
            {"source": "account", "target": "extremist-ngram", "probability": 0.1}],
  "planted_full": 1, "planted_partial": 2, "planted_innocuous": 1
}
"""
import json
import logging
import os
import re
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from InvestigativeSearchTools.exceptions import GeneratorSpecError, QueryFormatError
from InvestigativeSearchTools.graph import Category, INDICATOR_CATEGORIES, build_graph
from InvestigativeSearchTools.Utils import graph_io

log = logging.getLogger(__name__)


@dataclass
class LayerSpec(object):
    label: str
    category: str = 'NC'
    count: int = 0
    vocabulary: list = field(default_factory=list)
    distinct_labels: bool = False


@dataclass
class LinkSpec(object):
    source: str
    target: str
    count: int = None
    fanout: tuple = None
    probability: float = None


@dataclass
class GenSpec(object):
    """
    Parameters of generate_graph(). Identical specs always give identical graphs.
    """
    seed: int
    persons: int
    query: object
    layers: list = field(default_factory=list)
    links: list = field(default_factory=list)
    planted_full: int = 0
    planted_partial: int = 0
    planted_innocuous: int = 0
    hop_bound: int = 2

    @property
    def person_label(self):
        qf = self.query.qf_nodes
        if not qf:
            raise GeneratorSpecError('the query has no QF node')
        return self.query.label(qf[0])


def gen_spec_from_dict(doc, base_dir='.'):
    """Builds a GenSpec from a parsed JSON document; a string "query" is read relative to base_dir."""
    if not isinstance(doc, dict):
        raise GeneratorSpecError('generator spec must be a JSON object')
    for key in ('seed', 'persons', 'query'):
        if key not in doc:
            raise GeneratorSpecError('generator spec needs "%s"' % key)

    query = doc['query']
    try:
        if isinstance(query, str):
            query = graph_io.load_query(os.path.join(base_dir, query))
        else:
            query = graph_io.query_from_dict(query)
    except QueryFormatError as e:
        raise GeneratorSpecError('bad query in generator spec: %s' % e)

    try:
        layers = [LayerSpec(**layer) for layer in doc.get('layers', [])]
        links = [LinkSpec(**link) for link in doc.get('links', [])]
    except TypeError as e:
        raise GeneratorSpecError('bad layer or link entry: %s' % e)

    spec = GenSpec(seed=int(doc['seed']), persons=int(doc['persons']), query=query, layers=layers, links=links,
                   planted_full=int(doc.get('planted_full', 0)), planted_partial=int(doc.get('planted_partial', 0)),
                   planted_innocuous=int(doc.get('planted_innocuous', 0)), hop_bound=int(doc.get('hop_bound', 2)))
    _check_spec(spec)
    return spec


def load_gen_spec(path):
    try:
        with open(path, encoding='utf-8') as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise GeneratorSpecError('cannot read generator spec %s: %s' % (path, e))
    except UnicodeDecodeError as e:
        raise GeneratorSpecError('generator spec %s is not valid UTF-8 (%s)' % (path, e.reason))
    return gen_spec_from_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))


def _check_spec(spec):
    if spec.persons < 0 or spec.hop_bound < 1:
        raise GeneratorSpecError('persons must be >= 0 and hop_bound >= 1')
    if min(spec.planted_full, spec.planted_partial, spec.planted_innocuous) < 0:
        raise GeneratorSpecError('planted counts must be >= 0')
    kinds = [spec.person_label] + [layer.label for layer in spec.layers]
    if len(set(kinds)) != len(kinds):
        raise GeneratorSpecError('layer labels must be distinct and differ from the QF label %r' % spec.person_label)
    slugs = [_slug(k) for k in kinds]
    if len(set(slugs)) != len(slugs):
        raise GeneratorSpecError('layer labels collide once turned into node id prefixes: %s' % slugs)
    for layer in spec.layers:
        if layer.count < 0 or len(layer.vocabulary) > layer.count:
            raise GeneratorSpecError('layer %s: count must be >= 0 and cover its vocabulary' % layer.label)
        Category.parse(layer.category)
    for link in spec.links:
        if link.source not in kinds or link.target not in kinds:
            raise GeneratorSpecError('link %s -> %s names an unknown layer' % (link.source, link.target))
        modes = [m for m in (link.count, link.fanout, link.probability) if m is not None]
        if len(modes) != 1:
            raise GeneratorSpecError('link %s -> %s needs exactly one of count, fanout, probability'
                                     % (link.source, link.target))
    planted = spec.planted_full + spec.planted_partial + spec.planted_innocuous
    if planted:
        labels = [spec.query.label(n) for n in spec.query.nodes]
        if len(set(labels)) != len(labels):
            raise GeneratorSpecError('planting needs a query whose node labels are all distinct')


def _slug(label):
    return re.sub(r'\W+', '_', label).strip('_') or 'n'


def _sample_count_edges(rng, n_src, n_tgt, count, same_kind):
    """Exactly `count` distinct (src, tgt) index pairs. Every target gets a parent first when count allows it."""
    capacity = n_src * n_tgt - (min(n_src, n_tgt) if same_kind else 0)
    if count > capacity:
        raise GeneratorSpecError('cannot place %d distinct edges between layers of %d and %d nodes'
                                 % (count, n_src, n_tgt))
    if count == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)

    codes = np.empty(0, dtype=np.int64)
    if not same_kind and count >= n_tgt:
        parents = rng.integers(0, n_src, size=n_tgt, dtype=np.int64)
        codes = parents * n_tgt + np.arange(n_tgt, dtype=np.int64)

    while len(codes) < count:
        need = count - len(codes)
        batch = rng.integers(0, n_src * n_tgt, size=int(need * 1.1) + 16, dtype=np.int64)
        if same_kind:
            batch = batch[(batch // n_tgt) != (batch % n_tgt)]
        merged = np.concatenate([codes, batch])
        _, first = np.unique(merged, return_index=True)
        codes = merged[np.sort(first)][:count]
    return codes // n_tgt, codes % n_tgt


def _sample_link(rng, link, n_src, n_tgt, same_kind):
    if n_src == 0 or n_tgt == 0:
        if link.count:
            raise GeneratorSpecError('link %s -> %s has an empty endpoint layer' % (link.source, link.target))
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)

    if link.count is not None:
        return _sample_count_edges(rng, n_src, n_tgt, int(link.count), same_kind)

    elif link.fanout is not None:
        lo, hi = int(link.fanout[0]), int(link.fanout[1])
        if lo < 0 or hi < lo:
            raise GeneratorSpecError('bad fanout %s' % (link.fanout,))
        srcs, tgts = [], []
        sizes = rng.integers(lo, hi + 1, size=n_src)
        for s, k in enumerate(sizes):
            pool = n_tgt - 1 if same_kind else n_tgt
            k = min(int(k), pool)
            if k == 0:
                continue
            picks = rng.choice(pool, size=k, replace=False)
            if same_kind:
                picks = picks + (picks >= s)
            srcs.append(np.full(k, s, dtype=np.int64))
            tgts.append(picks.astype(np.int64))
        if not srcs:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        return np.concatenate(srcs), np.concatenate(tgts)

    p = float(link.probability)
    if not 0 <= p <= 1:
        raise GeneratorSpecError('probability must be in [0, 1], got %r' % p)
    srcs = np.flatnonzero(rng.random(n_src) < p).astype(np.int64)
    tgts = rng.integers(0, n_tgt, size=len(srcs), dtype=np.int64)
    if same_kind and n_tgt > 1:
        clash = tgts == srcs
        tgts[clash] = (tgts[clash] + 1) % n_tgt
    elif same_kind:
        srcs, tgts = srcs[:0], tgts[:0]
    return srcs, tgts


def _background(spec, rng):
    """Node records and edge records of the background graph."""
    layer_ids, node_records = {}, []

    person_label = spec.person_label
    ids = ['%s%d' % (_slug(person_label), i) for i in range(spec.persons)]
    layer_ids[person_label] = ids
    node_records += [(i, person_label) for i in ids]

    for layer in spec.layers:
        prefix = _slug(layer.label)
        ids = ['%s%d' % (prefix, i) for i in range(layer.count)]
        layer_ids[layer.label] = ids
        for i, node_id in enumerate(ids):
            if i < len(layer.vocabulary):
                label = layer.vocabulary[i]
            elif layer.distinct_labels:
                label = '%s-%d' % (layer.label, i)
            else:
                label = layer.label
            node_records.append((node_id, label))

    edge_records = []
    for link in spec.links:
        src_ids, tgt_ids = layer_ids[link.source], layer_ids[link.target]
        srcs, tgts = _sample_link(rng, link, len(src_ids), len(tgt_ids), link.source == link.target)
        edge_records += [(src_ids[s], tgt_ids[t]) for s, t in zip(srcs.tolist(), tgts.tolist())]
        log.debug('link %s -> %s: %d edges', link.source, link.target, len(srcs))
    return node_records, edge_records


def _shortest_query_paths(q, u, hop_bound):
    """Query node -> a shortest path from u (lexicographically smallest predecessor chain), within hop_bound."""
    qx = q.graph.to_networkx()
    dist = nx.single_source_shortest_path_length(qx, u, cutoff=hop_bound)
    paths = {}
    for w in dist:
        if w == u:
            continue
        path = [w]
        while path[-1] != u:
            cur = path[-1]
            path.append(min(p for p in qx.predecessors(cur) if dist.get(p) == dist[cur] - 1))
        paths[w] = tuple(reversed(path))
    return paths


def _plant(q, kept, tag, hop_bound):
    """
    Plants an isolated copy of the subgraph of q induced by `kept`. Returns node records, edge records, and the
    expected relevant set of every QF node in the copy.
    """
    copy_of = {n: '%s_%s' % (tag, n) for n in sorted(kept)}
    node_records = [(copy_of[n], q.label(n)) for n in sorted(kept)]
    edge_records = [(copy_of[s], copy_of[d]) for s, d in sorted(q.iter_edges()) if s in kept and d in kept]

    copy_graph = nx.DiGraph()
    copy_graph.add_nodes_from(copy_of)
    copy_graph.add_edges_from((s, d) for s, d in q.iter_edges() if s in kept and d in kept)

    expected = {}
    for u in sorted(n for n in kept if q.category(n) == Category.QF):
        reach = nx.single_source_shortest_path_length(copy_graph, u, cutoff=hop_bound)
        expected[(u, copy_of[u])] = sorted((w, copy_of[w]) for w, d in reach.items() if d >= 1 and w != u)
    return node_records, edge_records, expected


def generate_graph(spec):
    """Builds the synthetic graph described by spec.

    Returns
    -------
    LabeledGraph, list of dict
        The graph and its ground truth: one entry per planted QF anchor with keys kind ('full', 'partial' or
        'innocuous'), focus, anchor, survives and relevant_set (sorted [query node, data node] pairs).
    """
    _check_spec(spec)
    rng = np.random.default_rng(spec.seed)
    q = spec.query
    node_records, edge_records = _background(spec, rng)

    truth = []

    def record(kind, expected):
        for (u, v), members in expected.items():
            survives = any(q.category(m[0]) in INDICATOR_CATEGORIES for m in members)
            truth.append({'kind': kind, 'focus': u, 'anchor': v, 'survives': survives,
                          'relevant_set': [list(m) for m in members]})

    qf = q.qf_nodes
    for k in range(spec.planted_full):
        nodes, edges, expected = _plant(q, set(q.nodes), 'full%d' % k, spec.hop_bound)
        node_records += nodes
        edge_records += edges
        record('full', expected)

    for k in range(spec.planted_partial + spec.planted_innocuous):
        innocuous = k >= spec.planted_partial
        u = qf[k % len(qf)]
        paths = _shortest_query_paths(q, u, spec.hop_bound)
        if innocuous:
            pool = sorted(w for w, p in paths.items()
                          if all(q.category(n) not in INDICATOR_CATEGORIES for n in p[1:]))
            indicator_pool = []
        else:
            pool = sorted(paths)
            indicator_pool = sorted(w for w in paths if q.category(w) in INDICATOR_CATEGORIES)
        if not pool or (not innocuous and not indicator_pool):
            raise GeneratorSpecError('the query has no %s nodes within %d hops of %s to plant'
                                     % ('innocuous' if innocuous else 'indicator', spec.hop_bound, u))

        # a strict subset when possible, so a partial plant is never the whole reachable pattern
        max_size = max(1, len(pool) - 1)
        size = int(rng.integers(1, max_size + 1))
        chosen = [pool[i] for i in sorted(rng.choice(len(pool), size=size, replace=False).tolist())]
        if indicator_pool and not any(w in indicator_pool for w in chosen):
            chosen[int(rng.integers(0, len(chosen)))] = indicator_pool[int(rng.integers(0, len(indicator_pool)))]

        kept = {u}
        for w in chosen:
            kept.update(paths[w])
        tag = '%s%d' % ('innocuous' if innocuous else 'partial', k)
        nodes, edges, expected = _plant(q, kept, tag, spec.hop_bound)
        node_records += nodes
        edge_records += edges
        record('innocuous' if innocuous else 'partial', expected)

    g = build_graph(node_records, edge_records)
    log.info('generated %d nodes, %d edges, %d planted anchors', g.num_nodes, g.num_edges, len(truth))
    return g, truth


def write_generated(spec, out_dir):
    """
    Generates the graph and writes nodes.tsv, edges.tsv and truth.json to out_dir.

    Returns
    -------
    dict of the written paths
    """
    g, truth = generate_graph(spec)
    if not os.path.exists(out_dir):
        os.makedirs(out_dir)
    paths = {'nodes': os.path.join(out_dir, 'nodes.tsv'),
             'edges': os.path.join(out_dir, 'edges.tsv'),
             'truth': os.path.join(out_dir, 'truth.json')}
    graph_io.save_graph(g, paths['nodes'], paths['edges'])
    with open(paths['truth'], 'w', encoding='utf-8') as f:
        json.dump({'seed': spec.seed, 'hop_bound': spec.hop_bound, 'anchors': truth}, f, indent=2,
                  ensure_ascii=False)
        f.write('\n')
    return paths
