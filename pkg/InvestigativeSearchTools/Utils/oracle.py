"""
Brute force reference implementations used to cross-check the matching engine. They work on networkx copies of the
graphs and share no traversal code with InvestigativeSearchTools.Matching.
"""
import logging
import random

from tqdm import tqdm

from InvestigativeSearchTools.exceptions import OracleGuardError
from InvestigativeSearchTools.graph import Category
from InvestigativeSearchTools.Matching.dual_sim import MatchRelation

log = logging.getLogger(__name__)

MAX_QUERY_NODES = 8
MAX_DATA_NODES = 64


def _guard(q, g):
    if q.num_nodes > MAX_QUERY_NODES or g.num_nodes > MAX_DATA_NODES:
        raise OracleGuardError('oracle limited to %d query nodes and %d data nodes, got %d and %d'
                               % (MAX_QUERY_NODES, MAX_DATA_NODES, q.num_nodes, g.num_nodes))


def naive_dual_sim(q, g, seed=0, guard=True):
    """
    Maximum dual simulation by repeated single pair deletion. Starts from every label compatible pair and, while some
    pair violates a forward or backward edge obligation, deletes one violating pair picked at random (seeded). Returns
    the empty relation if some query node ends up with no match.

    Returns
    -------
    MatchRelation
    """
    if guard:
        _guard(q, g)
    qx = q.graph.to_networkx()
    gx = g.to_networkx()
    rng = random.Random(seed)

    pairs = {(u, v) for u in qx.nodes for v in gx.nodes if qx.nodes[u]['label'] == gx.nodes[v]['label']}

    def violates(u, v):
        for u_child in qx.successors(u):
            if not any((u_child, v_child) in pairs for v_child in gx.successors(v)):
                return True
        for u_parent in qx.predecessors(u):
            if not any((u_parent, v_parent) in pairs for v_parent in gx.predecessors(v)):
                return True
        return False

    while True:
        bad = sorted(p for p in pairs if violates(*p))
        if not bad:
            break
        pairs.discard(rng.choice(bad))

    matched_query_nodes = {u for u, _ in pairs}
    if any(u not in matched_query_nodes for u in qx.nodes):
        return MatchRelation.empty(qx.nodes)
    return MatchRelation.from_pairs(pairs, qx.nodes)


def _all_paths(nx_graph, start, max_len):
    """Every simple directed path (tuple of distinct nodes) from start with 0..max_len edges."""
    paths = []
    stack = [(start,)]
    while stack:
        path = stack.pop()
        paths.append(path)
        if len(path) - 1 < max_len:
            for nxt in nx_graph.successors(path[-1]):
                if nxt not in path:
                    stack.append(path + (nxt,))
    return paths


def exhaustive_partial_search(q, g, hop_bound=2, guard=True, progress=False):
    """
    Relevant sets by full enumeration: for every data node with a QF query node's label, pair every simple data path
    of length <= hop_bound from it with every simple query path of the same length from the QF node and keep the label
    mirrored ones. An anchor survives iff some member's query node is IND or RF.

    Parameters
    ----------
    q: QueryGraph
    g: LabeledGraph
    hop_bound: int
    guard: bool
        Enforce the small instance size limit. Pass False for explicitly requested large runs.
    progress: bool
        tqdm progress bar over the anchors.

    Returns
    -------
    dict
        surviving anchor (u, v) -> {(u', v'): witness data path}, anchors sorted. The witness is the lexicographically
        smallest (data path, query path) among the shortest mirrored paths.
    """
    if guard:
        _guard(q, g)
    qx = q.graph.to_networkx()
    gx = g.to_networkx()

    anchors = []
    for u in sorted(n for n in qx.nodes if q.category(n) == Category.QF):
        anchors += [(u, v) for v in sorted(gx.nodes) if gx.nodes[v]['label'] == qx.nodes[u]['label']]

    survivors = {}
    for u, v in tqdm(anchors, disable=not progress, desc='exhaustive search'):
        query_paths = [w for w in _all_paths(qx, u, hop_bound) if len(w) > 1]
        data_paths = {}
        for w in _all_paths(gx, v, hop_bound):
            data_paths.setdefault(len(w), []).append(w)

        best = {}
        for qw in query_paths:
            for dw in data_paths.get(len(qw), []):
                if any(qx.nodes[a]['label'] != gx.nodes[b]['label'] for a, b in zip(qw, dw)):
                    continue
                member = (qw[-1], dw[-1])
                if member[0] == u:
                    continue
                cand = (len(dw), dw, qw)
                if member not in best or cand < best[member]:
                    best[member] = cand

        if any(q.category(m[0]) in (Category.IND, Category.RF) for m in best):
            survivors[(u, v)] = {m: c[1] for m, c in best.items()}
    return survivors


def rank_exhaustive(q, survivors, k):
    """
    Ranks exhaustive_partial_search output red flags first, then by relevant set size, then by data node and QF node
    ids.

    Returns
    -------
    list of (anchor, has_red_flag, relevant_size)
    """
    rows = []
    for anchor, members in survivors.items():
        has_rf = any(q.category(m[0]) == Category.RF for m in members)
        rows.append((anchor, has_rf, len(members)))
    rows.sort(key=lambda r: (0 if r[1] else 1, -r[2], r[0][1], r[0][0]))
    return rows[:k]
