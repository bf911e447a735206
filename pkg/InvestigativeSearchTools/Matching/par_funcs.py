"""
Functions that are run many times (once per QF anchor) and are therefore handed to worker pools. Functions meant for
a pool accept only one input.
"""


def mirrored_members(q, g, u, v, hop_bound):
    """
    Follows directed paths forward from anchor (u, v) in lockstep through q and g, keeping only data nodes whose label
    equals the label of the query node at the same position. Paths are simple on both sides: no data node and no query
    node is visited twice, so v is never its own member.

    Returns
    -------
    dict
        (u', v') -> (data path, query path) for every pair first reached at depth 1..hop_bound with u' != u. The paths
        are the lexicographically smallest (data ids, then query ids) among the shortest mirrored paths.
    """
    # query children of each query node, grouped by label, so a data successor is matched by one dict lookup
    children_by_label = {}

    def _children(qu):
        grouped = children_by_label.get(qu)
        if grouped is None:
            grouped = {}
            for qc in q.successors(qu):
                grouped.setdefault(q.label(qc), []).append(qc)
            children_by_label[qu] = grouped
        return grouped

    members = {}
    frontier = [((v,), (u,))]
    for _ in range(hop_bound):
        nxt = []
        best = {}
        for dpath, qpath in frontier:
            grouped = _children(qpath[-1])
            if not grouped:
                continue
            for gc in g.successors(dpath[-1]):
                if gc in dpath:
                    continue
                for qc in grouped.get(g.label(gc), ()):
                    if qc in qpath:
                        continue
                    cand = (dpath + (gc,), qpath + (qc,))
                    nxt.append(cand)
                    cur = best.get((qc, gc))
                    if cur is None or cand < cur:
                        best[(qc, gc)] = cand
        for pair, paths in best.items():
            if pair[0] != u and pair not in members:
                members[pair] = paths
        if not nxt:
            break
        frontier = nxt
    return members


def par_relevant_sets(info):
    """
    Parallelizable relevant set computation for a chunk of anchors.

    info: four element list. q, g, list of (u, v) anchors, hop_bound.

    returns list of ((u, v), members) with members as returned by mirrored_members()
    """
    q, g, anchors, hop_bound = info
    return [((u, v), mirrored_members(q, g, u, v, hop_bound)) for u, v in anchors]
