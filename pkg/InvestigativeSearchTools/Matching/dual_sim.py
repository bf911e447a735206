"""
Dual simulation. initial_candidates() gives every query node the data nodes carrying its label, and dual_refine()
shrinks those candidate sets to the maximum relation in which every query edge is witnessed in both directions.
"""
import logging
from collections import deque

log = logging.getLogger(__name__)


class MatchRelation(object):
    """
    A set of (query node, data node) pairs, stored as one sim set per query node.

    Query nodes without matches may be present with an empty set or missing altogether; both mean the same thing, so
    equality only looks at the pairs.
    """

    def __init__(self, sim=None):
        sim = {} if sim is None else sim
        self.sim = {u: frozenset(vs) for u, vs in sim.items()}

    @classmethod
    def empty(cls, query_nodes=()):
        return cls({u: () for u in query_nodes})

    @classmethod
    def from_pairs(cls, pairs, query_nodes=()):
        sim = {u: set() for u in query_nodes}
        for u, v in pairs:
            sim.setdefault(u, set()).add(v)
        return cls(sim)

    def matches(self, u):
        return self.sim.get(u, frozenset())

    def pairs(self):
        return frozenset((u, v) for u, vs in self.sim.items() for v in vs)

    def __iter__(self):
        return iter(sorted(self.pairs()))

    def __len__(self):
        return sum(len(vs) for vs in self.sim.values())

    def __contains__(self, pair):
        u, v = pair
        return v in self.sim.get(u, ())

    def is_empty(self):
        return len(self) == 0

    def data_nodes(self):
        nodes = set()
        for vs in self.sim.values():
            nodes.update(vs)
        return nodes

    def union(self, other):
        keys = set(self.sim) | set(other.sim)
        return MatchRelation({u: self.matches(u) | other.matches(u) for u in keys})

    __or__ = union

    def issubset(self, other):
        return all(vs <= other.matches(u) for u, vs in self.sim.items())

    __le__ = issubset

    def __eq__(self, other):
        if not isinstance(other, MatchRelation):
            return NotImplemented
        return self.pairs() == other.pairs()

    __hash__ = None

    def to_dict(self):
        """Plain {query node: sorted data nodes} dictionary, handy for JSON output."""
        return {u: sorted(self.sim[u]) for u in sorted(self.sim)}

    def __repr__(self):
        return 'MatchRelation(%d pairs over %d query nodes)' % (len(self), len(self.sim))


def initial_candidates(q, g):
    """Every data node whose label equals the query node's label.

    Parameters
    ----------
    q: QueryGraph
    g: LabeledGraph

    Returns
    -------
    MatchRelation
    """
    return MatchRelation({u: g.nodes_with_label(q.label(u)) for u in q.nodes})


def dual_refine(q, g, history=None):
    """Computes the maximum dual simulation relation of q in g.

    A pair (u, v) is kept only if every query edge (u, u') has a data edge (v, v') with v' still matching u', and every
    query edge (u', u) has a data edge (v', v) with v' still matching u'. As soon as some query node loses all of its
    candidates the whole relation is empty.

    Parameters
    ----------
    q: QueryGraph
    g: LabeledGraph
    history: list
        If given, the total number of remaining pairs is appended after every refinement step that removed something.

    Returns
    -------
    MatchRelation
    """
    query_nodes = sorted(q.nodes)
    sim = {u: set(g.nodes_with_label(q.label(u))) for u in query_nodes}
    if any(not vs for vs in sim.values()):
        return MatchRelation.empty(query_nodes)

    # every query node starts dirty so each edge constraint is checked at least once
    pending = deque(query_nodes)
    queued = set(query_nodes)
    n_steps = 0
    while pending:
        u = pending.popleft()
        queued.discard(u)
        sim_u = sim[u]
        changed = []

        # parents of u need a successor in sim(u)
        for parent in q.predecessors(u):
            sim_p = sim[parent]
            dropped = [v for v in sim_p if g.successors(v).isdisjoint(sim_u)]
            if dropped:
                sim_p.difference_update(dropped)
                changed.append(parent)

        # children of u need a predecessor in sim(u)
        for child in q.successors(u):
            sim_c = sim[child]
            dropped = [v for v in sim_c if g.predecessors(v).isdisjoint(sim_u)]
            if dropped:
                sim_c.difference_update(dropped)
                changed.append(child)

        if changed:
            n_steps += 1
            if history is not None:
                history.append(sum(len(vs) for vs in sim.values()))
            for w in changed:
                if not sim[w]:
                    log.debug('dual_refine: sim(%s) emptied after %d steps', w, n_steps)
                    return MatchRelation.empty(query_nodes)
                if w not in queued:
                    pending.append(w)
                    queued.add(w)

    log.debug('dual_refine: fixpoint after %d steps, %d pairs', n_steps, sum(len(vs) for vs in sim.values()))
    return MatchRelation(sim)
