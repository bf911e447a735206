"""
Investigative simulation. Starting from the dual simulation relation, every data node that could play a QF query node
becomes an anchor; anchors whose relevant set holds no IND/RF match are pruned as innocuous, and the remaining ones are
completed into partial matches along their witness paths.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed, effective_n_jobs
from tqdm import tqdm

from InvestigativeSearchTools.exceptions import PreconditionError, QueryValidationError, InvariantViolation
from InvestigativeSearchTools.graph import Category, INDICATOR_CATEGORIES, validate_query
from InvestigativeSearchTools.Matching.dual_sim import MatchRelation, dual_refine
from InvestigativeSearchTools.Matching.par_funcs import mirrored_members, par_relevant_sets

log = logging.getLogger(__name__)

DEFAULT_HOP_BOUND = 2


@dataclass(frozen=True)
class RelevantSet(object):
    """
    The matched descendants of one anchor.

    anchor: (QF query node u, data node v)
    members: frozenset of (u', v') pairs reachable from the anchor by label-mirrored simple paths of
             1..hop_bound edges. No node repeats on either side, so v is never its own member
    paths: member -> witness path in g, from v to v'
    query_paths: member -> the query path mirrored by that witness path, from u to u'
    """
    anchor: tuple
    members: frozenset
    paths: dict = field(default_factory=dict, compare=False)
    query_paths: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.members)

    def has_indicator(self, q):
        return any(q.category(m[0]) in INDICATOR_CATEGORIES for m in self.members)

    def has_red_flag(self, q):
        return any(q.category(m[0]) == Category.RF for m in self.members)


def _relevant_set_from_members(anchor, members):
    return RelevantSet(anchor=anchor,
                       members=frozenset(members),
                       paths={m: p[0] for m, p in members.items()},
                       query_paths={m: p[1] for m, p in members.items()})


def _check_hop_bound(hop_bound):
    if not isinstance(hop_bound, (int, np.integer)) or isinstance(hop_bound, bool) or hop_bound < 1:
        raise PreconditionError('hop_bound must be a positive integer, got %r' % (hop_bound,))


def relevant_set(q, g, u, v, hop_bound=DEFAULT_HOP_BOUND):
    """Computes R(u, v), the relevant set of data node v with respect to QF query node u.

    Parameters
    ----------
    q: QueryGraph
    g: LabeledGraph
    u: str
        A query node of category QF.
    v: str
        A data node with the same label as u.
    hop_bound: int
        Maximum path length, in edges.

    Returns
    -------
    RelevantSet
    """
    _check_hop_bound(hop_bound)
    if u not in q:
        raise PreconditionError('%s is not a query node' % u)
    if v not in g:
        raise PreconditionError('%s is not a data node' % v)
    if q.category(u) != Category.QF:
        raise PreconditionError('query node %s has category %s, not QF' % (u, q.category(u).value))
    if q.label(u) != g.label(v):
        raise PreconditionError('label mismatch: %s is %r but %s is %r' % (u, q.label(u), v, g.label(v)))
    return _relevant_set_from_members((u, v), mirrored_members(q, g, u, v, hop_bound))


def qf_anchors(q, g):
    """Every (QF query node, data node) pair with equal labels, sorted."""
    return sorted((u, v) for u in q.qf_nodes for v in g.nodes_with_label(q.label(u)))


def compute_relevant_sets(q, g, anchors, hop_bound=DEFAULT_HOP_BOUND, n_jobs=1, progress=False):
    """
    Relevant sets for many anchors. With n_jobs != 1 the anchors are split into chunks that are processed by a joblib
    thread pool; the output does not depend on n_jobs.

    Returns
    -------
    dict
        anchor -> RelevantSet, in sorted anchor order
    """
    _check_hop_bound(hop_bound)
    anchors = sorted(anchors)
    if not anchors:
        return {}

    n_workers = effective_n_jobs(n_jobs)
    if n_workers == 1:
        raw = [(a, mirrored_members(q, g, a[0], a[1], hop_bound))
               for a in tqdm(anchors, disable=not progress, desc='relevant sets')]
    else:
        # put all the inputs into one list per chunk, parallel functions take a single argument
        n_chunks = min(len(anchors), n_workers * 4)
        chunks = [[anchors[i] for i in inds] for inds in np.array_split(np.arange(len(anchors)), n_chunks)]
        arg_list = [(q, g, chunk, hop_bound) for chunk in chunks]
        res = Parallel(n_jobs=n_workers, prefer='threads')(
            delayed(par_relevant_sets)(info) for info in tqdm(arg_list, disable=not progress, desc='relevant sets'))
        raw = [item for chunk_res in res for item in chunk_res]

    out = {}
    for anchor, members in sorted(raw, key=lambda x: x[0]):
        out[anchor] = _relevant_set_from_members(anchor, members)
    return out


def prune_innocuous(q, g, qf_candidates):
    """Drops the anchors whose relevant set has no IND or RF member.

    Every decision is taken against the full input before anything is removed, so the outcome for one anchor never
    depends on the others or on iteration order.

    Parameters
    ----------
    q: QueryGraph
    g: LabeledGraph
    qf_candidates: dict
        anchor -> RelevantSet

    Returns
    -------
    dict
        The surviving anchor -> RelevantSet entries, in sorted anchor order.
    """
    keep = {anchor: rs.has_indicator(q) for anchor, rs in qf_candidates.items()}
    survivors = {anchor: qf_candidates[anchor] for anchor in sorted(keep) if keep[anchor]}
    log.debug('prune_innocuous: %d of %d anchors survive', len(survivors), len(keep))
    return survivors


def complete_partial(q, g, survivors, s_d):
    """Adds every surviving anchor, its relevant set and the pairs along its witness paths to s_d.

    Parameters
    ----------
    q: QueryGraph
    g: LabeledGraph
    survivors: dict
        anchor -> RelevantSet, as returned by prune_innocuous()
    s_d: MatchRelation
        The dual simulation relation.

    Returns
    -------
    MatchRelation
        S_InvSim
    """
    pairs = set(s_d.pairs())
    for anchor, rs in survivors.items():
        pairs.add(anchor)
        pairs.update(rs.members)
        for member, dpath in rs.paths.items():
            pairs.update(zip(rs.query_paths[member], dpath))
    relation = MatchRelation.from_pairs(pairs, q.nodes)
    bad = label_violations(q, g, relation)
    if bad:
        raise InvariantViolation('completed relation is not label preserving: %s' % sorted(bad)[:5])
    return relation


def label_violations(q, g, relation):
    """Pairs of relation whose query and data labels differ."""
    return {(u, v) for u, v in relation.pairs() if q.label(u) != g.label(v)}


@dataclass
class InvSimResult(object):
    """
    Output of investigative_match().

    relation: S_InvSim
    dual: S_D, the dual simulation relation it was built from
    relevant_sets: surviving anchor -> RelevantSet, sorted by anchor
    pruned: anchors dropped as innocuous, sorted
    hop_bound: the hop bound used
    """
    relation: MatchRelation
    dual: MatchRelation
    relevant_sets: dict
    pruned: list
    hop_bound: int = DEFAULT_HOP_BOUND


def investigative_match(q, g, hop_bound=DEFAULT_HOP_BOUND, n_jobs=1, progress=False):
    """Runs investigative simulation: dual_refine, relevant sets, prune_innocuous, complete_partial.

    Parameters
    ----------
    q: QueryGraph
        Must pass validate_query(q, 'investigative').
    g: LabeledGraph
    hop_bound: int
        Relevant set depth.
    n_jobs: int
        Workers for the per-anchor relevant sets (joblib convention, -1 for all cores).
    progress: bool
        Show a tqdm progress bar on stderr.

    Returns
    -------
    InvSimResult
    """
    _check_hop_bound(hop_bound)
    report = validate_query(q, 'investigative', hop_bound)
    if not report.ok:
        raise QueryValidationError(report)

    s_d = dual_refine(q, g)
    log.info('dual simulation: %d pairs', len(s_d))

    # anchors come from the labels alone; a person need not be in S_D to be a partial match
    anchors = qf_anchors(q, g)
    log.info('%d QF anchors', len(anchors))
    candidates = compute_relevant_sets(q, g, anchors, hop_bound, n_jobs=n_jobs, progress=progress)

    survivors = prune_innocuous(q, g, candidates)
    pruned = sorted(a for a in candidates if a not in survivors)
    relation = complete_partial(q, g, survivors, s_d)
    log.info('investigative simulation: %d surviving anchors, %d pruned, %d pairs', len(survivors), len(pruned),
             len(relation))
    return InvSimResult(relation=relation, dual=s_d, relevant_sets=survivors, pruned=pruned, hop_bound=hop_bound)
