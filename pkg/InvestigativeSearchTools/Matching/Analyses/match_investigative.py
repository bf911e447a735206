"""
Investigative simulation of a query in a data graph, grouped per person and ranked into a report. Optionally cross
checks the engine against the brute force oracles.
"""
import logging

from InvestigativeSearchTools.exceptions import ConfigError, InvariantViolation
from InvestigativeSearchTools.Matching.inv_sim import investigative_match
from InvestigativeSearchTools.Matching.match_analysis import MatchAnalysisBase
from InvestigativeSearchTools.Matching.ranking import (REPORT_FORMATS, RANK_KEYS, group_results, rank_top_k,
                                                       serialize_report)
from InvestigativeSearchTools.Utils import oracle

log = logging.getLogger(__name__)


class InvestigativeMatchAnalysis(MatchAnalysisBase):
    """
    Runs load -> validate -> investigative_match -> group -> rank_top_k -> serialize.

    res keys:
        'invsim': InvSimResult
        'matches': every PersonMatch, in anchor order
        'ranked': the top_k PersonMatches, best first
        'report': serialized report (bytes)
        'oracle': only if run_oracle, a dict with 'agreement' ('exact') and the number of anchors compared
    """

    def __init__(self, nodes_path=None, edges_path=None, query_path=None):
        super(InvestigativeMatchAnalysis, self).__init__(nodes_path=nodes_path, edges_path=edges_path,
                                                         query_path=query_path)

        # ranking and output
        self.top_k = 20
        self.rank_by = 'size'
        self.output_format = 'json'

        # compare against exhaustive_partial_search (and naive_dual_sim on small instances)
        self.run_oracle = False

        self.res_str = 'invsim.p'

    def res_params(self):
        params = super(InvestigativeMatchAnalysis, self).res_params()
        params.update({'top_k': self.top_k, 'rank_by': self.rank_by, 'output_format': self.output_format,
                       'run_oracle': self.run_oracle})
        return params

    def analysis(self):
        if self.output_format not in REPORT_FORMATS:
            raise ConfigError('unknown format %r (allowed: %s)' % (self.output_format, ', '.join(REPORT_FORMATS)))
        if self.rank_by not in RANK_KEYS:
            raise ConfigError('unknown rank key %r (allowed: %s)' % (self.rank_by, ', '.join(RANK_KEYS)))

        q, g = self.query, self.graph_data
        result = investigative_match(q, g, hop_bound=self.hop_bound, n_jobs=self.n_jobs, progress=self.progress)
        matches = group_results(q, g, result)
        ranked = rank_top_k(matches, self.top_k, rank_by=self.rank_by)

        self.res = {'invsim': result,
                    'matches': matches,
                    'ranked': ranked,
                    'report': serialize_report(ranked, self.output_format)}
        if self.run_oracle:
            self.res['oracle'] = self.check_oracle(result, ranked)

    def check_oracle(self, result, ranked):
        """
        Compares survivors, relevant sets and witness paths with exhaustive_partial_search, and the top_k ordering
        with rank_exhaustive. S_D is also compared with naive_dual_sim when the instance is small enough.

        Raises InvariantViolation on the first kind of disagreement found.
        """
        q, g = self.query, self.graph_data
        problems = []

        expected = oracle.exhaustive_partial_search(q, g, hop_bound=self.hop_bound, guard=False,
                                                    progress=self.progress)
        if list(expected) != list(result.relevant_sets):
            missing = sorted(set(expected) - set(result.relevant_sets))
            extra = sorted(set(result.relevant_sets) - set(expected))
            problems.append('survivors differ: missing %s, unexpected %s' % (missing, extra))
        else:
            for anchor, members in expected.items():
                rs = result.relevant_sets[anchor]
                if set(members) != set(rs.members):
                    problems.append('relevant set of %s differs' % (anchor,))
                elif any(tuple(rs.paths[m]) != tuple(p) for m, p in members.items()):
                    problems.append('witness paths of %s differ' % (anchor,))

        if self.rank_by == 'size':
            expected_top = oracle.rank_exhaustive(q, expected, self.top_k)
            got_top = [(m.anchor, m.has_red_flag, m.relevant_size) for m in ranked]
            if expected_top != got_top:
                problems.append('top-%d ranking differs' % self.top_k)

        if q.num_nodes <= oracle.MAX_QUERY_NODES and g.num_nodes <= oracle.MAX_DATA_NODES:
            if oracle.naive_dual_sim(q, g) != result.dual:
                problems.append('dual simulation differs from naive_dual_sim')

        if problems:
            for p in problems:
                log.error('oracle disagreement: %s', p)
            raise InvariantViolation('oracle disagreement: ' + '; '.join(problems))
        log.info('oracle agreement on %d anchors', len(expected))
        return {'agreement': 'exact', 'anchors': len(expected)}
