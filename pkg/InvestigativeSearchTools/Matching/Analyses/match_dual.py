"""
Dual simulation baseline: the maximum dual simulation relation S_D of the query in the data graph, per query node.
"""
import json
import logging

from InvestigativeSearchTools.exceptions import QueryValidationError
from InvestigativeSearchTools.graph import validate_query
from InvestigativeSearchTools.Matching.dual_sim import dual_refine
from InvestigativeSearchTools.Matching.match_analysis import MatchAnalysisBase

log = logging.getLogger(__name__)


class DualSimAnalysis(MatchAnalysisBase):
    """
    Computes S_D. res holds 'dual' (MatchRelation), 'history' (pair counts after each refinement step that removed
    something) and 'report' (JSON bytes, query node -> sorted data nodes).
    """

    def __init__(self, nodes_path=None, edges_path=None, query_path=None):
        super(DualSimAnalysis, self).__init__(nodes_path=nodes_path, edges_path=edges_path, query_path=query_path)
        self.res_str = 'dual.p'

    def analysis(self):
        report = validate_query(self.query, 'dual', self.hop_bound)
        if not report.ok:
            raise QueryValidationError(report)

        history = []
        s_d = dual_refine(self.query, self.graph_data, history=history)
        log.info('dual simulation: %d pairs after %d shrinking steps', len(s_d), len(history))

        self.res = {'dual': s_d,
                    'history': history,
                    'report': (json.dumps(s_d.to_dict(), indent=2, sort_keys=True) + '\n').encode('utf-8')}
