"""
Base class for matching analyses. Methods for saving and loading results, and convenient run() function.
"""
import hashlib
import logging
import os

import joblib

from InvestigativeSearchTools.exceptions import ConfigError
from InvestigativeSearchTools.graph_data import GraphDataBase, file_fingerprint
from InvestigativeSearchTools.Utils import graph_io

log = logging.getLogger(__name__)


class MatchAnalysisBase(GraphDataBase):
    def __init__(self, nodes_path=None, edges_path=None, query_path=None):
        super(MatchAnalysisBase, self).__init__(nodes_path=nodes_path, edges_path=edges_path)

        # the query pattern, loaded from query_path by run() unless set directly
        self.query_path = query_path
        self.query = None

        # matching settings
        self.hop_bound = 2
        self.n_jobs = 1
        self.progress = False

        # settings for handling the loading/saving and computation of results
        self.load_res_if_file_exists = False  #
        self.save_res = False                 # results are only written when res_save_dir is also set
        self.res_save_dir = None              #
        self.res_save_file = None             #
        self.ana_requires_data = True         # If False, will not call .load_data() before running.
        self.force_analysis = False           # Will redo the analysis even if results were loaded
        self.res = {}

        # this is generally defined by a subclass
        self.res_str = ''

    def run(self):
        """
        Convenience function to run analysis steps.

        1. Load the data graph, from cache or by parsing
        2. Load the query
        3. Load results if desired
        4. Compute results if needed and save them if desired.

        Returns .res
        """

        # Step 1: load data
        if self.graph_data is None and self.ana_requires_data:
            self.load_data()

        # Step 2: load query
        if self.query is None:
            if self.query_path is None:
                raise ConfigError('query_path must be set before running.')
            self.query = graph_io.load_query(self.query_path)

        # Step 3: if we want to load results instead of computing, try to load
        self._make_res_path()
        if self.load_res_if_file_exists and not self.force_analysis:
            self.load_res_data()

        # Step 4: compute if nothing was loaded
        if self.force_analysis or not self.res:
            self.analysis()
            if self.save_res and self.res_save_file is not None:
                self.save_res_data()
        return self.res

    def analysis(self):
        """
        This should be overridden in the analysis subclass.

        This should set self.res.
        """
        raise NotImplementedError

    def res_params(self):
        """Settings that change the results. Subclasses extend this so cached results are keyed on them."""
        return {'analysis': self.__class__.__name__, 'hop_bound': self.hop_bound}

    def load_res_data(self):
        """
        Load results if they exist and modify self.res to hold them.
        """
        if self.res_save_file is not None and os.path.exists(self.res_save_file):
            log.info('%s: loading results.', self.res_save_file)
            self.res = {**self.res, **joblib.load(self.res_save_file)}
        else:
            log.info('No results to load.')

    def save_res_data(self):
        """
        Save the pickle file that holds self.res.
        """
        if not self.res:
            raise ConfigError('Results must be loaded or computed before saving. Use .load_res_data() or .analysis()')
        if not os.path.exists(self.res_save_dir):
            os.makedirs(self.res_save_dir)
        joblib.dump(self.res, self.res_save_file)

    def _make_res_path(self):
        """
        Defines self.res_save_file from the data files, the query file and res_params(), when res_save_dir is set.
        """
        if self.res_save_dir is None:
            self.res_save_file = None
            return
        if not self.res_str:
            raise ConfigError('.res_str must be defined.')

        h = hashlib.sha1()
        h.update(self.data_key().encode('utf-8'))
        if self.query_path is not None:
            h.update(file_fingerprint(self.query_path).encode('utf-8'))
        h.update(repr(sorted(self.res_params().items())).encode('utf-8'))
        self.res_save_file = os.path.join(self.res_save_dir, h.hexdigest()[:16] + '_' + self.res_str)
