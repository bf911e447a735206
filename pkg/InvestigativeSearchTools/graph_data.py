import hashlib
import logging
import os

import joblib

from InvestigativeSearchTools.exceptions import ConfigError
from InvestigativeSearchTools.Utils import graph_io

log = logging.getLogger(__name__)


def create_analysis(analysis_name=None, **attrs):
    """Returns an object of the class specified in analysis_name. This is really just a helper function, you can always
    import the analysis class directly. Analyses live in InvestigativeSearchTools.Matching.Analyses

    Parameters
    ----------
    analysis_name: str
        The name of the analysis class you wish to instantiate.
    attrs
        Attributes to set on the new analysis object (paths, hop_bound, n_jobs, ...).

    Returns
    -------
    Instantiated analysis class
    """
    from InvestigativeSearchTools.Matching import Analyses
    if analysis_name not in Analyses.analysis_dict:
        raise ConfigError('%r is not a valid analysis name. Choose one of: %s'
                          % (analysis_name, ', '.join(sorted(Analyses.analysis_dict))))
    this_ana = Analyses.analysis_dict[analysis_name]()
    for attr, value in attrs.items():
        if not hasattr(this_ana, attr):
            raise ConfigError('%s has no attribute %r' % (analysis_name, attr))
        setattr(this_ana, attr, value)
    return this_ana


def file_fingerprint(*paths):
    """Short hash of absolute paths, sizes and modification times. Changes whenever one of the files does."""
    h = hashlib.sha1()
    for path in paths:
        path = os.path.abspath(path)
        st = os.stat(path)
        h.update(('%s|%d|%d;' % (path, st.st_size, st.st_mtime_ns)).encode('utf-8'))
    return h.hexdigest()[:16]


class GraphDataBase(object):
    """
    Base class for handling graph IO. The parsed data graph can be cached with joblib so large TSVs are only parsed
    once.

    Methods:
        load_data()
        unload_data()
        save_data()
        compute_data()
    """

    def __init__(self, nodes_path=None, edges_path=None):

        # where the data graph lives
        self.nodes_path = nodes_path
        self.edges_path = edges_path

        # directory for the joblib graph cache. No caching if None
        self.cache_dir = None
        self.save_file = None

        # this will hold the LabeledGraph after load_data() is called
        self.graph_data = None

        # settings for whether to load existing data
        self.load_data_if_file_exists = True  # this will load the cached graph if it exists, instead of parsing
        self.do_not_compute = False  # Overrules force_recompute. If this is True, the TSVs WILL NOT BE parsed
        self.force_recompute = False  # Overrules load_data_if_file_exists, even if a cache exists
        self.auto_save_data = True  # write the cache after parsing

    def load_data(self):
        """
        Can load the graph from the cache if it exists, or can parse the TSVs.

        This sets .graph_data after loading
        """
        if self.nodes_path is None or self.edges_path is None:
            raise ConfigError('nodes_path and edges_path must be set before loading data.')
        self._update_save_path()

        # if a cache exists
        if self.save_file is not None and os.path.exists(self.save_file):

            if not self.force_recompute and self.load_data_if_file_exists:
                log.info('%s: cached graph exists, loading.', self.save_file)
                self.graph_data = joblib.load(self.save_file)
            else:
                log.info('%s: cached graph exists, but parsing anyway.', self.save_file)

        # if not computing, don't do anything
        elif self.do_not_compute:
            log.info('no cached graph for %s, but not computing.', self.nodes_path)
            return

        # otherwise compute
        if self.graph_data is None:
            self.graph_data = self.compute_data()
            if self.save_file is not None and self.auto_save_data:
                self.save_data()

    def unload_data(self):
        self.graph_data = None

    def save_data(self):
        """
        Saves .graph_data with joblib to .save_file.
        """
        if self.graph_data is None:
            raise ConfigError('Data must be loaded before saving. Use .load_data()')
        if self.save_file is None:
            raise ConfigError('.cache_dir must be set before saving data.')

        # make directories if missing
        if not os.path.exists(self.cache_dir):
            os.makedirs(self.cache_dir)
        joblib.dump(self.graph_data, self.save_file)

    def compute_data(self):
        """
        Parses the node and edge TSVs.
        """
        return graph_io.load_graph(self.nodes_path, self.edges_path)

    def data_key(self):
        return file_fingerprint(self.nodes_path, self.edges_path)

    def _update_save_path(self):
        if self.cache_dir is None:
            self.save_file = None
        else:
            self.save_file = os.path.join(self.cache_dir, 'graph_%s.p' % self.data_key())
