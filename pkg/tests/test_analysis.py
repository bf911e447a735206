import json
import os

import pytest

from InvestigativeSearchTools import graph_data
from InvestigativeSearchTools.exceptions import ConfigError, InvariantViolation, QueryValidationError
from InvestigativeSearchTools.graph_data import GraphDataBase, create_analysis
from InvestigativeSearchTools.Matching import Analyses
from InvestigativeSearchTools.Matching.Analyses import match_investigative


def _boom(*args, **kwargs):
    raise AssertionError('should not be called')


def test_registry():
    assert set(Analyses.analysis_dict) == {'InvestigativeMatchAnalysis', 'DualSimAnalysis'}


def test_create_analysis_errors(hve_paths):
    with pytest.raises(ConfigError, match='DualSimAnalysis'):
        create_analysis('NoSuchAnalysis')
    with pytest.raises(ConfigError, match='colour'):
        create_analysis('DualSimAnalysis', colour='red')


def test_create_analysis_sets_attributes(hve_paths):
    ana = create_analysis('InvestigativeMatchAnalysis', nodes_path=hve_paths['nodes'], top_k=2)
    assert ana.top_k == 2
    assert ana.nodes_path == hve_paths['nodes']
    assert ana.res_str == 'invsim.p'


def test_graph_cache(tmp_path, hve_paths, hve_graph, monkeypatch):
    data = GraphDataBase(hve_paths['nodes'], hve_paths['edges'])
    data.cache_dir = str(tmp_path / 'cache')
    data.load_data()
    assert data.graph_data == hve_graph
    assert os.path.exists(data.save_file)

    monkeypatch.setattr(graph_data.graph_io, 'load_graph', _boom)
    cached = GraphDataBase(hve_paths['nodes'], hve_paths['edges'])
    cached.cache_dir = str(tmp_path / 'cache')
    cached.load_data()
    assert cached.graph_data == hve_graph

    cached.unload_data()
    cached.force_recompute = True
    with pytest.raises(AssertionError):
        cached.load_data()


def test_do_not_compute_without_cache(tmp_path, hve_paths, monkeypatch):
    monkeypatch.setattr(graph_data.graph_io, 'load_graph', _boom)
    data = GraphDataBase(hve_paths['nodes'], hve_paths['edges'])
    data.cache_dir = str(tmp_path)
    data.do_not_compute = True
    data.load_data()
    assert data.graph_data is None


def test_cache_key_follows_file_contents(tmp_path, hve_paths):
    nodes = tmp_path / 'nodes.tsv'
    nodes.write_bytes(open(hve_paths['nodes'], 'rb').read())
    data = GraphDataBase(str(nodes), hve_paths['edges'])
    data.cache_dir = str(tmp_path / 'cache')
    data.load_data()
    first = data.save_file

    with open(nodes, 'a', encoding='utf-8') as f:
        f.write('P5\tperson\n')
    data.unload_data()
    data.load_data()
    assert data.save_file != first
    assert data.graph_data.num_nodes == 18


def test_save_data_needs_cache_dir(hve_paths):
    data = GraphDataBase(hve_paths['nodes'], hve_paths['edges'])
    data.load_data()
    with pytest.raises(ConfigError):
        data.save_data()


def test_missing_paths():
    with pytest.raises(ConfigError):
        GraphDataBase().load_data()
    ana = create_analysis('DualSimAnalysis')
    ana.ana_requires_data = False
    with pytest.raises(ConfigError, match='query_path'):
        ana.run()


def test_investigative_analysis(hve_paths):
    ana = create_analysis('InvestigativeMatchAnalysis', nodes_path=hve_paths['nodes'], edges_path=hve_paths['edges'],
                          query_path=hve_paths['query'], run_oracle=True)
    res = ana.run()
    assert [m.data_node for m in res['ranked']] == ['P3', 'P1', 'P4']
    assert len(res['matches']) == 3
    assert res['oracle'] == {'agreement': 'exact', 'anchors': 3}
    assert json.loads(res['report'])[0]['anchor'] == 'P3'


def test_results_cache(tmp_path, hve_paths, monkeypatch):
    kwargs = dict(nodes_path=hve_paths['nodes'], edges_path=hve_paths['edges'], query_path=hve_paths['query'],
                  res_save_dir=str(tmp_path), save_res=True, load_res_if_file_exists=True)
    first = create_analysis('InvestigativeMatchAnalysis', **kwargs).run()
    assert os.path.exists(os.path.join(str(tmp_path), os.listdir(str(tmp_path))[0]))

    monkeypatch.setattr(match_investigative, 'investigative_match', _boom)
    second = create_analysis('InvestigativeMatchAnalysis', **kwargs).run()
    assert second['report'] == first['report']

    # other settings are keyed separately and must be computed
    with pytest.raises(AssertionError):
        create_analysis('InvestigativeMatchAnalysis', top_k=1, **kwargs).run()


def test_oracle_disagreement_raises(hve_paths, monkeypatch):
    monkeypatch.setattr(match_investigative.oracle, 'exhaustive_partial_search', lambda *a, **k: {})
    ana = create_analysis('InvestigativeMatchAnalysis', nodes_path=hve_paths['nodes'], edges_path=hve_paths['edges'],
                          query_path=hve_paths['query'], run_oracle=True)
    with pytest.raises(InvariantViolation, match='survivors differ'):
        ana.run()


def test_bad_format(hve_paths):
    ana = create_analysis('InvestigativeMatchAnalysis', nodes_path=hve_paths['nodes'], edges_path=hve_paths['edges'],
                          query_path=hve_paths['query'], output_format='xml')
    with pytest.raises(ConfigError):
        ana.run()


def test_dual_analysis(hve_paths):
    ana = create_analysis('DualSimAnalysis', nodes_path=hve_paths['nodes'], edges_path=hve_paths['edges'],
                          query_path=hve_paths['query'])
    res = ana.run()
    assert json.loads(res['report']) == {'A': ['P3'], 'B': ['B3'], 'C': ['C3'], 'D': ['D3'], 'E': ['E3'],
                                         'F': ['F3'], 'G': ['G3']}
    assert res['history']


def test_dual_analysis_rejects_disconnected_query(tmp_path, hve_paths):
    query = tmp_path / 'q.json'
    query.write_text(json.dumps({'nodes': [{'id': 'A', 'label': 'person', 'category': 'QF'},
                                           {'id': 'B', 'label': 'account', 'category': 'IIRA'}],
                                 'edges': []}), encoding='utf-8')
    ana = create_analysis('DualSimAnalysis', nodes_path=hve_paths['nodes'], edges_path=hve_paths['edges'],
                          query_path=str(query))
    with pytest.raises(QueryValidationError):
        ana.run()
