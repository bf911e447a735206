import json

import pytest

from InvestigativeSearchTools.exceptions import GeneratorSpecError
from InvestigativeSearchTools.Utils import graph_io
from InvestigativeSearchTools.Utils.generator import gen_spec_from_dict, generate_graph, load_gen_spec, write_generated

SMALL_QUERY = {'nodes': [{'id': 'A', 'label': 'person', 'category': 'QF'},
                         {'id': 'B', 'label': 'account', 'category': 'IIRA'},
                         {'id': 'C', 'label': 'ngram', 'category': 'IND'}],
               'edges': [['A', 'B'], ['B', 'C']]}


def _small_doc(**kwargs):
    doc = {'seed': 1, 'persons': 10, 'query': SMALL_QUERY,
           'layers': [{'label': 'account', 'category': 'IIRA', 'count': 12},
                      {'label': 'ngram', 'category': 'IND', 'count': 5, 'vocabulary': ['hate', 'love'],
                       'distinct_labels': True}],
           'links': [{'source': 'person', 'target': 'account', 'count': 15},
                     {'source': 'account', 'target': 'account', 'count': 7},
                     {'source': 'account', 'target': 'ngram', 'fanout': [0, 2]}],
           'planted_full': 1, 'planted_partial': 2, 'planted_innocuous': 1}
    doc.update(kwargs)
    return doc


def test_counts_follow_spec():
    g, _ = generate_graph(gen_spec_from_dict(_small_doc(planted_full=0, planted_partial=0, planted_innocuous=0)))
    stats = graph_io.compute_stats(g)
    assert stats.total_nodes == 27
    assert stats.label_counts['person'] == 10
    assert stats.label_counts['account'] == 12
    assert stats.label_counts['hate'] == 1
    assert stats.label_counts['ngram-4'] == 1
    assert stats.edge_counts[('person', 'account')] == 15
    assert stats.edge_counts[('account', 'account')] == 7
    assert not any(g.has_edge(v, v) for v in g.nodes)


def test_generation_is_deterministic(tmp_path, data_dir):
    spec = load_gen_spec(str(data_dir / 'specs' / 'hve_planted.json'))
    first = write_generated(spec, str(tmp_path / 'one'))
    second = write_generated(spec, str(tmp_path / 'two'))
    for name in ('nodes', 'edges', 'truth'):
        with open(first[name], 'rb') as f1, open(second[name], 'rb') as f2:
            assert f1.read() == f2.read()


def test_different_seeds_differ():
    g1, _ = generate_graph(gen_spec_from_dict(_small_doc(seed=1)))
    g2, _ = generate_graph(gen_spec_from_dict(_small_doc(seed=2)))
    assert g1 != g2


def test_truth_entries():
    g, truth = generate_graph(gen_spec_from_dict(_small_doc()))
    kinds = [t['kind'] for t in truth]
    assert kinds == ['full', 'partial', 'partial', 'innocuous']

    full = truth[0]
    assert full['survives']
    assert full['relevant_set'] == [['B', 'full0_B'], ['C', 'full0_C']]
    assert g.label(full['anchor']) == 'person'

    innocuous = truth[-1]
    assert not innocuous['survives']
    assert all(m[0] != 'C' for m in innocuous['relevant_set'])
    for entry in truth[1:3]:
        assert entry['survives']
        assert ['C', '%s_C' % entry['anchor'].rsplit('_', 1)[0]] in entry['relevant_set']


def test_zero_persons_gives_empty_files(tmp_path):
    doc = {'seed': 1, 'persons': 0, 'query': SMALL_QUERY}
    paths = write_generated(gen_spec_from_dict(doc), str(tmp_path))
    assert open(paths['nodes'], encoding='utf-8').read() == ''
    assert open(paths['edges'], encoding='utf-8').read() == ''
    assert json.load(open(paths['truth'], encoding='utf-8'))['anchors'] == []


@pytest.mark.parametrize('changes', [
    {'persons': -1},
    {'layers': [{'label': 'person', 'count': 3}]},
    {'links': [{'source': 'person', 'target': 'ghost', 'count': 1}]},
    {'links': [{'source': 'person', 'target': 'account', 'count': 1, 'probability': 0.5}]},
    {'links': [{'source': 'person', 'target': 'account', 'count': 1000}]},
    {'layers': [{'label': 'account', 'count': 1, 'vocabulary': ['a', 'b']}]},
    {'layers': [{'label': 'account', 'colour': 'red'}]},
])
def test_bad_specs(changes):
    with pytest.raises(GeneratorSpecError):
        generate_graph(gen_spec_from_dict(_small_doc(**changes)))


def test_missing_spec_file(tmp_path):
    with pytest.raises(GeneratorSpecError):
        load_gen_spec(str(tmp_path / 'nope.json'))


@pytest.mark.slow
def test_scale_magnitudes(data_dir):
    g, _ = generate_graph(load_gen_spec(str(data_dir / 'specs' / 'blogcatalog_scale.json')))
    stats = graph_io.compute_stats(g, kinds=['userid', 'person', 'weblog'], other_kind='tag')
    assert stats.total_nodes == 471267
    assert stats.total_edges == 4098290
    assert stats.label_counts == {'person': 88781, 'userid': 80949, 'weblog': 127227, 'tag': 174310}
    assert stats.edge_counts == {('person', 'userid'): 88784, ('userid', 'userid'): 3223640,
                                 ('userid', 'weblog'): 127227, ('weblog', 'tag'): 658639}
