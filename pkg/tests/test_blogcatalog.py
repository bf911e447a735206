import pytest

from InvestigativeSearchTools.exceptions import GraphFormatError
from InvestigativeSearchTools.Matching.inv_sim import investigative_match
from InvestigativeSearchTools.Matching.ranking import group_results, rank_top_k
from InvestigativeSearchTools.Utils import graph_io
from InvestigativeSearchTools.Utils.blogcatalog import BLOGCATALOG_KINDS, convert_blogcatalog

RAW = {'id_userid': [('1', '10'), ('2', '11')],
       'userid_userid': [('10', '11')],
       'userid_weblog': [('10', '100'), ('11', '101')],
       'weblog_tag': [('100', 'windows 7'), ('101', 'xp'), ('100', 'xp')]}


def _write_raw(raw_dir, sep='\t'):
    raw_dir.mkdir()
    for name, rows in RAW.items():
        (raw_dir / (name + '.txt')).write_text(''.join(sep.join(r) + '\n' for r in rows), encoding='utf-8')
    return str(raw_dir)


@pytest.mark.parametrize('sep', ['\t', ','])
def test_convert(tmp_path, sep):
    out = convert_blogcatalog(_write_raw(tmp_path / 'raw', sep), str(tmp_path / 'out'), sep=sep)
    assert (out['num_nodes'], out['num_edges']) == (8, 8)

    g = graph_io.load_graph(out['nodes'], out['edges'])
    assert g.label('u10') == 'userid'
    assert g.label('t:windows 7') == 'windows 7'
    assert g.successors('w100') == {'t:windows 7', 't:xp'}
    assert g.has_edge('i1', 'u10')

    stats = graph_io.compute_stats(g, kinds=BLOGCATALOG_KINDS, other_kind='tag')
    assert stats.label_counts == {'person': 2, 'userid': 2, 'weblog': 2, 'tag': 2}
    assert stats.edge_counts[('weblog', 'tag')] == 3


def test_converted_graph_with_tag_query(tmp_path, data_dir):
    out = convert_blogcatalog(_write_raw(tmp_path / 'raw'), str(tmp_path / 'out'))
    g = graph_io.load_graph(out['nodes'], out['edges'])
    q = graph_io.load_query(str(data_dir / 'blogcatalog' / 'query.json'))
    assert q.num_nodes == 8

    result = investigative_match(q, g)
    ranked = rank_top_k(group_results(q, g, result), 20)
    assert [(m.data_node, m.has_red_flag, m.relevant_size) for m in ranked] == [('u10', True, 3), ('u11', False, 2)]


def test_missing_relation(tmp_path):
    raw = tmp_path / 'raw'
    raw.mkdir()
    with pytest.raises(GraphFormatError, match='missing id_userid'):
        convert_blogcatalog(str(raw), str(tmp_path / 'out'))


def test_hash_inside_tag_is_kept(tmp_path):
    raw = tmp_path / 'raw'
    raw.mkdir()
    for name, text in (('id_userid', '# person\tuser\n1\t10\n'), ('userid_userid', ''),
                       ('userid_weblog', '10\t100\n'), ('weblog_tag', '100\tc#\n100\tf# minor\n')):
        (raw / (name + '.txt')).write_text(text, encoding='utf-8')
    out = convert_blogcatalog(str(raw), str(tmp_path / 'out'))
    g = graph_io.load_graph(out['nodes'], out['edges'])
    assert g.successors('w100') == {'t:c#', 't:f# minor'}
    assert g.label('t:c#') == 'c#'
    assert 'i# person' not in g
