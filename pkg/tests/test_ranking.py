import json
import random
from fractions import Fraction

import pytest

from InvestigativeSearchTools.exceptions import PreconditionError
from InvestigativeSearchTools.Matching.inv_sim import investigative_match
from InvestigativeSearchTools.Matching.ranking import (PersonMatch, Subgraph, group_results, jaccard_similarity,
                                                       parse_report, rank_top_k, serialize_report)
from InvestigativeSearchTools.Utils.generator import generate_graph, load_gen_spec
from InvestigativeSearchTools.Utils.oracle import exhaustive_partial_search, rank_exhaustive


def _random_match(rng, data_node, focus='A'):
    size = rng.randint(0, 8)
    matched = frozenset([focus] + rng.sample('BCDEFGH', rng.randint(0, 6)))
    return PersonMatch(anchor=(focus, data_node),
                       full_match=rng.random() < 0.2,
                       has_red_flag=rng.random() < 0.3,
                       relevant_size=size,
                       matched_query_nodes=matched,
                       jaccard=Fraction(len(matched), 8),
                       subgraph=Subgraph(frozenset([data_node]), frozenset()))


def _random_lists(n, seed):
    rng = random.Random(seed)
    for _ in range(n):
        n_matches = rng.randint(0, 25)
        nodes = rng.sample(range(1000), n_matches)
        yield [_random_match(rng, 'p%03d' % i, focus=rng.choice('AZ')) for i in nodes]


@pytest.fixture
def hve_matches(hve_query, hve_graph):
    result = investigative_match(hve_query, hve_graph)
    return {m.data_node: m for m in group_results(hve_query, hve_graph, result)}


def test_hve_person_matches(hve_matches):
    assert sorted(hve_matches) == ['P1', 'P3', 'P4']
    p3, p1, p4 = hve_matches['P3'], hve_matches['P1'], hve_matches['P4']
    assert (p3.full_match, p3.has_red_flag, p3.relevant_size) == (True, True, 6)
    assert (p1.full_match, p1.has_red_flag, p1.relevant_size) == (False, False, 3)
    assert (p4.full_match, p4.has_red_flag, p4.relevant_size) == (False, False, 2)
    assert p1.matched_query_nodes == {'A', 'B', 'D'}
    assert p1.subgraph.edges == {('P1', 'B1'), ('B1', 'D1-1'), ('B1', 'D1-2')}


def test_hve_jaccard(hve_query, hve_matches):
    assert jaccard_similarity(hve_matches['P3'], hve_query) == 1
    assert jaccard_similarity(hve_matches['P1'], hve_query) == Fraction(3, 7)


def test_hve_ranking(hve_matches):
    matches = list(hve_matches.values())
    assert [m.data_node for m in rank_top_k(matches, 10)] == ['P3', 'P1', 'P4']
    assert [m.data_node for m in rank_top_k(matches, 1)] == ['P3']
    assert rank_top_k([], 5) == []


@pytest.mark.parametrize('k', [0, -1, 2.5, True, '3'])
def test_bad_k(k):
    with pytest.raises(PreconditionError):
        rank_top_k([], k)


def test_unknown_rank_key(hve_matches):
    with pytest.raises(PreconditionError):
        rank_top_k(list(hve_matches.values()), 3, rank_by='age')


def test_ranking_properties_on_random_lists():
    rng = random.Random(99)
    n_lists = 0
    for matches in _random_lists(1200, seed=7):
        n_lists += 1
        k = rng.randint(1, 30)
        ranked = rank_top_k(matches, k)
        assert len(ranked) == min(k, len(matches))

        flags = [m.has_red_flag for m in ranked]
        assert flags == sorted(flags, reverse=True)
        for cls in (True, False):
            sizes = [m.relevant_size for m in ranked if m.has_red_flag == cls]
            assert sizes == sorted(sizes, reverse=True)

        shuffled = list(matches)
        rng.shuffle(shuffled)
        assert rank_top_k(shuffled, k) == ranked

        # the top k is a prefix of the full order
        assert ranked == rank_top_k(matches, max(len(matches), 1))[:k]
    assert n_lists >= 1000


def test_jaccard_ranking_properties():
    for matches in _random_lists(300, seed=8):
        ranked = rank_top_k(matches, 50, rank_by='jaccard')
        for cls in (True, False):
            scores = [m.jaccard for m in ranked if m.has_red_flag == cls]
            assert scores == sorted(scores, reverse=True)


def test_json_golden(hve_matches, golden_dir):
    ranked = rank_top_k(list(hve_matches.values()), 20)
    payload = serialize_report(ranked, 'json')
    assert payload == (golden_dir / 'hve_toy_report.json').read_bytes()
    doc = json.loads(payload)
    assert list(doc[0]) == ['anchor', 'full_match', 'has_red_flag', 'relevant_size', 'jaccard',
                            'matched_query_nodes', 'subgraph', 'focus']


def test_tsv_golden(hve_matches, golden_dir):
    ranked = rank_top_k(list(hve_matches.values()), 20)
    payload = serialize_report(ranked, 'tsv')
    assert payload == (golden_dir / 'hve_toy_report.tsv').read_bytes()
    rows = payload.decode('utf-8').splitlines()
    assert len(rows) == 4
    assert rows[1].split('\t')[:3] == ['P3', 'true', 'true']


def test_empty_reports():
    assert serialize_report([], 'json') == b'[]\n'
    assert serialize_report([], 'tsv').decode('utf-8').splitlines() == [
        'anchor\tfull_match\thas_red_flag\trelevant_size\tjaccard\tmatched_query_nodes\tfocus']


@pytest.mark.parametrize('fmt', ['json', 'tsv'])
def test_parse_report_recovers_scalars(hve_matches, fmt):
    ranked = rank_top_k(list(hve_matches.values()), 20)
    parsed = parse_report(serialize_report(ranked, fmt), fmt)
    assert [r['anchor'] for r in parsed] == ['P3', 'P1', 'P4']
    for rec, m in zip(parsed, ranked):
        assert rec['full_match'] == m.full_match
        assert rec['has_red_flag'] == m.has_red_flag
        assert rec['relevant_size'] == m.relevant_size
        assert rec['jaccard'] == m.jaccard
        assert rec['matched_query_nodes'] == sorted(m.matched_query_nodes)
        assert rec['focus'] == m.focus


def test_serialize_is_deterministic():
    for matches in _random_lists(50, seed=12):
        ranked = rank_top_k(matches, 20)
        assert serialize_report(ranked, 'json') == serialize_report(list(ranked), 'json')
        assert serialize_report(ranked, 'tsv') == serialize_report(list(ranked), 'tsv')


def test_unknown_format():
    with pytest.raises(PreconditionError):
        serialize_report([], 'xml')


def test_top20_matches_exhaustive_ranking(data_dir):
    spec = load_gen_spec(str(data_dir / 'specs' / 'topk_planted.json'))
    g, truth = generate_graph(spec)
    q = spec.query
    assert sum(t['kind'] == 'partial' for t in truth) >= 50

    ranked = rank_top_k(group_results(q, g, investigative_match(q, g)), 20)
    expected = rank_exhaustive(q, exhaustive_partial_search(q, g, guard=False), 20)
    assert len(ranked) == 20
    assert [(m.anchor, m.has_red_flag, m.relevant_size) for m in ranked] == expected

    again = rank_top_k(group_results(q, g, investigative_match(q, g, n_jobs=4)), 20)
    assert serialize_report(again) == serialize_report(ranked)
