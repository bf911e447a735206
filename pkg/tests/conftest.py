import random
from pathlib import Path

import pytest

import InvestigativeSearchTools
from InvestigativeSearchTools.graph import Category, build_graph, build_query
from InvestigativeSearchTools.Utils import graph_io

DATA_DIR = Path(InvestigativeSearchTools.__file__).parent / 'data'
GOLDEN_DIR = Path(__file__).parent / 'golden'

RANDOM_LABELS = ('a', 'b', 'c')


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def golden_dir():
    return GOLDEN_DIR


@pytest.fixture
def hve_paths():
    base = DATA_DIR / 'hve_toy'
    return {'nodes': str(base / 'nodes.tsv'), 'edges': str(base / 'edges.tsv'), 'query': str(base / 'query.json')}


@pytest.fixture
def hve_graph(hve_paths):
    return graph_io.load_graph(hve_paths['nodes'], hve_paths['edges'])


@pytest.fixture
def hve_query(hve_paths):
    return graph_io.load_query(hve_paths['query'])


def make_random_instance(rng, max_query_nodes=6, max_data_nodes=30, labels=RANDOM_LABELS):
    """
    A random (query, data graph) pair. The query is weakly connected and has at least one QF node and one IND or RF
    node, so it is valid for investigative matching.
    """
    n_q = rng.randint(2, max_query_nodes)
    q_nodes = ['q%d' % i for i in range(n_q)]
    q_labels = {n: rng.choice(labels) for n in q_nodes}

    categories = {n: rng.choice([Category.IIRA, Category.IND, Category.RF, Category.NC]) for n in q_nodes}
    categories[q_nodes[0]] = Category.QF
    if rng.random() < 0.2 and n_q > 2:
        categories[q_nodes[-1]] = Category.QF
    others = [n for n in q_nodes if categories[n] != Category.QF]
    if not any(categories[n] in (Category.IND, Category.RF) for n in others):
        categories[rng.choice(others)] = rng.choice([Category.IND, Category.RF])

    # random spanning tree with random directions, then a few extra edges (self loops allowed)
    q_edges = set()
    for i in range(1, n_q):
        j = rng.randrange(i)
        q_edges.add((q_nodes[j], q_nodes[i]) if rng.random() < 0.7 else (q_nodes[i], q_nodes[j]))
    for _ in range(rng.randint(0, n_q)):
        q_edges.add((rng.choice(q_nodes), rng.choice(q_nodes)))

    q = build_query([(n, q_labels[n], categories[n]) for n in q_nodes], sorted(q_edges))

    n_g = rng.randint(1, max_data_nodes)
    g_nodes = ['v%02d' % i for i in range(n_g)]
    g_edges = set()
    for _ in range(rng.randint(0, 3 * n_g)):
        g_edges.add((rng.choice(g_nodes), rng.choice(g_nodes)))
    g = build_graph([(n, rng.choice(labels)) for n in g_nodes], sorted(g_edges))
    return q, g


@pytest.fixture
def random_instances():
    """Factory: random_instances(n, seed) -> list of (query, graph)."""

    def _make(n, seed=0, **kwargs):
        rng = random.Random(seed)
        return [make_random_instance(rng, **kwargs) for _ in range(n)]

    return _make
