"""
Tests for instance, solution and graph files.
"""

import json
import math

import pytest

import contclust
from contclust import io
from contclust._configs import SolverConfig
from contclust.contclust_exceptions import ContclustException, InstanceFormatError
from contclust.core_metric import MetricInstance, ProblemSpec
from contclust.hardness_gen import Graph, embed
from contclust.results import Certificate, Solution


def test_read_explicit_instance(test_data_dir):
    entry = io.read_instance(f'{test_data_dir}/ufl_two.json')
    assert entry.problem == ProblemSpec.ufl(1.0)
    assert entry.clients == (0, 1)
    assert entry.config == SolverConfig()
    assert entry.instance.dist[0, 1] == 2.0


def test_read_points_instance(test_data_dir):
    entry = io.read_instance(f'{test_data_dir}/kcwo_line.json')
    assert entry.problem == ProblemSpec.kcwo(1, 2)
    inst = entry.instance
    assert inst.n == 2
    assert inst.point_count == 3
    assert inst.dist[0, 2] == 5.0


def test_read_fair_radii_and_config(test_data_dir):
    entry = io.read_instance(f'{test_data_dir}/fair_mixed.json')
    assert entry.problem.radii == (2.0, math.inf, 2.0, math.inf)
    assert entry.config.seed == 3


def test_write_read_round_trip(test_data_dir, tmp_path):
    entry = io.read_instance(f'{test_data_dir}/fair_mixed.json')
    out = tmp_path / 'copy.json'
    io.write_instance(entry, out)

    again = io.read_instance(out)
    assert again.problem == entry.problem
    assert again.config == entry.config
    assert again.metric == entry.metric
    assert '"inf"' in out.read_text()


def test_broken_json_reports_line(test_data_dir):
    with pytest.raises(InstanceFormatError) as e:
        io.read_instance(f'{test_data_dir}/broken.json')
    assert e.value.line == 3
    assert 'broken.json' in str(e.value)


def test_bad_client_reports_line(test_data_dir):
    with pytest.raises(InstanceFormatError) as e:
        io.read_instance(f'{test_data_dir}/bad_client.json')
    assert e.value.line == 4
    assert 'client 5' in str(e.value)


def test_missing_file():
    with pytest.raises(InstanceFormatError):
        io.read_instance('definitely_not_here.json')


def test_parse_instance_rejects_content():
    base = {'metric': {'type': 'explicit', 'matrix': [[0, 1], [1, 0]]},
            'clients': [0, 1],
            'problem': {'kind': 'kp', 'k': 1, 'p': 1}}
    io.parse_instance(base)

    with pytest.raises(InstanceFormatError):
        io.parse_instance(dict(base, problem={'kind': 'kp', 'k': 1, 'p': 1, 'colour': 2}))

    with pytest.raises(InstanceFormatError):
        io.parse_instance(dict(base, clients=[0, 0]))

    with pytest.raises(InstanceFormatError):
        io.parse_instance(dict(base, metric={'type': 'explicit', 'matrix': [[0, 1], [3, 0]]}))

    with pytest.raises(InstanceFormatError):
        io.parse_instance(dict(base, config={'retain': True}))

    with pytest.raises(InstanceFormatError):
        io.parse_instance({k: v for k, v in base.items() if k != 'problem'})

    with pytest.raises(InstanceFormatError):
        io.parse_instance(dict(base, extra=1))


def test_instance_file_from_points():
    entry = io.InstanceFile.from_points([[0.0], [3.0]], '1', [0, 1], ProblemSpec.kp(1, 1))
    document = json.loads(io.dumps(entry.to_dict()))
    assert document['metric'] == {'type': 'lp_norm', 'p': '1', 'points': [[0.0], [3.0]]}
    assert 'config' not in document or document['config'] == {}
    assert io.parse_instance(document).instance.dist[0, 1] == 3.0


####################################################################################################
#
#
def test_solution_round_trip(tmp_path):
    sol = Solution(centers=(2,), assignment=(2, 2), cost=10.0, opt_g=5.0,
                   certificate=Certificate(factor_bound=2.0, bound=10.0, cuts_added=3, iterations=4),
                   served=(0, 1))
    out = tmp_path / 'sol.json'
    io.write_solution(sol, out)
    assert io.read_solution(out) == sol

    document = json.loads(out.read_text())
    assert document['opt_g_used'] == 5.0
    assert document['certificate']['cuts_added'] == 3


def test_malformed_solution(tmp_path):
    out = tmp_path / 'sol.json'
    out.write_text('{"centers": [1]}')
    with pytest.raises(InstanceFormatError):
        io.read_solution(out)


####################################################################################################
#
#
def test_read_graph_files(test_data_dir):
    G = io.read_graph(f'{test_data_dir}/k2.txt')
    assert G.n == 2
    assert G.edges == ((0, 1),)

    G = io.read_graph(f'{test_data_dir}/c4.txt')
    assert G.n == 4
    assert len(G.edges) == 4


def test_graph_round_trip(tmp_path):
    G = Graph.from_edges([(2, 0), (1, 2)], n=6)
    out = tmp_path / 'g.txt'
    io.write_graph(G, out)
    assert io.read_graph(out) == G


def test_graph_errors_report_line(tmp_path):
    out = tmp_path / 'g.txt'
    out.write_text('# a comment\n0 1\n1 2 3\n')
    with pytest.raises(InstanceFormatError) as e:
        io.read_graph(out)
    assert e.value.line == 3

    out.write_text('0 1\n2 2\n')
    with pytest.raises(InstanceFormatError) as e:
        io.read_graph(out)
    assert e.value.line == 2

    out.write_text('# vertices 2\n0 5\n')
    with pytest.raises(InstanceFormatError):
        io.read_graph(out)


def test_hardness_instance_file():
    emb = embed(Graph.from_edges([(0, 1)]), 0.1, facilities=[[0.0]])
    entry = io.hardness_instance_file(emb)
    assert entry.clients == (0, 1)
    assert entry.problem.kind == 'ufl'
    assert entry.problem.lam == pytest.approx(0.2)
    assert entry.instance.dist[0, 1] == 4.0
    assert entry.instance.point_count == 3


def test_problem_for():
    assert io.problem_for('ufl', 3) == ProblemSpec.ufl(1.0)
    assert io.problem_for('fair_kmedian', 2, k=1, radius=3.0) == ProblemSpec.fair(1, [3.0, 3.0])
    assert io.problem_for('kp', 3, k=2, p=2) == ProblemSpec.kp(2, 2)
    assert io.problem_for('kcwo', 4, k=1) == ProblemSpec.kcwo(1, 4)
    with pytest.raises(ContclustException):
        io.problem_for('kmeans', 3)


####################################################################################################
#
#
def test_check_inputs(path3):
    io.check_inputs(inst=path3, spec=ProblemSpec.kp(1, 1), config=SolverConfig(), verbose=True, budget=10)

    with pytest.raises(ContclustException):
        io.check_inputs(inst=[[0.0]])
    with pytest.raises(ContclustException):
        io.check_inputs(spec='ufl')
    with pytest.raises(ContclustException):
        io.check_inputs(inst=path3, spec=ProblemSpec.kcwo(1, 4))
    with pytest.raises(ContclustException):
        io.check_inputs(config={'seed': 1})
    with pytest.raises(ContclustException):
        io.check_inputs(verbose='yes')
    with pytest.raises(ContclustException):
        io.check_inputs(budget=0)
    with pytest.raises(ContclustException):
        io.check_inputs(budget=True)


def test_top_level_exports():
    assert contclust.read_instance is io.read_instance
    assert isinstance(MetricInstance(dist=[[0.0]], clients=(0,)), contclust.MetricInstance)
