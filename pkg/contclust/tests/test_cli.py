"""
Tests for the contclust command line.
"""

import csv
import json
import shutil

import pytest

from contclust import io
from contclust.cli import main, bench_row, BENCH_COLUMNS


def test_solve_to_stdout(test_data_dir, capsys):
    assert main(['solve', f'{test_data_dir}/ufl_two.json']) == 0
    document = json.loads(capsys.readouterr().out)
    assert 2.0 <= document['cost'] <= 4.64
    assert document['certificate']['factor_bound'] > 2.31


def test_solve_to_file_with_trace_and_lp(test_data_dir, tmp_path):
    out, trace, lp = tmp_path / 'sol.json', tmp_path / 'trace.csv', tmp_path / 'pool.lp'
    code = main(['solve', f'{test_data_dir}/kp_path.json', '-o', str(out), '--trace', str(trace),
                 '--dump-lp', str(lp)])
    assert code == 0

    sol = io.read_solution(out)
    assert len(sol.centers) == 1
    assert trace.read_text().splitlines()[0] == 'opt_g,iterations,cuts,status,cost'
    assert 'budget:' in lp.read_text()


def test_solve_kind_mismatch(test_data_dir):
    assert main(['solve', f'{test_data_dir}/ufl_two.json', '--kind', 'kp']) == 1


def test_solve_unreadable_instance(test_data_dir):
    assert main(['solve', f'{test_data_dir}/broken.json']) == 1
    assert main(['solve', f'{test_data_dir}/bad_client.json']) == 1


def test_solve_infeasible(test_data_dir):
    assert main(['solve', f'{test_data_dir}/fair_infeasible.json']) == 2


def test_usage_errors_exit_with_input_code():
    with pytest.raises(SystemExit) as e:
        main(['solve'])
    assert e.value.code == 1

    with pytest.raises(SystemExit) as e:
        main(['gen', 'spherical'])
    assert e.value.code == 1


####################################################################################################
#
#
def test_exact(test_data_dir, capsys):
    assert main(['exact', f'{test_data_dir}/ufl_two.json']) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ['value: 2.0', 'centers: 0 1', 'enumerated: 3']


def test_exact_budget(test_data_dir):
    assert main(['exact', f'{test_data_dir}/ufl_two.json', '--budget', '1']) == 3


def test_exact_infeasible(test_data_dir):
    assert main(['exact', f'{test_data_dir}/fair_infeasible.json']) == 2


####################################################################################################
#
#
def test_gen_random(tmp_path):
    out = tmp_path / 'rand.json'
    assert main(['gen', 'random', '--n', '8', '--extra', '12', '--kind', 'kp', '--k', '2', '-o', str(out)]) == 0
    entry = io.read_instance(out)
    assert entry.instance.point_count == 20
    assert entry.instance.n == 8
    assert entry.problem.k == 2


def test_gen_euclidean_to_stdout(capsys):
    assert main(['gen', 'euclidean', '--n', '6', '--kind', 'kcwo', '--k', '2', '--m', '5', '--seed', '4']) == 0
    entry = io.parse_instance(json.loads(capsys.readouterr().out))
    assert entry.metric['p'] == '2'
    assert entry.problem.m == 5
    assert entry.config.seed == 4


def test_gen_single_client():
    assert main(['gen', 'random', '--n', '1', '-o', '/dev/null']) == 0


def test_gen_rejects_bad_sizes():
    assert main(['gen', 'random', '--n', '0']) == 1
    assert main(['gen', 'random', '--n', '3', '--kind', 'kcwo', '--m', '4']) == 1
    assert main(['gen', 'hardness']) == 1


def test_gen_hardness_from_graph(test_data_dir, tmp_path):
    out = tmp_path / 'hard.json'
    assert main(['gen', 'hardness', '--graph', f'{test_data_dir}/k2.txt', '--eps', '0.25', '-o', str(out)]) == 0
    entry = io.read_instance(out)
    assert entry.instance.dist[0, 1] == 4.0
    assert entry.problem.lam == 0.5


def test_gen_hardness_planted(tmp_path):
    out, graph = tmp_path / 'hard.json', tmp_path / 'g.txt'
    assert main(['gen', 'hardness', '--planted', '8', '--graph-output', str(graph), '-o', str(out)]) == 0
    assert io.read_graph(graph).n == 8
    assert io.read_instance(out).instance.n == 8


####################################################################################################
#
#
def _read_csv(path):
    with open(path, encoding='utf-8', newline='') as fh:
        return list(csv.DictReader(fh))


def test_bench_empty_directory(tmp_path, capsys):
    assert main(['bench', str(tmp_path)]) == 0
    assert capsys.readouterr().out == ','.join(BENCH_COLUMNS) + '\n'


def test_bench_rows(test_data_dir, tmp_path):
    for name in ('kp_path.json', 'ufl_two.json', 'broken.json'):
        shutil.copy(f'{test_data_dir}/{name}', tmp_path / name)
    out = tmp_path / 'bench.csv'

    assert main(['bench', str(tmp_path), '-o', str(out)]) == 0
    rows = {row['instance']: row for row in _read_csv(out)}

    assert rows['broken.json']['status'] == 'parse_error'
    assert rows['broken.json']['alg_cost'] == 'NA'
    assert rows['kp_path.json']['status'] == 'ok'
    assert rows['kp_path.json']['exact_opt'] == '2.0'
    assert rows['ufl_two.json']['k/λ'] == '1.0'
    assert float(rows['ufl_two.json']['ratio']) >= 1.0


def test_bench_parallel_matches_serial(test_data_dir, tmp_path):
    for name in ('kp_path.json', 'kcwo_line.json', 'fair_infeasible.json'):
        shutil.copy(f'{test_data_dir}/{name}', tmp_path / name)
    serial, parallel = tmp_path / 'serial.csv', tmp_path / 'parallel.csv'

    assert main(['bench', str(tmp_path), '-o', str(serial)]) == 0
    assert main(['bench', str(tmp_path), '--jobs', '2', '-o', str(parallel)]) == 0

    def stable(rows):
        return [{k: v for k, v in row.items() if k != 'wall_ms'} for row in rows]

    assert stable(_read_csv(serial)) == stable(_read_csv(parallel))
    statuses = {row['instance']: row['status'] for row in _read_csv(serial)}
    assert statuses['fair_infeasible.json'] == 'infeasible'


def test_bench_missing_directory(tmp_path):
    assert main(['bench', str(tmp_path / 'nope')]) == 1


def test_bench_row_budget(test_data_dir):
    row = bench_row(f'{test_data_dir}/kp_path.json', budget=1)
    assert row['status'] == 'ok'
    assert row['exact_opt'] == 'NA'
    assert row['ratio'] == 'NA'
