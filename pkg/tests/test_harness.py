import csv
import io
import json

import numpy as np
import pytest

from waanso.cost import total_cost
from waanso.errors import InvalidArgument
from waanso.harness import (
    CSV_COLUMNS, BenchResult, csv_text, emit_report, fmt, load_suite, plot_data_text, run_bench,
    suite_from_dict, summary_table, summary_text,
)

TINY = {"iterations": 5, "population": 4}


def suite(**over):
    d = {
        "schema": "suite.v1",
        "workload": {"generator": {"apps": 1, "tasks": 6, "groups": 2, "seed": 3, "signal_length": 16}},
        "topology": {"rows": 3, "cols": 3},
        "algorithms": [{"name": "aso", "params": TINY}],
        "clustering_modes": ["identity"],
        "seeds": [1],
        "alpha": 0.5,
        "calib_samples": 20,
        "record_wall_time": False,
    }
    d.update(over)
    return suite_from_dict(d)


def parse(text):
    return list(csv.reader(io.StringIO(text)))


ALL_ALGOS = [
    {"name": "aso", "params": TINY},
    {"name": "dpso", "params": TINY},
    {"name": "aco", "params": {"iterations": 5, "ants": 3}},
    {"name": "bnb", "params": {"node_limit": 200}},
]


def test_one_row():
    rows = parse(csv_text(run_bench(suite())))
    assert len(rows) == 2 and tuple(rows[0]) == CSV_COLUMNS


def test_sixty_rows_in_suite_order():
    s = suite(algorithms=ALL_ALGOS, clustering_modes=["wavelet", "identity", "none"], seeds=[1, 2, 3, 4, 5])
    rows = parse(csv_text(run_bench(s)))[1:]
    assert len(rows) == 60
    assert all(len(r) == 10 for r in rows)
    expect = [(a["name"], m, str(sd)) for a in ALL_ALGOS for m in ("wavelet", "identity", "none") for sd in (1, 2, 3, 4, 5)]
    assert [(r[1], r[2], r[3]) for r in rows] == expect
    assert len({r[0] for r in rows}) == 1


def test_rerun_byte_identical(monkeypatch):
    s = suite(algorithms=ALL_ALGOS[:3], clustering_modes=["wavelet", "identity"], seeds=[1, 2])
    monkeypatch.setenv("WAANSO_THREADS", "1")
    a = csv_text(run_bench(s))
    monkeypatch.setenv("WAANSO_THREADS", "4")
    assert csv_text(run_bench(s)) == a


def test_empty_result_header_only():
    assert csv_text(BenchResult("abc", [])) == ",".join(CSV_COLUMNS) + "\n"


def test_summary_medians_match_csv():
    s = suite(algorithms=ALL_ALGOS[:2], clustering_modes=["identity", "wavelet"], seeds=[1, 2, 3, 4])
    r = run_bench(s)
    rows = parse(csv_text(r))[1:]
    for e in summary_table(r):
        sel = [row for row in rows if row[1] == e["algo"] and row[2] == e["mode"]]
        for col, idx in (("energy", 4), ("makespan", 5), ("total", 6)):
            assert float(fmt(e[col])) == pytest.approx(np.median([float(x[idx]) for x in sel]), rel=1e-8)
    text = summary_text(r)
    assert "*" in text and "normalizers" in text
    assert plot_data_text(r).splitlines()[1].split()[0] == "aso/identity"


def test_totals_rederive_from_normalizers():
    r = run_bench(suite(algorithms=ALL_ALGOS, clustering_modes=["wavelet", "identity"], seeds=[1, 2]))
    for row in r.rows:
        b = row.breakdown
        assert abs(total_cost(b.energy, b.makespan_cycles, r.normalizers[row.mode]) - b.total) <= 1e-9
    for line in parse(csv_text(r))[1:]:
        e, ms, tot = map(float, line[4:7])
        assert abs(total_cost(e, ms, r.normalizers[line[2]]) - tot) <= 1e-8


def test_none_mode_infeasible_is_row_level():
    s = suite(topology={"rows": 2, "cols": 2}, clustering_modes=["none", "wavelet"], seeds=[1, 2])
    rows = parse(csv_text(run_bench(s)))[1:]
    none = [r for r in rows if r[2] == "none"]
    assert len(none) == 2 and all(r[4] == "NA" and r[9] == "infeasible" for r in none)
    assert all(r[9] != "infeasible" for r in rows if r[2] == "wavelet")


def test_wall_time_recorded_when_enabled():
    rows = parse(csv_text(run_bench(suite(record_wall_time=True))))[1:]
    assert float(rows[0][7]) >= 0


def test_float_format():
    assert fmt(0.1234567891234) == "0.123456789"
    assert fmt(123456789012.0) == "123456789000"
    assert fmt(1e-12) == "0.000000000001"
    assert fmt(2 / 3) == "0.666666667"
    assert fmt(52524.0) == "52524"


def test_suite_validation():
    with pytest.raises(InvalidArgument):
        suite(algorithms=[])
    with pytest.raises(InvalidArgument):
        suite(seeds=[])
    with pytest.raises(InvalidArgument):
        suite(clustering_modes=["dbscan"])
    with pytest.raises(InvalidArgument):
        suite(algorithms=[{"name": "sa"}])
    with pytest.raises(InvalidArgument):
        suite(bogus=1)
    with pytest.raises(InvalidArgument):
        run_bench(suite(algorithms=[{"name": "aso", "params": {"ants": 3}}]))


def test_threads_env_validation(monkeypatch):
    monkeypatch.setenv("WAANSO_THREADS", "zero")
    with pytest.raises(InvalidArgument):
        run_bench(suite(seeds=[1, 2]))


def test_config_hash_tracks_content():
    assert suite().config_hash() == suite().config_hash()
    assert suite().config_hash() != suite(alpha=0.4).config_hash()


def test_suite_file_with_workload_path(tmp_path):
    from waanso.model import generate_workload, save_workload
    save_workload(generate_workload(1, 4, 1, ), tmp_path / "w.json")
    d = json.loads(json.dumps(suite().to_dict()))
    d["workload"] = {"path": "w.json"}
    (tmp_path / "s.json").write_text(json.dumps(d))
    r = run_bench(load_suite(tmp_path / "s.json"))
    assert len(r.rows) == 1 and r.rows[0].breakdown is not None


def test_reference_suite_loads():
    s = load_suite("reference")
    assert s.record_wall_time is False and len(s.algorithms) == 4


def test_emit_report(tmp_path):
    r = run_bench(suite())
    for f in ("csv", "summary", "plot-data"):
        assert emit_report(r, f, tmp_path / f).read_text()
    with pytest.raises(InvalidArgument):
        emit_report(r, "xml", tmp_path / "x")
    with pytest.raises(OSError):
        emit_report(r, "csv", tmp_path / "missing" / "dir" / "x.csv")
