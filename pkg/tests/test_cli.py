import csv
import io
import json

import pytest

from zetacosmo.cli import COLUMNS, build_parser, cache_path, cache_roundtrip, main
from zetacosmo.riemann_siegel import DEFAULT_CONFIG, EvalConfig
from zetacosmo.zero_engine import find_zeros, format_ordinate, read_zero_table

from .conftest import REFERENCE_ZEROS


def run_cli(capsys, *argv):
    code = main([*argv, "-q"])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eval_single_point(capsys):
    code, out, _ = run_cli(capsys, "eval", "--t", "25.0")
    assert code == 0
    r = rows(out)
    assert len(r) == 1
    assert out.splitlines()[0] == ",".join(COLUMNS["eval"])
    # mpmath siegelz(25)
    assert abs(float(r[0]["z"]) + 0.014872483897970998) < 1e-10
    assert abs(float(r[0]["dz"]) - 1.3678247330304299) < 1e-9


def test_zeros_and_cache(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "zeros", "--range", "0", "100", "--cache", str(tmp_path), "--threads", "1")
    assert code == 0
    r = rows(out)
    assert len(r) == 29
    assert [int(x["n"]) for x in r] == list(range(1, 30))
    assert cache_path(tmp_path, DEFAULT_CONFIG).exists()
    code, out, _ = run_cli(capsys, "stationary", "--range", "14", "60", "--cache", str(tmp_path))
    assert code == 0
    assert len(rows(out)) == 12


def test_cache_roundtrip(tmp_path):
    table = find_zeros(0.0, 60.0)
    back = cache_roundtrip(table, tmp_path, DEFAULT_CONFIG)
    assert [format_ordinate(g) for g in back.ordinates] == [format_ordinate(g) for g in table.ordinates]
    assert back.source == "computed" and back.h_max == table.h_max
    assert cache_roundtrip(back, tmp_path, DEFAULT_CONFIG) == back
    foreign = cache_roundtrip(table, tmp_path, EvalConfig(target_abs_error=1e-7))
    assert foreign.source == "ingested"


def test_cosmo_scan_without_covering_table(capsys):
    code, out, err = run_cli(capsys, "cosmo-scan", "--range", "20", "1000", "--zeros", str(REFERENCE_ZEROS))
    assert code != 0
    assert out == ""
    assert "cosmo-scan" in err and "InsufficientTable" in err
    code, _, err = run_cli(capsys, "cosmo-scan", "--range", "20", "1000")
    assert code != 0 and "InsufficientTable" in err


def test_cosmo_scan_rows(capsys):
    code, out, _ = run_cli(capsys, "cosmo-scan", "--range", "20", "110", "--zeros", str(REFERENCE_ZEROS))
    assert code == 0
    r = rows(out)
    assert out.splitlines()[0] == "t,r,rho,p,p_plus_c2rho,p_plus_c2rho_paper,threshold"
    ts = [float(x["t"]) for x in r]
    assert ts == sorted(ts) and len(ts) > 20
    assert all(float(x["p_plus_c2rho"]) > 0 for x in r)


@pytest.mark.parametrize(
    "argv",
    [
        ("cosmo-scan", "--range", "10", "100"),
        ("corollary", "--t", "15.0"),
        ("zeros", "--range", "50", "20"),
        ("eval",),
        ("cosmo-scan", "--range", "20", "100", "--k", "0"),
    ],
)
def test_config_errors_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv, "--zeros", str(REFERENCE_ZEROS))
    assert code == 2
    assert err.startswith(f"error: {argv[0]}: ConfigError")


def test_bad_flag_rejected(capsys):
    with pytest.raises(SystemExit) as e:
        main(["eval", "--k", "3"])
    assert e.value.code == 2


def test_json_output(capsys):
    code, out, _ = run_cli(capsys, "gaps", "--zeros", str(REFERENCE_ZEROS), "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"] == list(COLUMNS["gaps"])
    assert len(doc["rows"]) == 99
    assert doc["rows"][0]["normalized"] is None
    assert doc["summary"]["A"] > 0


def test_export_roundtrip(capsys, tmp_path):
    target = tmp_path / "t.txt"
    code, out, _ = run_cli(capsys, "export", "--zeros", str(REFERENCE_ZEROS), "--range", "0", "50", "--out", str(target))
    assert code == 0 and out == ""
    back = read_zero_table(target)
    assert len(back) == 10 and back.h_max == 50.0


def test_corollary_and_probes(capsys):
    code, out, _ = run_cli(capsys, "corollary", "--range", "20", "200", "--zeros", str(REFERENCE_ZEROS))
    assert code == 0
    r = rows(out)
    assert r and all(float(x["delta"]) > 0 and float(x["p_min"]) > 0 for x in r)
    code, out, _ = run_cli(capsys, "moser-probe", "--range", "14", "236", "--beta", "0.25", "--zeros", str(REFERENCE_ZEROS))
    assert code == 0
    code, out, _ = run_cli(capsys, "omega", "--range", "20", "40")
    assert code == 0 and len(rows(out)) >= 1
    code, out, _ = run_cli(capsys, "verify-lemma", "--range", "50", "110", "--count", "3", "--zeros", str(REFERENCE_ZEROS))
    assert code == 0 and len(rows(out)) == 3


def test_help_documents_columns():
    text = build_parser().format_help()
    for cmd, cols in COLUMNS.items():
        assert cmd in text
        assert ", ".join(cols) in text


def test_progress_log_on_stderr(capsys):
    main(["eval", "--t", "30"])
    out, err = capsys.readouterr()
    assert "zetacosmo: eval: start" in err
    assert "start" not in out
