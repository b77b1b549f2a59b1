import json

import pytest
from click.testing import CliRunner

from algentropy.cli import main

HV_DEGREES = "1,3,9,27,73,195,513,1347,3529,9243,24201,63363"


@pytest.fixture
def run(tmp_path, monkeypatch):
    monkeypatch.setenv("ALGENTROPY_OEIS_CACHE", str(tmp_path / "oeis"))
    runner = CliRunner()

    def go(*args):
        return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)

    return go


def test_degrees_line(run):
    res = run("degrees", "hv", "--n", 11)
    assert res.exit_code == 0
    assert res.output.strip() == HV_DEGREES


def test_degrees_formats(run):
    res = run("degrees", "hv", "--n", 4, "--format", "csv")
    assert res.output.splitlines()[:2] == ["n,degree", "0,1"]
    doc = json.loads(run("degrees", "hv", "--n", 4, "--format", "json").output)
    assert doc["values"] == [1, 3, 9, 27, 73]


def test_artifacts_are_deterministic(run, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("degrees", "f4", "--n", 12, "--out", a)
    run("degrees", "f4", "--n", 12, "--out", b)
    strip = lambda p: {k: v for k, v in json.loads(p.read_text()).items() if k not in ("extra",)}
    assert strip(a) == strip(b)


def test_degree_artifact_feeds_entropy_and_oeis(run, tmp_path):
    art = tmp_path / "hv.json"
    assert run("degrees", "hv", "--n", 11, "--out", art).exit_code == 0
    res = run("entropy", art, "--holdout", 4, "--table")
    assert res.exit_code == 0
    assert "s^2 - 3*s + 1" in res.output
    assert "verdict: consistent" in res.output
    assert "2.618197" in res.output
    res = run("oeis", art, "--offline")
    assert res.exit_code == 0
    assert "A084707" in res.output


def test_oeis_uncached_offline_exits_5(run):
    res = run("oeis", "2,7,1,8,2,8", "--offline")
    assert res.exit_code == 5


def test_bad_map_exits_2(run, tmp_path):
    bad = tmp_path / "bad.map"
    bad.write_text('[map]\nvars = ["x", "y"]\nphi = ["x^2", "y"]\n')
    res = run("degrees", bad)
    assert res.exit_code == 2
    assert "error" in res.output.lower()


def test_missing_map_is_usage_error(run):
    assert run("degrees", "no-such-map").exit_code == 2


def test_budget_exits_3(run):
    res = run("degrees", "hv", "--mode", "exact", "--n", 11, "--max-seconds", 0.5)
    assert res.exit_code == 3
    assert res.output.startswith("partial: 1,3,9")


def test_derive_from_relation_text(run):
    res = run("derive", "--relation", "ref:relations#f4_at_44")
    assert res.exit_code == 0
    assert "1.400618098" in res.output


def test_derive_line_mode_round_trip(run, tmp_path):
    art = tmp_path / "rel.json"
    assert run("derive", "hv", "--mode", "line", "--n", 12, "--out", art).exit_code == 0
    res = run("entropy", "ref:hv", "--holdout", 4, "--relation", art)
    assert res.exit_code == 0
    assert "Method2" in res.output and "verdict: consistent" in res.output


def test_factors_report(run):
    res = run("factors", "hv", "--n", 10, "--family", "A")
    assert res.exit_code == 0
    assert "A[k-3]^3*A[k]" in res.output


def test_laurent_command(run):
    res = run("laurent", "ref:relations#hv_derived", "--steps", 4, "--point", "z=1")
    assert res.exit_code == 0
    assert "2, 6, 56, 683776" in res.output


def test_expand_compare_flags_discrepancy(run):
    res = run("expand", "--gf", "ref:gf_4d#g_p", "--compare", "ref:f4")
    assert res.exit_code == 0
    assert "DISCREPANCY at index 53" in res.output


def test_validation_of_options(run):
    assert run("degrees", "hv", "--trials", 1).exit_code == 2
    assert run("degrees", "hv", "--n", -1).exit_code == 2
