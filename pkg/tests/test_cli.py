"""Command-line interface: output formats, exit codes, cache wiring."""

import os

from click.testing import CliRunner

from redgw.cli import main
from redgw.store import ENV_CACHE_PATH


def _run(args, env=None):
    return CliRunner().invoke(main, args, env=env)


def test_compute_prints_canonical_rational():
    res = _run(["compute", "--theory", "relative", "--genus", "0", "-d", "2",
                "--tangency", "2", "--insertions",
                "H^0*psi^0,H^2*psi^0,H^2*psi^0,H^2*psi^0,H^2*psi^0"])
    assert res.exit_code == 0, res.output
    assert res.stdout == "2/1\n"  # conics through 4 points tangent to a line


def test_compute_genus_override():
    res = _run(["compute", "--theory", "absolute-X-g0", "--genus", "1",
                "-d", "3", "--insertions", ",".join(["H^2*psi^0"] * 9)])
    assert res.exit_code == 0, res.output
    assert res.output == "1/1\n"


def test_compute_fractional_value():
    res = _run(["compute", "--theory", "absolute-X-g0", "--genus", "1",
                "-d", "3",
                "--insertions", "H^2*psi^2," + ",".join(["H^2*psi^0"] * 6)])
    assert res.exit_code == 0, res.output
    assert res.output == "7/2\n"


def test_dimension_mismatch_prints_zero_with_warning():
    res = _run(["compute", "--theory", "absolute-X-g0", "-d", "3",
                "--insertions", ",".join(["H^2*psi^0"] * 7)])
    assert res.exit_code == 0
    assert res.stdout == "0/1\n"
    assert "virtual dimension" in res.stderr


def test_parse_errors_exit_2():
    res = _run(["compute", "--theory", "relative", "-d", "2",
                "--tangency", "2,x"])
    assert res.exit_code == 2
    res = _run(["compute", "--theory", "relative", "-d", "2",
                "--insertions", "H^2&psi^0"])
    assert res.exit_code == 2


def test_validation_errors_exit_3():
    # tangency orders exceeding the degree fail key validation
    res = _run(["compute", "--theory", "relative", "-d", "1",
                "--tangency", "2", "--insertions", "H^0*psi^0"])
    assert res.exit_code == 3
    assert "error" in res.stderr


def test_fixture_conflict_exits_4(tmp_path):
    cache = tmp_path / "cache.tsv"
    bad_fixture = (
        "# redgw cache v1 m=2\n"
        "theory=AbsoluteAmbient m=2 genus=1 degree=3 "
        "insertions=" + ";".join(["H^2*psi^0"] * 9) + "\t5/1\tfixture\n"
    )
    cache.write_text(bad_fixture)
    res = _run(["compute", "--theory", "absolute-X-g0", "--genus", "1",
                "-d", "3", "--insertions", ",".join(["H^2*psi^0"] * 9),
                "--cache", str(cache)])
    assert res.exit_code == 4
    assert "conflict" in res.stderr


def test_cache_roundtrip_and_env_var(tmp_path):
    cache = tmp_path / "cache.tsv"
    args = ["compute", "--theory", "absolute-X-g0", "-d", "3",
            "--insertions", ",".join(["H^2*psi^0"] * 8)]
    res = _run(args + ["--cache", str(cache)])
    assert res.exit_code == 0 and res.output == "12/1\n"
    text = cache.read_text()
    assert text.startswith("# redgw cache v1 m=")
    assert "\t12/1\tcomputed" in text
    # second run replays from the cache byte-identically
    res = _run(args, env={ENV_CACHE_PATH: str(cache)})
    assert res.exit_code == 0 and res.output == "12/1\n"
    assert cache.read_text() == text


def test_write_failure_exits_5(tmp_path):
    res = _run(["compute", "--theory", "absolute-X-g0", "-d", "1",
                "--insertions", "H^2*psi^0,H^2*psi^0",
                "--cache", str(tmp_path / "no" / "such" / "dir" / "c.tsv")])
    assert res.exit_code == 5


def test_trace_writes_file_and_replays(tmp_path):
    out = tmp_path / "trace.txt"
    res = _run(["trace", "--theory", "relative", "-d", "3",
                "--tangency", "3", "--insertions",
                "H^1*psi^0," + ",".join(["H^2*psi^0"] * 6),
                "--out", str(out)])
    assert res.exit_code == 0, res.output
    assert res.output == "1/1\n"
    text = out.read_text()
    assert text.startswith("[") and "key=theory=Relative" in text


def test_strata_table_lists_kinds_and_multiplicities():
    res = _run(["strata", "-d", "2", "--tangency", "1,1"])
    assert res.exit_code == 0, res.output
    lines = res.output.strip().splitlines()
    assert lines[0] == "kind\tslopes\tvanishing\tsplitting\tfactor"
    kinds = {line.split("\t")[0] for line in lines[1:]}
    assert kinds <= {"I", "II", "III", "Dagger"} and len(kinds) >= 2
    res_i = _run(["strata", "-d", "2", "--tangency", "1,1", "--kind", "I"])
    assert {l.split("\t")[0] for l in
            res_i.output.strip().splitlines()[1:]} == {"I"}


def test_table_matches_known_counts():
    res = _run(["table", "--degree-max", "2", "--genus", "0"])
    assert res.exit_code == 0, res.output
    rows = {}
    for line in res.output.strip().splitlines()[1:]:
        d, alpha, beta, count = line.split("\t")
        rows[(int(d), alpha, beta)] = count
    # lines through 2 points; conics through 5 points; tangent conics
    assert rows[(1, "0", "1")] == "1/1"
    assert rows[(2, "0,0", "2,0")] == "1/1"
    assert rows[(2, "0,0", "0,1")] == "2/1"


def test_table_jobs_gives_identical_output():
    serial = _run(["table", "--degree-max", "2"])
    parallel = _run(["table", "--degree-max", "2", "--jobs", "4"])
    assert serial.exit_code == parallel.exit_code == 0
    assert serial.output == parallel.output


def test_selftest_quick_passes_fast():
    import time
    t0 = time.time()
    res = _run(["selftest", "--quick"])
    elapsed = time.time() - t0
    assert res.exit_code == 0, res.output
    assert elapsed < 10
    lines = res.output.strip().splitlines()
    assert lines[-1] == "all checks passed"
    assert all(l.startswith("PASS: ") for l in lines[:-1])
