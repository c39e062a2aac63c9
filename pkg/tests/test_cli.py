"""Command line interface behaviour."""

import csv

import numpy as np
import pytest

from pemb import CompactEmbedding, Navigator, generate_grid_triangulation, load_pg
from pemb.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate_writes_parseable_file(tmp_path, capsys):
    path = str(tmp_path / "g.pg")
    code, out, _ = run(capsys, "generate", "--side", "5", "--seed", "3",
                       "--out", path)
    assert code == 0
    assert "n=25" in out
    emb = load_pg(path)
    ref = generate_grid_triangulation(5, 3)
    assert np.array_equal(emb.etgt, ref.etgt)


def test_build_seq_and_par_produce_identical_files(tmp_path, capsys):
    pg = str(tmp_path / "g.pg")
    run(capsys, "generate", "--side", "6", "--seed", "0", "--out", pg)
    seq = str(tmp_path / "seq.pemb")
    par = str(tmp_path / "par.pemb")
    code, out, _ = run(capsys, "build", "--in", pg, "--seq", "--out", seq)
    assert code == 0 and "seq" in out
    code, out, _ = run(capsys, "build", "--in", pg, "--deterministic",
                       "--threads", "4", "--out", par)
    assert code == 0 and "p=4" in out
    with open(seq, "rb") as f1, open(par, "rb") as f2:
        assert f1.read() == f2.read()


def test_build_claimed_tree_still_valid(tmp_path, capsys):
    pg = str(tmp_path / "g.pg")
    run(capsys, "generate", "--side", "6", "--seed", "1", "--out", pg)
    out_path = str(tmp_path / "c.pemb")
    code, _, _ = run(capsys, "build", "--in", pg, "--threads", "2",
                     "--out", out_path)
    assert code == 0
    compact = CompactEmbedding.load(out_path)
    nav = Navigator(compact)
    assert sum(nav.counting(v) for v in range(1, compact.n + 1)) == 2 * compact.m


def test_threads_zero_is_a_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit):
        main(["build", "--in", "x.pg", "--threads", "0", "--out", "y"])


def test_query_commands(tmp_path, capsys):
    pg = str(tmp_path / "g.pg")
    run(capsys, "generate", "--side", "4", "--seed", "2", "--out", pg)
    built = str(tmp_path / "g.pemb")
    run(capsys, "build", "--in", pg, "--seq", "--out", built)
    nav = Navigator(CompactEmbedding.load(built))
    code, out, _ = run(capsys, "query", "--in", built, "--op", "counting",
                       "--arg", "3")
    assert code == 0 and int(out.strip()) == nav.counting(3)
    code, out, _ = run(capsys, "query", "--in", built, "--op", "listing",
                       "--arg", "3")
    assert [int(x) for x in out.split()] == nav.listing(3)
    code, out, _ = run(capsys, "query", "--in", built, "--op", "face",
                       "--arg", "1")
    assert [int(x) for x in out.split()] == nav.face(1)


def test_query_out_of_range_is_reported(tmp_path, capsys):
    pg = str(tmp_path / "g.pg")
    run(capsys, "generate", "--side", "3", "--seed", "0", "--out", pg)
    built = str(tmp_path / "g.pemb")
    run(capsys, "build", "--in", pg, "--seq", "--out", built)
    code, _, err = run(capsys, "query", "--in", built, "--op", "counting",
                       "--arg", "99")
    assert code == 1
    assert "error:" in err


def test_missing_input_is_reported(capsys):
    code, _, err = run(capsys, "build", "--in", "/nonexistent.pg",
                       "--out", "/tmp/never.pemb")
    assert code == 1
    assert "error:" in err


def test_bench_csv_schema(tmp_path, capsys):
    pg = str(tmp_path / "g.pg")
    run(capsys, "generate", "--side", "5", "--seed", "0", "--out", pg)
    out_csv = str(tmp_path / "t.csv")
    code, out, _ = run(capsys, "bench", "--in", pg, "--threads", "1,2",
                       "--reps", "2", "--csv", out_csv, "--queries")
    assert code == 0
    with open(out_csv) as fh:
        rows = list(csv.DictReader(fh))
    assert set(rows[0].keys()) == {"dataset", "n", "m", "threads", "phase",
                                   "median_seconds", "peak_bytes",
                                   "payload_bits", "support_bits"}
    phases = {"spanning-tree", "euler", "list-rank", "scatter", "bstar",
              "support", "total"}
    # one sequential block (threads=0) plus one block per thread count
    assert {r["threads"] for r in rows} == {"0", "1", "2"}
    for tgroup in ("0", "1", "2"):
        assert {r["phase"] for r in rows if r["threads"] == tgroup} == phases
    assert all(float(r["median_seconds"]) >= 0 for r in rows)
    assert "per call" in out


def test_threads_default_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("PEMB_THREADS", "3")
    from pemb.cli import make_parser
    args = make_parser().parse_args(["build", "--in", "a", "--out", "b"])
    assert args.threads == 3