"""End-to-end runs of every CLI path against the shipped fixtures."""

import json
import os

import pytest

from xplab.cli import run

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def _read(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _run_in_fixtures(argv, monkeypatch):
    monkeypatch.chdir(FIXTURES)
    return run(argv)


@pytest.fixture
def out(tmp_path):
    return str(tmp_path / "report.json")


def test_norm(fix, out):
    assert run(["norm", "--x", fix("x_pair.json"), "--out", out]) == 0
    rep = _read(out)
    assert rep["command"] == "norm"
    assert rep["data"]["norm_p"] == pytest.approx(2.0 ** 0.25, rel=1e-14)
    assert rep["verdict"] is True


def test_norm_stdout(fix, capsys):
    assert run(["norm", "--x", fix("x_pair.json")]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["data"]["norm_2w"] == pytest.approx(1.25 ** 0.5, rel=1e-14)


def test_blocks_rosenthal(fix, out):
    assert run(["blocks", "rosenthal", "--space", fix("space_pair.json"), "--I", "1,2", "--out", out]) == 0
    blk = _read(out)["data"]["block"]
    assert blk["entries"] == [[1, 1.0], [2, 0.5]]
    assert blk["delta"] == 1.0


def test_blocks_check_pass_and_fail(fix, out, tmp_path):
    assert run(["blocks", "check", "--block", fix("block_good.json"), "--space", fix("space_small.json"), "--out", out]) == 0
    bad = _read(fix("block_good.json"))
    bad["delta"] = 0.999
    bad["c"] = 1e-6
    bad_path = str(tmp_path / "bad_block.json")
    with open(bad_path, "w") as fh:
        json.dump(bad, fh)
    code = run(["blocks", "check", "--block", bad_path, "--space", fix("space_small.json"), "--out", out])
    assert code == 2
    rep = _read(out)  # the failing report is still written
    assert rep["verdict"] is False
    assert any(not c["ok"] for c in rep["checks"])


def test_project(fix, out):
    assert run(["project", "--x", fix("x_pair.json"), "--projection", fix("projection_pair.json"), "--out", out]) == 0
    rep = _read(out)
    px = dict((i, v) for i, v in rep["data"]["Px"])
    assert px[1] == pytest.approx(18.0 / 17.0, rel=1e-14)
    assert px[2] == pytest.approx(9.0 / 17.0, rel=1e-14)
    assert rep["data"]["analytic_bound"] >= 1.0


def test_opnorm_fields_and_determinism(fix, out, tmp_path):
    out2 = str(tmp_path / "r2.json")
    assert run(["opnorm", "--op", fix("projection_small.json"), "--seed", "7", "--out", out]) == 0
    assert run(["opnorm", "--op", fix("projection_small.json"), "--seed", "7", "--out", out2]) == 0
    with open(out, "rb") as a, open(out2, "rb") as b:
        assert a.read() == b.read()
    rep = _read(out)
    assert set(rep["data"]) >= {"lower", "witness", "analytic_upper"}
    assert rep["data"]["analytic_upper"] is not None
    assert rep["data"]["lower"] <= rep["data"]["analytic_upper"] * (1 + 1e-9)


def test_opnorm_seed_from_env(fix, out, tmp_path, monkeypatch):
    out2 = str(tmp_path / "r2.json")
    monkeypatch.setenv("XPLAB_SEED", "41")
    assert run(["opnorm", "--op", fix("gram_op.json"), "--out", out]) == 0
    assert _read(out)["seed"] == 41
    monkeypatch.delenv("XPLAB_SEED")
    assert run(["opnorm", "--op", fix("gram_op.json"), "--out", out2]) == 0
    assert _read(out2)["seed"] == 0


def test_split_with_full_constants(fix, out):
    N = _read(fix("split_args.json"))["N"]
    assert run([
        "split", "--x", fix("split_x.json"), "--constants", fix("split_constants.json"),
        "--projection", fix("split_projection.json"), "--N", str(N), "--out", out,
    ]) == 0
    rep = _read(out)
    assert rep["data"]["premise_met"] is True
    assert rep["verdict"] is True


def test_split_with_partial_constants_solves(fix, out):
    N = _read(fix("split_args.json"))["N"]
    sc = _read(fix("split_constants.json"))
    # same inputs as the shipped full constants; norms are measured instead
    partial = json.dumps({"delta": sc["delta"], "c": sc["c"], "eps": sc["eps"]})
    assert run([
        "split", "--x", fix("split_x.json"), "--constants", partial,
        "--projection", fix("split_projection.json"), "--N", str(N), "--out", out,
    ]) == 0
    rep = _read(out)
    assert rep["data"]["premise_met"] is True
    solved = rep["data"]["constants"]
    assert solved["beta"] == pytest.approx(sc["beta"], rel=0.05)


def test_check_thm13(fix, out):
    assert run(["check", "thm13", "--witness", fix("witness_good.json"), "--out", out]) == 0
    rep = _read(out)
    names = {c["name"] for c in rep["checks"]}
    assert {"head_small", "E_mass_share", "window_upper", "mass_vs_window", "window_lower"} <= names


def test_check_proof_bounds(fix, out):
    assert run([
        "check", "proof-bounds", "--y", fix("y_unit.json"), "--F", "1,2",
        "--rho", "0.5", "--delta", "0.5", "--out", out,
    ]) == 0
    assert _read(out)["verdict"] is True


def test_check_prop24(fix, out):
    assert run([
        "check", "prop24", "--z", fix("vlist_span.json"), "--x-sample", fix("xsample.json"),
        "--eps", "0.9", "--beta", "0.5", "--bprime", "0.1", "--out", out,
    ]) == 0


def test_gen_thm13(fix, out):
    ga = _read(fix("gen_args.json"))
    assert run([
        "gen", "thm13", "--space", fix("space_tail.json"), "--eps", str(ga["eps"]),
        "--delta", str(ga["delta"]), "--c", str(ga["c"]), "--count", str(ga["count"]),
        "--seed", "0", "--out", out,
    ]) == 0
    rep = _read(out)
    assert len(rep["data"]["witnesses"]) == ga["count"]
    assert rep["verdict"] is True


def test_gen_thm13_infeasible_is_usage_error(fix, out):
    code = run([
        "gen", "thm13", "--space", fix("space_tail.json"), "--eps", "1.0",
        "--delta", "0.5", "--c", "3.0", "--count", "1", "--out", out,
    ])
    assert code == 1


def test_classify(fix, out):
    assert run(["classify", "kp", "--v", fix("vlist_span.json"), "--C", "2.0", "--out", out]) == 0
    assert _read(out)["data"]["label"] in ("ell2-like", "ellp-like", "mixed")


def test_diag_prop21(fix, out):
    assert run([
        "diag", "prop21", "--u", fix("ulist.json"), "--w", fix("wlist.json"),
        "--projection", fix("projection_small.json"), "--K", "1.2", "--window", "2", "--out", out,
    ]) == 0
    data = _read(out)["data"]
    assert "beta_hat" in data and "bound" in data


def test_experiment_runs_and_is_deterministic(out, tmp_path):
    out2 = str(tmp_path / "r2.json")
    argv = ["experiment", "splitter", "--seed", "5", "--scale", "0.01"]
    assert run(argv + ["--out", out]) == 0
    assert run(argv + ["--out", out2]) == 0
    with open(out, "rb") as a, open(out2, "rb") as b:
        assert a.read() == b.read()
    assert _read(out)["verdict"] is True


def test_experiment_unknown_name_is_usage_error():
    assert run(["experiment", "not-a-driver"]) == 1


def test_weights_gen_and_diag(fix, out):
    assert run(["weights", "gen", "--family", fix("family_powerlaw.json"), "--D", "3", "--out", out]) == 0
    vals = _read(out)["data"]["weights"]
    assert vals == pytest.approx([1.0, 2.0 ** -0.1, 3.0 ** -0.1], rel=1e-14)
    assert run([
        "weights", "diag", "--family", fix("family_doubly.json"), "--eps", "0.9",
        "--D-list", "8,16,32", "--p", "4.0", "--out", out,
    ]) == 0
    assert _read(out)["data"]["flag"] in ("diverging", "saturating")


def test_weights_inline_family(out):
    fam = json.dumps({"kind": "constant", "value": 0.5, "D": 4})
    assert run(["weights", "gen", "--family", fam, "--out", out]) == 0
    assert _read(out)["data"]["weights"] == [0.5, 0.5, 0.5, 0.5]


def test_csv_export(fix, out, tmp_path):
    csv = str(tmp_path / "rows.csv")
    assert run([
        "check", "thm13", "--witness", fix("witness_good.json"), "--out", out, "--csv", csv,
    ]) == 0
    lines = open(csv).read().splitlines()
    assert lines[0] == "name,lhs,op,rhs,ok"
    assert len(lines) == len(_read(out)["checks"]) + 1


def test_batch_aggregates(out, monkeypatch, tmp_path):
    monkeypatch.chdir(FIXTURES)
    assert run(["batch", "--config", "batch_small.json", "--out", out]) == 0
    rep = _read(out)
    assert rep["data"]["counts"] == {"pass": 3, "fail": 0}


def test_batch_counts_a_failing_check(fix, out, tmp_path, capsys):
    bad = _read(fix("block_good.json"))
    bad["delta"] = 0.999
    bad["c"] = 1e-6
    bad_path = str(tmp_path / "bad_block.json")
    with open(bad_path, "w") as fh:
        json.dump(bad, fh)
    cfg = {"runs": [
        ["norm", "--x", fix("x_pair.json")],
        ["blocks", "check", "--block", bad_path, "--space", fix("space_small.json")],
    ]}
    cfg_path = str(tmp_path / "cfg.json")
    with open(cfg_path, "w") as fh:
        json.dump(cfg, fh)
    assert run(["batch", "--config", cfg_path, "--out", out]) == 2
    rep = _read(out)
    assert rep["data"]["counts"] == {"pass": 1, "fail": 1}
    assert rep["data"]["runs"][1]["exit"] == 2
    assert rep["verdict"] is False


def test_batch_validates_before_running(monkeypatch, tmp_path):
    # one malformed argv aborts the whole batch before anything executes
    probe = str(tmp_path / "probe.json")
    cfg = {"runs": [
        ["norm", "--x", "x_pair.json", "--out", probe],
        ["norm", "--no-such-flag"],
    ]}
    cfg_path = str(tmp_path / "cfg.json")
    with open(cfg_path, "w") as fh:
        json.dump(cfg, fh)
    monkeypatch.chdir(FIXTURES)
    assert run(["batch", "--config", cfg_path]) == 1
    assert not os.path.exists(probe)


def test_batch_empty_is_success(tmp_path, out):
    cfg_path = str(tmp_path / "cfg.json")
    with open(cfg_path, "w") as fh:
        json.dump({"runs": []}, fh)
    assert run(["batch", "--config", cfg_path, "--out", out]) == 0


def test_batch_rejects_nesting(tmp_path):
    cfg_path = str(tmp_path / "cfg.json")
    with open(cfg_path, "w") as fh:
        json.dump({"runs": [["batch", "--config", "x.json"]]}, fh)
    assert run(["batch", "--config", cfg_path]) == 1


def test_malformed_json_is_usage_error(tmp_path):
    path = str(tmp_path / "broken.json")
    with open(path, "w") as fh:
        fh.write("{not json")
    assert run(["norm", "--x", path]) == 1


def test_missing_field_is_usage_error(tmp_path, capsys):
    path = str(tmp_path / "vec.json")
    with open(path, "w") as fh:
        json.dump({"p": 4.0, "weights": [1.0]}, fh)
    assert run(["norm", "--x", path]) == 1
    assert "entries" in capsys.readouterr().err


def test_unknown_subcommand_is_usage_error():
    assert run(["frobnicate"]) == 1


def test_help_exits_zero(capsys):
    assert run(["--help"]) == 0
    capsys.readouterr()
