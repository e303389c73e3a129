import json

import pytest

from ultraacv.cli import main
from ultraacv.combinatorics import catalan
from ultraacv.verify import verify_suite


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


class TestLaw:
    def test_cdf(self, capsys):
        code, out = run(capsys, "law", "cdf", "--law", "quarter", "--x", "1")
        assert code == 0
        assert float(out.out) == pytest.approx(0.608998, abs=1e-6)

    def test_moment(self, capsys):
        code, out = run(capsys, "law", "moment", "--law", "squared", "--k", "4")
        assert code == 0 and out.out.strip() == "14"

    def test_stieltjes(self, capsys):
        code, out = run(capsys, "law", "stieltjes", "--re", "-1")
        assert code == 0
        assert json.loads(out.out)["re"] == pytest.approx(0.6180340, abs=1e-7)

    def test_stieltjes_cut(self, capsys):
        code, out = run(capsys, "law", "stieltjes", "--re", "2")
        assert code == 2 and "error" in out.err


class TestCombinatorics:
    def test_catalan(self, capsys):
        assert run(capsys, "combinatorics", "catalan", "--k", "10")[1].out.strip() == "16796"

    def test_dyck_budget(self, capsys):
        code, out = run(capsys, "combinatorics", "dyck", "--k", "20")
        assert code == 2

    def test_isobound(self, capsys):
        out = run(capsys, "combinatorics", "isobound", "--k", "3", "--t", "2", "--s", "4")[1]
        assert out.out.strip() == "24"


class TestSimulate:
    def test_twice_identical(self, tmp_path, capsys):
        args = ["simulate", "--p", "8", "--T", "200", "--reps", "3", "--seed", "5"]
        assert main(args + ["--out", str(tmp_path / "a.csv")]) == 0
        assert main(args + ["--out", str(tmp_path / "b.csv")]) == 0
        a = (tmp_path / "a.csv").read_bytes()
        assert a == (tmp_path / "b.csv").read_bytes()
        assert len(a.splitlines()) == 4

    def test_histogram_and_jsonl(self, tmp_path):
        code = main(["simulate", "--p", "8", "--T", "200", "--reps", "2", "--format", "jsonl",
                     "--out", str(tmp_path / "r.jsonl"), "--histogram", str(tmp_path / "h.csv"),
                     "--bins", "10"])
        assert code == 0
        assert len((tmp_path / "h.csv").read_text().splitlines()) == 11
        rec = json.loads((tmp_path / "r.jsonl").read_text())
        assert len(rec["replications"]) == 2

    def test_bad_dist(self, tmp_path, capsys):
        code, out = run(capsys, "simulate", "--p", "4", "--T", "20", "--dist", "cauchy",
                        "--out", str(tmp_path / "x.csv"))
        assert code == 2

    def test_bad_output_path(self, tmp_path, capsys):
        code, _ = run(capsys, "simulate", "--p", "4", "--T", "20",
                      "--out", str(tmp_path / "nope" / "x.csv"))
        assert code == 2


class TestSweep:
    def test_sweep_outputs(self, tmp_path, capsys):
        conf = tmp_path / "s.json"
        conf.write_text(json.dumps({"mode": "ultra", "alpha": 0.5, "T_list": [16, 64],
                                    "replications": 2}))
        outs = []
        for w in ("1", "2"):
            d = tmp_path / f"out{w}"
            assert main(["sweep", "--config", str(conf), "--out", str(d), "--workers", w]) == 0
            outs.append(d)
        for name in ("records.csv", "records.jsonl", "summary.json"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
        summary = json.loads((outs[0] / "summary.json").read_text())
        assert len(summary["points"]) == 2

    def test_bad_config(self, tmp_path, capsys):
        conf = tmp_path / "s.json"
        conf.write_text(json.dumps({"mode": "ultra", "T_list": [16]}))
        assert run(capsys, "sweep", "--config", str(conf), "--out", str(tmp_path / "o"))[0] == 2


class TestVerify:
    def test_all_pass(self, capsys):
        code, out = run(capsys, "verify")
        assert code == 0
        assert "checks passed" in out.out

    def test_json(self, capsys):
        code, out = run(capsys, "verify", "--json")
        data = json.loads(out.out)
        assert code == 0 and len(data["checks"]) >= 20

    def test_tampered_catalan_flagged(self):
        def bad(k):
            return 43 if k == 5 else catalan(k)
        report = verify_suite(catalan=bad)
        assert not report.passed
        assert report.failures
        assert all(c.passed for c in verify_suite().checks)
