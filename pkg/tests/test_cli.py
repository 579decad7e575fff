import csv
import io
import json
import subprocess
import sys

import pytest

from cubeiso import experiments as ex
from cubeiso.cli import EXIT_CAPACITY, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main
from cubeiso.tribes import exact_bilinear_variance, estimate_metrics, sample_counterexample

GOLDEN_SWEEP = """\
n,seed,method,max_neg_inf,eps_or_proxy,ratio
4,0,mincut,0.1640625,0.15234375,4.1431242199888185
4,1,mincut,0.1640625,0.15234375,4.1431242199888185
4,2,mincut,0.078125,0.0703125,4.274651973004337
8,0,mincut,0.063873291015625,0.1456451416015625,2.530799975342567
8,1,mincut,0.068511962890625,0.1638946533203125,2.4123268722061058
8,2,mincut,0.073577880859375,0.1629791259765625,2.6052524996410753
"""


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def strip_time(rec):
    rec = dict(rec)
    rec.pop("wall_time")
    return rec


class TestAnalyze:
    def test_dictator(self, capsys):
        code, out, _ = run(capsys, "analyze", "zoo:dictator,m=3,i=1")
        assert code == EXIT_OK
        res = json.loads(out)["results"]
        assert res["eps"]["eps"] == {"num": 0, "den": 1}
        assert res["influence_report"]["total_influence"] == {"num": 1, "den": 1}
        assert all(v["num"] == 0 for v in res["influence_report"]["neg_inf"])

    def test_parity(self, capsys):
        res = json.loads(run(capsys, "analyze", "zoo:parity,m=2")[1])["results"]
        assert res["influence_report"]["total_influence"] == {"num": 2, "den": 1}
        assert res["eps"]["eps"] == {"num": 1, "den": 4}
        assert res["eps"]["method"] == "mincut"
        assert res["eps"]["matching_lower_bound"] == {"num": 1, "den": 4}

    def test_record_envelope(self, capsys):
        rec = json.loads(run(capsys, "analyze", "zoo:majority,m=3")[1])
        assert set(rec) == {"command", "parameters", "results", "wall_time", "version"}
        assert rec["command"] == "analyze" and rec["parameters"] == {"spec": "zoo:majority,m=3"}
        assert set(rec["results"]["inequalities"]) == {
            "poincare", "talagrand", "kkl", "eldan_gross", "directed_talagrand", "directed_kkl"
        }

    def test_tribes_golden(self, capsys):
        res = json.loads(run(capsys, "analyze", "tribes-ce:n=4,seed=7")[1])["results"]
        assert res["instance"]["tribes"] == [[3, 4], [3, 4], [3, 4], [2, 4]]
        neg = res["influence_report"]["neg_inf"]
        assert all(v["num"] == 0 for v in neg[:4])
        assert neg[4:] == [{"num": 3, "den": 64}] * 3 + [{"num": 9, "den": 64}]
        assert res["eps"] == {
            "eps": {"num": 11, "den": 128}, "changed_points": 22, "method": "mincut",
            "matching_lower_bound": {"num": 11, "den": 128},
        }
        ineq = res["inequalities"]
        assert ineq["poincare"]["ratio"] == {"num": 21760, "den": 3367}
        assert ineq["directed_kkl"]["ratio"] == pytest.approx(6.2953965420609315, rel=1e-12)
        assert ineq["kkl"]["ratio"] == pytest.approx(10.822855105276913, rel=1e-12)

    def test_tribes_sampled(self, capsys):
        code, out, _ = run(capsys, "analyze", "tribes-ce:n=16,seed=0", "--samples", "2000", "--seed", "3")
        rec = json.loads(out)
        assert code == EXIT_OK
        assert rec["results"]["method"] == "bilinear-proxy"
        assert rec["parameters"] == {"spec": "tribes-ce:n=16,seed=0", "samples": 2000, "seed": 3}
        assert sum(rec["results"]["sampled"]["fired_hist"]) == 2000

    def test_no_eps(self, capsys):
        res = json.loads(run(capsys, "analyze", "zoo:parity,m=3", "--no-eps")[1])["results"]
        assert "eps" not in res and "directed_kkl" not in res["inequalities"]

    def test_tribes_json_reference(self, capsys, tmp_path):
        path = tmp_path / "inst.json"
        path.write_text(json.dumps(sample_counterexample(4, 7).to_json()))
        a = json.loads(run(capsys, "analyze", f"tribes-ce:json={path}")[1])["results"]
        b = json.loads(run(capsys, "analyze", "tribes-ce:n=4,seed=7")[1])["results"]
        assert a == b

    def test_deterministic(self, capsys):
        argv = ("analyze", "tribes-ce:n=32,seed=5", "--samples", "3000", "--seed", "9")
        a = json.loads(run(capsys, *argv)[1])
        b = json.loads(run(capsys, *argv)[1])
        assert strip_time(a) == strip_time(b)


class TestErrors:
    @pytest.mark.parametrize("spec,token", [
        ("nonsense", "nonsense"),
        ("zoo:parity,m=x", "'x'"),
        ("zoo:majority,m=4", "odd"),
        ("tribes-ce:n=3,seed=0", "power of two"),
        ("zoo:frob,m=2", "frob"),
    ])
    def test_usage(self, capsys, spec, token):
        code, _, err = run(capsys, "analyze", spec)
        assert code == EXIT_USAGE
        assert token in err

    def test_argparse_usage(self, capsys):
        assert run(capsys, "analyze")[0] == EXIT_USAGE
        assert run(capsys, "bogus")[0] == EXIT_USAGE
        assert run(capsys, "sweep", "4,x")[0] == EXIT_USAGE

    def test_capacity_names_guard(self, capsys):
        code, _, err = run(capsys, "gen", "zoo:parity,m=17", "--out", "/dev/null")
        assert code == EXIT_CAPACITY and "guard" in err
        code, _, err = run(capsys, "verify", "exhaustive:m=5")
        assert code == EXIT_CAPACITY and "exhaustive" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "analyze", f"file:{tmp_path}/missing.json")
        assert code == EXIT_USAGE and "missing.json" in err

    def test_codes_distinct(self):
        from cubeiso import cli

        codes = [cli.EXIT_OK, cli.EXIT_ERROR, cli.EXIT_USAGE, cli.EXIT_CAPACITY, cli.EXIT_VERIFY,
                 cli.EXIT_STRUCTURE]
        assert len(set(codes)) == len(codes)


class TestCounterexample:
    def test_first_block_zero(self, capsys):
        code, out, _ = run(capsys, "counterexample", "4", "--seeds", "20", "--format", "csv")
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 20
        assert [int(r["seed"]) for r in rows] == list(range(20))
        assert all(float(r["max_neg_inf_first_block"]) == 0 for r in rows)
        assert all(float(r["max_neg_inf_second_block"]) <= 0.25 for r in rows)
        assert all(r["method"] == "mincut" for r in rows)

    def test_json(self, capsys):
        rec = json.loads(run(capsys, "counterexample", "2", "--seeds", "2", "--seed", "5")[1])
        assert rec["parameters"]["seed"] == 5
        assert [r["seed"] for r in rec["results"]] == [5, 6]
        assert rec["results"][0]["inv_n"] == {"num": 1, "den": 2}

    def test_sampled_rows_labeled(self):
        row = ex.counterexample_row(16, 0, samples=2000)
        assert row["method"] == "bilinear-proxy"
        assert row["max_neg_inf_first_block"] == 0


class TestSweep:
    def test_golden_csv(self, capsys):
        code, out, _ = run(capsys, "sweep", "8,4", "--seeds", "3")
        assert code == EXIT_OK
        assert out == GOLDEN_SWEEP

    def test_injected(self, capsys):
        out = run(capsys, "sweep", "4", "--seeds", "1",
                  "--function", "zoo:majority,m=3", "--function", "zoo:parity,m=3")[1]
        rows = list(csv.DictReader(io.StringIO(out)))
        assert list(rows[0]) == list(ex.SWEEP_COLUMNS)
        assert rows[1]["n"] == "3" and rows[1]["seed"] == "" and rows[1]["ratio"] == "undefined"
        assert float(rows[2]["ratio"]) > 0

    def test_json_medians(self, capsys):
        rec = json.loads(run(capsys, "sweep", "4", "--seeds", "3", "--format", "json")[1])
        assert len(rec["rows"]) == 3
        assert rec["median_ratio"]["4"] == pytest.approx(4.1431242199888185)

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        code, out, _ = run(capsys, "sweep", "4,8", "--seeds", "3", "--out", str(path))
        assert code == EXIT_OK and out == ""
        assert path.read_text() == GOLDEN_SWEEP


class TestVerify:
    def test_bundled_baselines_pass(self, capsys):
        code, out, _ = run(capsys, "verify", "exhaustive:m=3", "zoo:majority,m=3", "zoo:majority,m=5",
                           "zoo:majority,m=7")
        assert code == EXIT_OK
        items = json.loads(out)["results"]["items"]
        m3 = items[0]["minima"]
        assert m3["poincare"]["ratio"] == {"num": 4, "den": 1}
        assert m3["directed_talagrand"]["ratio"] == 1.0
        assert m3["directed_talagrand"]["witness"].startswith("table:m=3,bits=")
        for entry in items[1:]:
            assert isinstance(entry["minima"]["kkl"]["ratio"], float)

    def test_baselines_cover_corpus(self):
        base = ex.load_baselines()
        for key in ("exhaustive:m=1", "exhaustive:m=2", "exhaustive:m=3", "exhaustive:m=4",
                    "zoo:majority,m=3", "zoo:majority,m=5", "zoo:majority,m=7"):
            assert "poincare" in base[key]

    def test_undercut_baseline_fails(self, capsys, tmp_path):
        path = tmp_path / "b.json"
        path.write_text(json.dumps({"exhaustive:m=2": {"kkl": 100.0}}))
        code, _, err = run(capsys, "verify", "exhaustive:m=2", "--baselines", str(path))
        assert code == EXIT_VERIFY and "kkl" in err

    def test_write_baselines(self, capsys, tmp_path):
        path = tmp_path / "b.json"
        assert run(capsys, "verify", "random:m=5,count=20,seed=1", "--write-baselines", str(path))[0] == 0
        assert run(capsys, "verify", "random:m=5,count=20,seed=1", "--baselines", str(path))[0] == 0
        assert "random:m=5,count=20,seed=1" in json.loads(path.read_text())

    def test_bad_corpus(self, capsys):
        assert run(capsys, "verify", "random:m=5")[0] == EXIT_USAGE


class TestGen:
    def test_parity(self, capsys, tmp_path):
        path = tmp_path / "p.json"
        assert run(capsys, "gen", "zoo:parity,m=2", "--out", str(path))[0] == EXIT_OK
        assert path.read_text() == '{"m":2,"bits":"0110"}'

    def test_tribes_golden(self, capsys, tmp_path):
        path = tmp_path / "t.json"
        run(capsys, "gen", "tribes-ce:n=2,seed=1", "--out", str(path))
        assert path.read_text() == '{"m":4,"bits":"0111001101010000"}'

    @pytest.mark.parametrize("fmt", ["json-bits", "raw"])
    def test_round_trip(self, capsys, tmp_path, fmt):
        path = tmp_path / "maj.bin"
        code, out, _ = run(capsys, "gen", "zoo:majority,m=5", "--out", str(path), "--table-format", fmt)
        assert code == EXIT_OK
        written = out.strip()
        direct = json.loads(run(capsys, "analyze", "zoo:majority,m=5")[1])
        via = json.loads(run(capsys, "analyze", f"file:{written}")[1])
        assert direct["results"] == via["results"]


def test_cross_path_consistency():
    hits = total = 0
    for n in (2, 4, 8):
        for seed in range(7):
            inst = sample_counterexample(n, seed)
            rep = estimate_metrics(inst, 20000, seed=seed)
            exact = float(exact_bilinear_variance(inst))
            hits += abs(rep.var_proxy - exact) <= 3 * rep.se_var_proxy + 1e-15
            total += 1
    assert hits / total >= 0.95


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "cubeiso.cli", "gen", "zoo:parity,m=2", "--out", "/dev/stdout"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.startswith('{"m":2,"bits":"0110"}')
