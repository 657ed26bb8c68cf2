"""End-to-end checks of the opo command-line tool.

Usage: test_cli.py <path-to-opo-binary>
"""
import csv
import json
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

OPO = None


def run(*args, check=True):
    proc = subprocess.run([OPO, *map(str, args)], capture_output=True, text=True, timeout=300)
    if check and proc.returncode != 0:
        raise AssertionError(f"opo {' '.join(map(str, args))} exited {proc.returncode}: {proc.stderr}")
    return proc


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class CliTest(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def generate(self, name, *extra):
        out = self.tmp / name
        run("generate", "--out", out, *extra)
        return out

    def test_generate_counts_and_determinism(self):
        a = self.generate("a.jsonl", "--env", "hard", "--n", 1000, "--seed", 7)
        b = self.generate("b.jsonl", "--env", "hard", "--n", 1000, "--seed", 7)
        lines = a.read_text().splitlines()
        self.assertEqual(len(lines), 1001)
        header = json.loads(lines[0])["header"]
        self.assertEqual(header["seed"], 7)
        self.assertEqual(header["rng"], "splitmix64-counter")
        self.assertEqual(a.read_bytes(), b.read_bytes())
        self.assertEqual(Path(f"{a}.env.json").read_bytes(), Path(f"{b}.env.json").read_bytes())
        c = self.generate("c.jsonl", "--env", "hard", "--n", 1000, "--seed", 8)
        self.assertNotEqual(a.read_bytes(), c.read_bytes())

    def test_generate_rejects_empty_request(self):
        proc = run("generate", "--env", "hard", "--n", 0, "--seed", 7, "--out", self.tmp / "x.jsonl", check=False)
        self.assertEqual(proc.returncode, 2)
        self.assertIn("n must be ≥ 1", proc.stderr)

    def test_generate_requires_seed(self):
        proc = run("generate", "--n", 10, "--out", self.tmp / "x.jsonl", check=False)
        self.assertEqual(proc.returncode, 2)

    def test_unknown_oracle_is_usage_error(self):
        ds = self.generate("d.jsonl", "--n", 50, "--seed", 1)
        proc = run("train", "--dataset", ds, "--oracle", "magic", "--beta", 0.1, "--out", self.tmp / "t", check=False)
        self.assertEqual(proc.returncode, 2)

    def test_train_then_evaluate_round_trips(self):
        ds = self.generate("d.jsonl", "--env", "random", "--n", 300, "--seed", 3)
        env = f"{ds}.env.json"
        for oracle in ("enum", "argmin"):
            out = self.tmp / f"train_{oracle}"
            run("train", "--dataset", ds, "--env", env, "--oracle", oracle, "--beta", 0.05, "--out", out)
            self.assertTrue((out / "policy.json").exists())
            metrics = json.loads((out / "metrics.json").read_text())["runs"][0]
            self.assertAlmostEqual(metrics["objective"], metrics["ipwRisk"] + 0.05 * metrics["pseudoLoss"], places=12)
            self.assertIn("ucbRisk", metrics)
            ev = run("evaluate", "--dataset", ds, "--env", env, "--oracle", oracle, "--beta", 0.05,
                     "--policy", out / "policy.json")
            evaluated = json.loads(ev.stdout)
            for key in ("ipwRisk", "pseudoLoss", "objective", "exactRisk", "ucbRisk"):
                self.assertEqual(evaluated[key], metrics[key], key)

    def test_train_beta_grid_writes_one_policy_per_value(self):
        ds = self.generate("d.jsonl", "--n", 100, "--seed", 4)
        out = self.tmp / "grid"
        run("train", "--dataset", ds, "--beta-grid", "0.01,0.1,1", "--out", out)
        self.assertEqual(sorted(p.name for p in out.glob("policy_*.json")),
                         ["policy_0.json", "policy_1.json", "policy_2.json"])
        single = self.tmp / "single"
        run("train", "--dataset", ds, "--beta-grid", "0.1", "--out", single)
        self.assertEqual([p.name for p in single.glob("policy*.json")], ["policy.json"])

    def test_continuous_train_evaluate_round_trips(self):
        ds = self.generate("c.jsonl", "--env", "continuous", "--n", 200, "--seed", 5)
        out = self.tmp / "ct"
        run("train", "--dataset", ds, "--env", f"{ds}.env.json", "--k", 8, "--bandwidth", 0.25, "--beta", 0.1,
            "--out", out)
        metrics = json.loads((out / "metrics.json").read_text())["runs"][0]
        ev = json.loads(run("evaluate", "--dataset", ds, "--env", f"{ds}.env.json", "--beta", 0.1,
                            "--policy", out / "policy.json").stdout)
        for key in ("ipwRisk", "pseudoLoss", "objective", "exactRisk"):
            self.assertEqual(ev[key], metrics[key], key)

    def test_sweep_rows_and_monotone_pseudo_loss(self):
        ds = self.generate("d.jsonl", "--env", "hard", "--contexts", 2, "--actions", 3, "--n", 200, "--seed", 6)
        out = self.tmp / "sweep.csv"
        run("sweep", "--dataset", ds, "--env", f"{ds}.env.json", "--oracle", "enum", "--beta-grid", "0.01,0.1,1",
            "--out", out)
        rows = read_csv(out)
        self.assertEqual(len(rows), 3)
        self.assertEqual([float(r["beta"]) for r in rows], [0.01, 0.1, 1.0])
        pls = [float(r["pseudo_loss"]) for r in rows]
        self.assertTrue(all(b <= a + 1e-12 for a, b in zip(pls, pls[1:])), pls)
        self.assertTrue(all(r["exact_risk"] != "" for r in rows))

        wide = self.tmp / "wide.csv"
        grid = ",".join(str(b) for b in (0, 0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1, 3, 10))
        run("sweep", "--dataset", ds, "--oracle", "enum", "--beta-grid", grid, "--out", wide)
        pls = [float(r["pseudo_loss"]) for r in read_csv(wide)]
        self.assertTrue(all(b <= a + 1e-12 for a, b in zip(pls, pls[1:])), pls)

        again = self.tmp / "again.csv"
        run("sweep", "--dataset", ds, "--oracle", "enum", "--beta-grid", grid, "--out", again)
        self.assertEqual(wide.read_bytes(), again.read_bytes())

    def test_continuous_sweep_over_bandwidth_grid(self):
        ds = self.generate("c.jsonl", "--env", "continuous", "--n", 300, "--seed", 9)
        out = self.tmp / "csweep.csv"
        run("sweep", "--dataset", ds, "--env", f"{ds}.env.json", "--h-grid-m", 4, "--beta", 0.1, "--out", out)
        rows = read_csv(out)
        self.assertEqual(len(rows), 4)
        self.assertEqual([float(r["h"]) for r in rows], [1.0, 0.5, 1 / 3, 0.25])
        for r in rows:
            self.assertGreaterEqual(int(float(r["k"])), 1)

    def test_verify_passes_and_fails_on_bad_dataset(self):
        report = self.tmp / "verify.json"
        proc = run("verify", "--seed", 1, "--contexts", 4, "--reps", 1000, "--out", report, check=False)
        self.assertEqual(proc.returncode, 0, proc.stderr)
        data = json.loads(report.read_text())
        self.assertTrue(data["passed"])
        names = {c["name"] for c in data["checks"]}
        self.assertIn("ucb_coverage", names)
        for c in data["checks"]:
            if "coverage" in c["name"]:
                self.assertTrue(c["passed"], c)

        ds = self.generate("d.jsonl", "--n", 20, "--seed", 2)
        lines = ds.read_text().splitlines()
        rec = json.loads(lines[3])
        rec["propensities"] = [1.0] + [0.0] * (len(rec["propensities"]) - 1)
        lines[3] = json.dumps(rec)
        bad = self.tmp / "bad.jsonl"
        bad.write_text("\n".join(lines) + "\n")
        proc = run("verify", "--seed", 1, "--reps", 50, "--dataset", bad, "--out", self.tmp / "bad.json",
                   check=False)
        self.assertEqual(proc.returncode, 3)
        data = json.loads((self.tmp / "bad.json").read_text())
        failed = [c["name"] for c in data["checks"] if not c["passed"]]
        self.assertEqual(failed, ["input_dataset_validation"])

    def test_malformed_dataset_reports_line(self):
        bad = self.tmp / "bad.jsonl"
        bad.write_text('{"header": {"num_actions": 2}}\n{"context": {"id": 0}, "action": 0}\n')
        proc = run("train", "--dataset", bad, "--beta", 0.1, "--out", self.tmp / "t", check=False)
        self.assertEqual(proc.returncode, 2)
        self.assertIn("line 2", proc.stderr)


if __name__ == "__main__":
    OPO = sys.argv.pop(1)
    unittest.main(verbosity=2)
