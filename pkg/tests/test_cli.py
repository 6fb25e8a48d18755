import json
import subprocess
import sys

import pytest

from chrisimos.chain import ChainView
from chrisimos.cli import main
from chrisimos.graphs import load_graph
from chrisimos.ledger import (
    deserialize_block,
    generate_committee,
    genesis_block,
    make_instance,
    save_committee,
    save_instance,
)
from chrisimos.simnet import ring_with_chords, script_block
from chrisimos.graphs import save_graph

PREV = "ab" * 32  # 32-byte hex digest


@pytest.fixture()
def workdir(tmp_path):
    keys = tmp_path / "keys.json"
    assert main(["keygen", "--members", "4", "--threshold", "3", "--seed", "5",
                 "--out", str(keys)]) == 0
    graph = tmp_path / "g.txt"
    inst = tmp_path / "inst.json"
    assert main([
        "gen-graph", "--model", "erdos_renyi", "--n", "40", "--p-edge", "0.15",
        "--seed", "2", "--out", str(graph),
        "--sign-keys", str(keys), "--id-g", "1", "--instance-out", str(inst),
    ]) == 0
    return tmp_path, graph, inst, keys


class TestPipeline:
    def test_mine_verify_retrieve(self, workdir, capsys):
        tmp, graph, inst, _ = workdir
        block = tmp / "block.json"
        assert main(["mine", "--graph", str(graph), "--instance", str(inst),
                     "--prev-hash", PREV, "--budget", "10",
                     "--out", str(block)]) == 0
        rc = main(["verify", "--block", str(block), "--graph", str(graph),
                   "--instance", str(inst), "--prev-hash", PREV])
        captured = capsys.readouterr()
        assert rc == 0 and "Accept" in captured.out
        assert main(["retrieve", "--block", str(block), "--graph", str(graph),
                     "--instance", str(inst), "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["size"] >= 1

    def test_verify_rejects_tampered_block(self, workdir, capsys):
        tmp, graph, inst, _ = workdir
        block_path = tmp / "block.json"
        main(["mine", "--graph", str(graph), "--instance", str(inst),
              "--prev-hash", PREV, "--budget", "10", "--out", str(block_path)])
        capsys.readouterr()
        obj = json.loads(block_path.read_text())
        obj["header"]["ds"] = obj["header"]["ds"][:1]
        block_path.write_text(json.dumps(obj))
        rc = main(["verify", "--block", str(block_path), "--graph", str(graph),
                   "--instance", str(inst), "--prev-hash", PREV])
        out = capsys.readouterr().out
        assert rc == 1 and "Reject(NotDominating)" in out

    def test_verify_rejects_late(self, workdir, capsys):
        tmp, graph, inst, _ = workdir
        block_path = tmp / "block.json"
        main(["mine", "--graph", str(graph), "--instance", str(inst),
              "--prev-hash", PREV, "--budget", "10", "--out", str(block_path)])
        capsys.readouterr()
        rc = main(["verify", "--block", str(block_path), "--graph", str(graph),
                   "--instance", str(inst), "--prev-hash", PREV,
                   "--tmax", "5", "--now", "9"])
        assert rc == 1 and "Reject(Late)" in capsys.readouterr().out


class TestSubcommands:
    def test_solve_greedy_and_exact(self, tmp_path, capsys):
        p = tmp_path / "star.txt"
        p.write_text("4 3\n1 2\n1 3\n1 4\n")
        assert main(["solve", "--graph", str(p), "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["vertices"] == [1] and payload["size"] == 1
        assert main(["solve", "--graph", str(p), "--exact"]) == 0

    def test_extend_debug_dump(self, tmp_path, capsys):
        p = tmp_path / "g.txt"
        p.write_text("4 3\n1 2\n1 3\n1 4\n")
        assert main(["extend", "--graph", str(p), "--prev-hash", PREV,
                     "--merkle", "cd" * 32]) == 0
        out = capsys.readouterr().out
        assert "mask one-positions" in out and "delta_T" in out

    def test_gen_graph_deterministic(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        for out in (a, b):
            assert main(["gen-graph", "--model", "barabasi_albert", "--n", "50",
                         "--m-attach", "3", "--seed", "9", "--out", str(out)]) == 0
        assert a.read_text() == b.read_text()

    def test_bench_and_estimate(self, tmp_path, capsys):
        report = tmp_path / "bench.csv"
        table = tmp_path / "table.csv"
        assert main(["bench", "--sizes", "200,400", "--m-attach", "3",
                     "--repeats", "1", "--out", str(report),
                     "--table-out", str(table)]) == 0
        capsys.readouterr()
        lines = report.read_text().strip().splitlines()
        assert lines[0] == "n,e_t,impl,gen_time,verify_time,ratio"
        assert len(lines) >= 3
        assert main(["estimate", "--table", str(table), "--n", "300", "--m",
                     "900", "--delta", "2", "--l", "2.0"]) == 0
        assert float(capsys.readouterr().out.strip()) > 0

    def test_bench_both_impls(self, tmp_path):
        report = tmp_path / "bench.csv"
        assert main(["bench", "--sizes", "200", "--repeats", "1",
                     "--impl", "both", "--out", str(report)]) == 0
        body = report.read_text()
        assert "pure" in body

    def test_chain_select_files(self, tmp_path, capsys):
        signer = generate_committee(4, 3, seed=8)
        g = ring_with_chords(60, 130)
        i1, i2 = make_instance(g, 1, signer), make_instance(g, 2, signer)
        cur = ChainView.new(genesis_block(256), 2)
        cur.append(script_block(cur.tip.block, i1, range(1, 26), 256), i1)
        cand = ChainView(cur.entries.copy(), cur.f)
        cand.append(script_block(cand.tip.block, i2, range(1, 20), 256), i2)
        cur_p, cand_p = tmp_path / "cur.json", tmp_path / "cand.json"
        cur.save(cur_p)
        cand.save(cand_p)
        assert main(["chain-select", "--current", str(cur_p),
                     "--candidate", str(cand_p)]) == 0
        out = capsys.readouterr().out
        assert "adopted: candidate" in out

    def test_simulate_writes_report(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert main(["simulate", "--scenario", "honest", "--miners", "3",
                     "--seed", "1", "--epochs", "2", "--out", str(out)]) == 0
        capsys.readouterr()
        payload = json.loads(out.read_text())
        assert payload["scenario"] == "honest" and payload["ok"]

    def test_config_file_sets_lambda(self, tmp_path, capsys):
        cfg = tmp_path / "cfg"
        cfg.write_text("lambda = 64\nl = 2.0\nf = 4\n")
        p = tmp_path / "g.txt"
        p.write_text("4 3\n1 2\n1 3\n1 4\n")
        assert main(["--config", str(cfg), "extend", "--graph", str(p),
                     "--prev-hash", "ab" * 8, "--merkle", "cd" * 8]) == 0
        assert "seed S" in capsys.readouterr().out


class TestExitCodes:
    def test_usage_error_is_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["solve", "--no-such-flag"])
        assert exc.value.code == 2

    def test_missing_file_is_2(self, capsys):
        assert main(["solve", "--graph", "/nonexistent/g.txt"]) == 2

    def test_subprocess_entry_point(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("2 1\n1 2\n")
        proc = subprocess.run(
            [sys.executable, "-m", "chrisimos.cli", "solve", "--graph", str(p)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "size=1" in proc.stdout
