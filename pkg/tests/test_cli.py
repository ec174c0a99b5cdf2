import json

from flatgeom import corpus, jsonio
from flatgeom.cli import run_command
from flatgeom.matroid import uniform_matroid


def run(capsys, *argv):
    code = run_command(list(argv))
    out = capsys.readouterr().out
    return code, out


def parse_lines(out):
    return [json.loads(line) for line in out.strip().splitlines()]


class TestRoundTrips:
    def test_matroid_json_round_trip(self, gf2, tmp_path):
        doc = jsonio.matroid_to_json(gf2)
        again = jsonio.matroid_from_json(json.loads(jsonio.dumps(doc)))
        assert jsonio.matroid_to_json(again) == doc

    def test_closure_table_round_trip(self):
        m = corpus.MATROIDS["ct_u23"]()
        doc = jsonio.matroid_to_json(m)
        again = jsonio.matroid_from_json(doc)
        assert jsonio.matroid_to_json(again) == doc

    def test_scenario_round_trip(self):
        enum = corpus.sigma1_chain()
        doc = jsonio.scenario_to_json(enum)
        again = jsonio.scenario_from_json(json.loads(jsonio.dumps(doc)))
        assert jsonio.scenario_to_json(again) == doc

    def test_effective_scenario_round_trip(self):
        pres, mem, enum, horizon = corpus.going_down_demo()
        doc = jsonio.effective_scenario_to_json(pres, mem, enum, horizon)
        loaded = jsonio.effective_scenario_from_json(json.loads(jsonio.dumps(doc)))
        assert jsonio.effective_scenario_to_json(*loaded) == doc


class TestCommands:
    def test_flatness_emits_reparsable_json(self, capsys, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(jsonio.dumps(jsonio.matroid_to_json(corpus.gf2_3())))
        code, out = run(capsys, "flatness", "--matroid", str(path))
        assert code == 0
        (doc,) = parse_lines(out)
        assert doc["v"] == 1 and doc["verdict"] == "not-flat"
        assert doc["delta"] == 2 and doc["union_dim"] == 3

    def test_determinism(self, capsys):
        _, out1 = run(capsys, "flatness", "--matroid", "corpus:gf2_3")
        _, out2 = run(capsys, "flatness", "--matroid", "corpus:gf2_3")
        assert out1 == out2

    def test_expect_flat_sets_exit_code(self, capsys):
        code, _ = run(capsys, "flatness", "--matroid", "corpus:gf2_3", "--expect-flat")
        assert code == 1
        code, _ = run(capsys, "flatness", "--matroid", "corpus:uniform_2_3", "--expect-flat")
        assert code == 0

    def test_malformed_json_exits_two_with_position(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code = run_command(["flatness", "--matroid", str(path)])
        err = capsys.readouterr().err
        assert code == 2
        assert "line 1" in err and "column" in err

    def test_unknown_flag_exits_two(self, capsys):
        code, _ = run(capsys, "flatness", "--matroid", "corpus:gf2_3", "--bogus")
        assert code == 2

    def test_pps_run_command(self, capsys):
        code, out = run(
            capsys,
            "pps", "run", "--matroid", "corpus:gf2_3",
            "--a1", "3", "--a2", "1", "--t1", "0", "--budget", "32",
        )
        assert code == 0
        (doc,) = parse_lines(out)
        assert doc["runs"][0]["ts"] == [0, 4, 6, 2, 0]
        assert doc["runs"][0]["cycle_length"] == 4

    def test_pps_search_cycle_command(self, capsys):
        code, out = run(capsys, "pps", "search-cycle", "--matroid", "corpus:gf2_3")
        (doc,) = parse_lines(out)
        assert code == 0 and doc["status"] == "found"

    def test_circuits_command(self, capsys, tmp_path):
        path = tmp_path / "u.json"
        path.write_text(jsonio.dumps(jsonio.matroid_to_json(uniform_matroid(2, 3))))
        code, out = run(capsys, "circuits", "--matroid", str(path), "--max-size", "3")
        (doc,) = parse_lines(out)
        assert doc["circuits"] == [[0, 1, 2]]

    def test_lambda_closure_command(self, capsys):
        code, out = run(
            capsys, "lambda", "closure", "--structure", "corpus:phi_demo", "--x", "0,1"
        )
        (doc,) = parse_lines(out)
        assert doc["closure"] == [0, 1, 2, 3] and doc["fixpoint_index"] == 2

    def test_lambda_acl_command(self, capsys):
        code, out = run(
            capsys, "lambda", "acl", "--scenario", "corpus:sigma1_chain", "--bbar", "0,1"
        )
        (doc,) = parse_lines(out)
        assert doc["status"] == "complete"
        assert [e for e, _ in doc["emitted"]] == [0, 1, 2]

    def test_ild_command(self, capsys):
        code, out = run(capsys, "ild", "--scenario", "corpus:ild_pps")
        (doc,) = parse_lines(out)
        assert doc["value"] == 3 and doc["certainty"] == "certified"

    def test_effective_command_writes_trace(self, capsys, tmp_path):
        trace_path = tmp_path / "trace.json"
        code, out = run(
            capsys,
            "effective", "going-down", "--scenario", "corpus:going_down_demo",
            "--trace", str(trace_path), "--expect-iso",
        )
        assert code == 0
        (doc,) = parse_lines(out)
        assert doc["verify"]["isomorphism"] and doc["verify"]["surjective"]
        trace_doc = json.loads(trace_path.read_text())
        assert trace_doc["records"][0]["stage"] == 1

    def test_spectrum_check_command(self, capsys):
        code, out = run(capsys, "spectrum", "check", "--n", "2", "--set", "2")
        (doc,) = parse_lines(out)
        assert code == 0 and doc["verdict"] == "open-unknown"

    def test_spectrum_check_omega(self, capsys):
        code, out = run(capsys, "spectrum", "check", "--n", "2", "--set", "1,omega")
        (doc,) = parse_lines(out)
        assert doc["verdict"] == "excluded" and doc["rules"] == ["omega-downward"]

    def test_spectrum_cases_command(self, capsys):
        code, out = run(capsys, "spectrum", "cases", "--n", "2")
        (doc,) = parse_lines(out)
        assert len(doc["cases"]) == 16
        kinds = [row["class"] for row in doc["cases"]]
        assert kinds.count("shape-covered") == 8
        assert kinds.count("open") == 4 and kinds.count("excluded") == 4

    def test_corpus_list_and_check(self, capsys):
        code, out = run(capsys, "corpus", "list")
        (doc,) = parse_lines(out)
        assert code == 0 and "gf2_3" in doc["members"]
        code, out = run(capsys, "corpus", "check")
        (doc,) = parse_lines(out)
        assert code == 0 and doc["ok"]

    def test_budget_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("FLATGEOM_BUDGET", "2")
        code, out = run(
            capsys,
            "pps", "run", "--matroid", "corpus:gf2_3",
            "--a1", "3", "--a2", "1", "--t1", "0",
        )
        (doc,) = parse_lines(out)
        assert doc["runs"][0]["status"] == "budget"
        assert doc["runs"][0]["ts"] == [0, 4]
