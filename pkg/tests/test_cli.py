"""End-to-end tests for the command-line front end.

Every test drives ``main`` in-process and checks the exit code, the
emitted report, or both.  Exit codes are the external contract: 0 for a
pass or positive finding, 1 for a substantive negative, 2 for usage or
input errors.
"""

import contextlib
import dataclasses
import hashlib
import io
import json
import math

import pytest

from ontomodels import reports
from ontomodels.cli import RunConfig, TABLE_COLUMNS, cmd_table, main
from ontomodels.data import fragment_path, vector_path
from ontomodels.rng import DEFAULT_SEED
from ontomodels.zoo import get_model

PERES = str(vector_path("peres33.vec"))
TRIAD = str(vector_path("triad3.vec"))
TWOTRIADS = str(vector_path("twotriads.vec"))
D2_FRAG = str(fragment_path("d2_zx.frag"))
KCBS_FRAG = str(fragment_path("kcbs.frag"))
PERES_FRAG = str(fragment_path("peres33.frag"))

KCBS_GOLDEN = 0.8944271909999157

# the seven-model summary, keyed by registry name: (reciprocity,
# determinism, contextual) as the table renders them
EXPECTED_TABLE = {
    "bb:3": ("yes", "no", "no"),
    "ks": ("yes", "yes", "no"),
    "aaronson": ("yes", "no", "yes"),
    "bell1": ("no", "yes", "yes"),
    "bell2": ("no", "yes", "no"),
    "aerts": ("yes", "no", "no"),
    "ws:3": ("no", "yes", "yes"),
}
STUBS = {"aaronson", "bell1", "aerts"}


def run_cli(*argv):
    """Invoke main() in-process; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            rc = main(list(argv))
        except SystemExit as exc:  # argparse paths (--version, bad choices)
            rc = exc.code if isinstance(exc.code, int) else 0
    return rc, out.getvalue(), err.getvalue()


def run_json(*argv):
    rc, out, err = run_cli(*argv)
    assert err == "", err
    return rc, json.loads(out)


class TestVerify:
    def test_ks_quadrature_hundred_pairs(self):
        rc, rep = run_json(
            "verify", "--model", "ks", "--engine", "quad:17", "--pairs", "100"
        )
        assert rc == 0
        assert rep["engine"] == "quad:17"
        assert rep["report"]["passed"] is True
        assert rep["report"]["max_deviation"] < 1e-6

    def test_bb_closed_deviation_exactly_zero(self):
        rc, rep = run_json("verify", "--model", "bb:3", "--engine", "closed")
        assert rc == 0
        assert rep["report"]["max_deviation"] == 0

    def test_unknown_model_is_usage_error(self):
        rc, out, err = run_cli("verify", "--model", "nosuch")
        assert rc == 2
        assert out == ""
        assert "ontomodels: error:" in err

    def test_bad_engine_spec_is_usage_error(self):
        rc, _, err = run_cli("verify", "--model", "ks", "--engine", "quad:-3")
        assert rc == 2
        assert "ontomodels: error:" in err

    def test_envelope_shape(self):
        rc, rep = run_json(
            "verify", "--model", "bb:3", "--engine", "closed", "--pairs", "3"
        )
        assert rc == 0
        assert sorted(rep) == [
            "command", "engine", "inputs", "report", "seed", "tool",
        ]
        assert rep["tool"] == {
            "name": reports.TOOL_NAME, "version": reports.TOOL_VERSION,
        }
        assert rep["command"] == "verify"
        assert rep["seed"] == DEFAULT_SEED

    def test_text_format_ends_with_verdict(self):
        rc, out, _ = run_cli(
            "verify", "--model", "bb:3", "--engine", "closed",
            "--pairs", "3", "--format", "text",
        )
        assert rc == 0
        assert out.splitlines()[-1] == "PASS"

    def test_csv_format_columns(self):
        rc, out, _ = run_cli(
            "verify", "--model", "bb:3", "--engine", "closed",
            "--pairs", "4", "--format", "csv",
        )
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "psi,phi,basis,predicted,born,deviation,tolerance"
        # one row per sampled outcome: d rows per pair in dimension 3
        assert len(lines) - 1 == 12

    def test_pair_count_respected(self):
        rc, rep = run_json(
            "verify", "--model", "bb:3", "--engine", "closed", "--pairs", "7"
        )
        assert rc == 0
        assert rep["report"]["n_pairs"] == 7 * 3
        assert len(rep["report"]["pairs"]) == 7 * 3


class TestReportDeterminism:
    def test_same_seed_byte_identical(self):
        argv = ("verify", "--model", "ks", "--engine", "mc:2000", "--seed", "11")
        _, first, _ = run_cli(*argv)
        _, second, _ = run_cli(*argv)
        assert first == second
        assert json.loads(first)["seed"] == 11

    def test_different_seed_changes_report(self):
        argv = ("verify", "--model", "ks", "--engine", "mc:2000")
        _, a, _ = run_cli(*argv, "--seed", "11")
        _, b, _ = run_cli(*argv, "--seed", "12")
        assert a != b

    def test_bound_byte_identical(self):
        _, a, _ = run_cli("bound", KCBS_FRAG)
        _, b, _ = run_cli("bound", KCBS_FRAG)
        assert a == b

    def test_output_file_matches_stdout(self, tmp_path):
        target = tmp_path / "report.json"
        argv = ("verify", "--model", "bb:3", "--engine", "closed", "--pairs", "3")
        rc, out, _ = run_cli(*argv)
        rc2, silent, _ = run_cli(*argv, "--output", str(target))
        assert rc == rc2 == 0
        assert silent == ""
        assert target.read_text() == out


class TestSeedResolution:
    def test_env_var_sets_default_seed(self, monkeypatch):
        monkeypatch.setenv("ONTOMODELS_SEED", "123")
        _, rep = run_json("verify", "--model", "bb:3", "--engine", "closed",
                          "--pairs", "2")
        assert rep["seed"] == 123

    def test_flag_overrides_env(self, monkeypatch):
        monkeypatch.setenv("ONTOMODELS_SEED", "123")
        _, rep = run_json("verify", "--model", "bb:3", "--engine", "closed",
                          "--pairs", "2", "--seed", "7")
        assert rep["seed"] == 7

    def test_config_overrides_env(self, monkeypatch, tmp_path):
        monkeypatch.setenv("ONTOMODELS_SEED", "123")
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("model = bb:3\nengine = closed\nseed = 5\npairs = 2\n")
        _, rep = run_json("verify", "--config", str(cfgfile))
        assert rep["seed"] == 5

    def test_bad_env_seed_is_usage_error(self, monkeypatch):
        monkeypatch.setenv("ONTOMODELS_SEED", "not-a-number")
        rc, _, err = run_cli("verify", "--model", "bb:3", "--engine", "closed")
        assert rc == 2
        assert "ONTOMODELS_SEED" in err


class TestConfigFile:
    def test_config_supplies_flags(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text(
            "# defaults for the verify run\n"
            "model = bb:3\n"
            "engine = closed   # exact response means\n"
            "pairs = 3\n"
        )
        rc, rep = run_json("verify", "--config", str(cfgfile))
        assert rc == 0
        assert rep["engine"] == "closed"
        assert rep["report"]["model"] == "bb:3"

    def test_explicit_flag_beats_config(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("model = ks\nengine = mc:1000\npairs = 3\n")
        rc, rep = run_json("verify", "--config", str(cfgfile),
                           "--engine", "quad:17")
        assert rc == 0
        assert rep["engine"] == "quad:17"

    def test_config_input_for_ksval(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text(f"input = {TRIAD}\n")
        rc, rep = run_json("ksval", "--config", str(cfgfile))
        assert rc == 0
        assert rep["report"]["file"] == "triad3.vec"

    @pytest.mark.parametrize("text,fragment", [
        ("pears = 3\n", "unknown key"),
        ("just a line without equals\n", "expected"),
        ("pairs = many\n", "invalid"),
    ])
    def test_malformed_config_is_usage_error(self, tmp_path, text, fragment):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text(text)
        rc, _, err = run_cli("verify", "--model", "bb:3", "--engine", "closed",
                             "--config", str(cfgfile))
        assert rc == 2
        assert fragment in err

    def test_missing_config_is_usage_error(self, tmp_path):
        rc, _, err = run_cli("verify", "--model", "bb:3",
                             "--config", str(tmp_path / "absent.cfg"))
        assert rc == 2
        assert "ontomodels: error:" in err


class TestTable:
    def test_default_run_passes(self):
        rc, rep = run_json("table")
        assert rc == 0
        assert rep["report"]["all_match"] is True
        assert len(rep["report"]["rows"]) == len(EXPECTED_TABLE)

    def test_rows_match_expected_summary(self):
        _, rep = run_json("table")
        for row in rep["report"]["rows"]:
            want = EXPECTED_TABLE[row["name"]]
            got = (row["reciprocity"], row["determinism"], row["contextual"])
            assert got == want, row["name"]
            assert row["mismatch"] is None

    def test_stub_rows_come_from_declarations(self):
        _, rep = run_json("table")
        for row in rep["report"]["rows"]:
            want = "declared" if row["name"] in STUBS else "measured"
            assert row["source"] == want
            assert row["implemented"] == (row["name"] not in STUBS)

    def test_csv_column_order(self):
        rc, out, _ = run_cli("table", "--format", "csv")
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "name,type,reciprocity,determinism,contextual"
        assert lines[0] == ",".join(TABLE_COLUMNS)
        assert len(lines) == 1 + len(EXPECTED_TABLE)

    def test_text_format_flags_stubs(self):
        rc, out, _ = run_cli("table", "--format", "text")
        assert rc == 0
        lines = out.splitlines()
        assert lines[-1] == "OK"
        flagged = [ln for ln in lines if "[unimplemented]" in ln]
        assert len(flagged) == len(STUBS)

    def test_corrupted_declaration_is_caught(self):
        model = get_model("ks")
        bad = dataclasses.replace(
            model,
            declared=dataclasses.replace(
                model.declared, outcome_deterministic=False
            ),
        )
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            rc = cmd_table(RunConfig(command="table"), models=[bad])
        assert rc == 1
        body = json.loads(out.getvalue())["report"]
        assert body["all_match"] is False
        diff = body["rows"][0]["mismatch"]
        assert diff == {
            "outcome_determinism": {
                "declared": "fails", "measured": "not_falsified",
            },
        }

    def test_corrupted_declaration_text_diff(self):
        model = get_model("ks")
        bad = dataclasses.replace(
            model,
            declared=dataclasses.replace(model.declared, reciprocal=False),
        )
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            rc = cmd_table(
                RunConfig(command="table", fmt="text"), models=[bad, get_model("bb:3")]
            )
        assert rc == 1
        lines = out.getvalue().splitlines()
        assert any("MISMATCH: reciprocity" in ln for ln in lines)
        assert lines[-1] == "MISMATCH"


class TestKsval:
    def test_peres33_is_unsat(self):
        rc, rep = run_json("ksval", PERES)
        assert rc == 1
        body = rep["report"]
        assert body["satisfiable"] is False
        assert body["valuation"] is None
        assert (body["n_rays"], body["n_edges"]) == (33, 72)
        assert body["stats"]["completed"] is True

    def test_unsat_text_verdict(self):
        rc, out, _ = run_cli("ksval", PERES, "--format", "text")
        assert rc == 1
        assert out.splitlines()[-1] == "UNSAT"

    def test_triad_enumerates_three_valuations(self):
        rc, rep = run_json("ksval", TRIAD, "--all")
        assert rc == 0
        body = rep["report"]
        assert body["n_valuations"] == 3
        assert sorted(body["valuations"]) == [
            [0, 0, 1], [0, 1, 0], [1, 0, 0],
        ]

    def test_enumeration_limit(self):
        rc, rep = run_json("ksval", TRIAD, "--all", "--limit", "1")
        assert rc == 0
        assert rep["report"]["n_valuations"] == 1

    def test_sat_search_returns_valuation(self):
        rc, rep = run_json("ksval", TWOTRIADS)
        assert rc == 0
        body = rep["report"]
        assert body["satisfiable"] is True
        assert sum(body["valuation"]) >= 1
        assert body["verified"] is True

    def test_input_digest_recorded(self):
        _, rep = run_json("ksval", TRIAD)
        entry = rep["inputs"]["triad3.vec"]
        digest = hashlib.sha256(open(TRIAD, "rb").read()).hexdigest()
        assert entry["sha256"] == digest

    def test_missing_file_is_usage_error(self):
        rc, _, err = run_cli("ksval", "/no/such/file.vec")
        assert rc == 2
        assert "ontomodels: error:" in err

    def test_missing_input_is_usage_error(self):
        rc, _, err = run_cli("ksval")
        assert rc == 2
        assert "needs an input file" in err


class TestBound:
    def test_d2_fragment_feasible_with_unit_bound(self):
        rc, rep = run_json("bound", D2_FRAG)
        assert rc == 0
        body = rep["report"]
        assert body["feasible"] == "Feasible"
        assert body["f_star"] == 1
        assert body["f_star_status"] == "Optimal"

    def test_kcbs_fragment_bound_below_one(self):
        rc, rep = run_json("bound", KCBS_FRAG)
        assert rc == 1
        body = rep["report"]
        assert body["feasible"] == "Infeasible"
        assert math.isclose(body["f_star"], KCBS_GOLDEN, abs_tol=1e-9)
        assert body["caveat"]

    def test_uncolorable_fragment_has_no_atoms(self):
        rc, rep = run_json("bound", PERES_FRAG)
        assert rc == 1
        body = rep["report"]
        assert body["n_atoms"] == 0
        assert body["f_star"] is None
        assert body["certificate"] == {
            "empty_atoms": True, "valuation_search": "unsat",
        }

    def test_csv_pair_columns(self):
        rc, out, _ = run_cli("bound", KCBS_FRAG, "--format", "csv")
        assert rc == 1
        lines = out.splitlines()
        assert lines[0] == "measured,prepared,born,core_mass,ratio"
        assert len(lines) - 1 == 15

    def test_garbage_fragment_is_usage_error(self, tmp_path):
        bad = tmp_path / "bad.frag"
        bad.write_text("this is not a fragment\n")
        rc, _, err = run_cli("bound", str(bad))
        assert rc == 2
        assert "ontomodels: error:" in err


class TestPrepctx:
    def test_ks_mixture_is_context_sensitive(self):
        rc, rep = run_json(
            "prepctx", "--model", "ks", "--rho", "unpolarized", "--ctx", "z,x"
        )
        assert rc == 0
        body = rep["report"]
        assert body["tv_distance"] > 0.1
        assert body["preparation_contextual"] is True
        assert body["mix_deviation"] < 1e-12
        assert math.isclose(body["tv_distance"], math.sqrt(2) - 1, abs_tol=1e-9)

    def test_context_aliases(self):
        _, short = run_json("prepctx", "--model", "ks", "--ctx", "z,x")
        _, long = run_json("prepctx", "--model", "ks", "--ctx", "standard,fourier")
        assert short["report"]["tv_distance"] == long["report"]["tv_distance"]

    def test_unknown_rho_is_usage_error(self):
        rc, _, err = run_cli("prepctx", "--model", "ks", "--rho", "pure")
        assert rc == 2
        assert "unknown rho" in err

    @pytest.mark.parametrize("ctx", ["z", "z,x,y", "z,sideways"])
    def test_bad_contexts_are_usage_errors(self, ctx):
        rc, _, err = run_cli("prepctx", "--model", "ks", "--ctx", ctx)
        assert rc == 2


class TestClassify:
    def test_ks_matches_declaration(self):
        rc, rep = run_json("classify", "--model", "ks")
        assert rc == 0
        assert rep["report"]["matches_declared"] is True

    def test_text_format_verdict(self):
        rc, out, _ = run_cli("classify", "--model", "ks", "--format", "text")
        assert rc == 0
        assert out.splitlines()[-1] == "MATCH"

    def test_declared_only_model_rejected(self):
        rc, _, err = run_cli("classify", "--model", "aaronson")
        assert rc == 2
        assert "declared-only" in err


class TestInvocation:
    def test_no_command_is_usage_error(self):
        rc, _, err = run_cli()
        assert rc == 2
        assert "usage" in err

    def test_version_flag(self):
        rc, out, _ = run_cli("--version")
        assert rc == 0
        assert out.strip() == f"{reports.TOOL_NAME} {reports.TOOL_VERSION}"

    def test_unsupported_format_choice(self):
        rc, _, err = run_cli("classify", "--model", "ks", "--format", "csv")
        assert rc == 2
