import json

import pytest

from proxcvx.cli import EXIT_ERROR, EXIT_OK, EXIT_VERDICT, main


def _json(capsys):
    return json.loads(capsys.readouterr().out)


# =================================================================
# 1. Commands
# =================================================================
def test_prox_command(capsys):
    """
    The prox command prints one JSON report with the set and a timestamp.
    """
    assert main(["prox", "--fn", "negquad", "--set", "0,1", "--z", "0.3"]) == EXIT_OK
    report = _json(capsys)
    assert report["argmin"] == [1.0]
    assert report["function"] == "negquad"
    assert report["set"] == {"lo": 0.0, "hi": 1.0}
    assert "timestamp" in report


def test_prox_command_with_negative_vector(capsys):
    """
    A vector starting with a minus sign is accepted with the --z= form.
    """
    assert main(["prox", "--fn", "quad2d", "--z=-3,4"]) == EXIT_OK
    argmin = _json(capsys)["argmin"]
    assert argmin[0] == pytest.approx([0.0, 4.0 / 3.0])


def test_divergent_prox_is_a_negative_verdict(capsys):
    """
    Divergence exits with 1 and reports -inf for the envelope.
    """
    assert main(["prox", "--fn", "negcubic", "--z", "0"]) == EXIT_VERDICT
    assert _json(capsys)["attained"] == "divergent"
    assert main(["moreau", "--fn", "negcubic", "--z", "0"]) == EXIT_VERDICT
    assert _json(capsys)["value"] == "-inf"


def test_moreau_command(capsys):
    """
    The envelope of halfsquare at 2 is 1 with gradient 1.
    """
    assert main(["moreau", "--fn", "halfsquare", "--z", "2"]) == EXIT_OK
    report = _json(capsys)
    assert report["value"] == pytest.approx(1.0)
    assert report["gradient"] == pytest.approx([1.0])


def test_certify_command(capsys):
    """
    logaffine is certified on its domain with an open lower end at 0.
    """
    assert main(["certify", "--fn", "logaffine"]) == EXIT_OK
    interval = _json(capsys)["alpha_interval"]
    assert interval["lower"] == 0.0
    assert interval["lower_closed"] is False


def test_certify_single_alpha(capsys):
    """
    alpha=3 is not admissible for negquad and exits with 1.
    """
    assert main(["certify", "--fn", "negquad", "--set", "0,1", "--alpha", "3"]) == EXIT_VERDICT
    capsys.readouterr()


def test_certify_csv_lists_constraints(capsys):
    """
    CSV output lists one constraint row per sampled pair.
    """
    assert main(["certify", "--fn", "negquad", "--set", "0,1", "--grid", "9", "--output", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "z,xbar,x,lhs,ip,bound_type,bound_value"
    assert len(lines) > 1


def test_ppa_csv_trace(capsys):
    """
    The CSV trace of quad2d starts at x0 and then follows (2, z2/3).
    """
    code = main(["ppa", "--fn", "quad2d", "--set", "0,2:-inf,inf", "--x0", "0.5,9", "--output", "csv"])
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "k,x,h,step_norm,fejer_dist"
    assert lines[1].startswith("0,0.5;9.0,")
    assert lines[2].startswith("1,2.0;3.0,")


def test_ppa_json_to_file(tmp_path, capsys):
    """
    --output-path writes the report to a file and nothing to stdout.
    """
    path = tmp_path / "trace.json"
    assert main(["ppa", "--fn", "negquad", "--x0", "0", "--output-path", str(path)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    report = json.loads(path.read_text())
    assert report["iterates"][1] == [1.0]


def test_ppa_step_size_flag(capsys):
    """
    --gamma reaches every prox step: from 0 on negquad the first step lands on 1/8.
    """
    argv = ["ppa", "--fn", "negquad", "--x0", "0", "--gamma", "0.1", "--max-iters", "1"]
    assert main(argv) == EXIT_OK
    report = _json(capsys)
    assert report["iterates"][1] == pytest.approx([0.125]), "first iterate should be the scaled prox of 0"
    assert report["stop_reason"] == "max_iters"


def test_subdiff_command(capsys):
    """
    xi=1 is the gradient of halfsquare at 1 and xi=2 is not.
    """
    assert main(["subdiff", "--fn", "halfsquare", "--kind", "convex", "--x", "1", "--xi", "2"]) == EXIT_VERDICT
    assert main(["subdiff", "--fn", "halfsquare", "--kind", "convex", "--x", "1", "--xi", "1"]) == EXIT_OK
    capsys.readouterr()


def test_probe_identities(capsys):
    """
    The identity self-test passes and reports its kind.
    """
    assert main(["probe", "--kind", "identities", "--fn", "abs"]) == EXIT_OK
    assert _json(capsys)["kind"] == "identities"


def test_probe_coercivity(capsys):
    """
    The coercivity probe reports the probed function.
    """
    assert main(["probe", "--kind", "coercivity", "--fn", "abs"]) == EXIT_OK
    assert _json(capsys)["function"] == "abs"


def test_suite_command(capsys):
    """
    The filtered suite prints JSON on stdout and the table on stderr.
    """
    assert main(["suite", "--filter", "scaled_prox"]) == EXIT_OK
    captured = capsys.readouterr()
    report = json.loads(captured.out)
    assert report["passed"] is True
    assert [c["name"] for c in report["criteria"]] == ["scaled_prox"]
    assert "scaled_prox" in captured.err


def test_suite_group_report_is_valid_json(capsys):
    """
    Every measured value of the PPA group, including per-case flags, must
    serialise to plain JSON.
    """
    assert main(["suite", "--filter", "ppa"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is True
    assert [c["id"] for c in report["criteria"]] == [6, 11]
    fejer = report["criteria"][1]["measured"]
    assert all(case["ok"] is True for case in fejer.values()), f"unexpected per-case flags: {fejer}"


# =================================================================
# 2. Errors
# =================================================================
@pytest.mark.parametrize("argv", [
    ["prox", "--fn", "nope", "--z", "0"],
    ["prox", "--fn", "negquad"],
    ["prox", "--fn", "negquad", "--set", "2,3", "--z", "0"],
    ["prox", "--fn", "negquad", "--z", "0", "--gamma", "0"],
    ["prox", "--fn", "negquad", "--z", "0", "--output", "csv"],
    ["certify"],
    ["frobnicate"],
])
def test_usage_and_configuration_errors(argv, capsys):
    """
    Usage and configuration errors exit with 2 and print nothing on stdout.
    """
    assert main(argv) == EXIT_ERROR
    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err


def test_error_message_prefix(capsys):
    """
    Library errors are reported as one prefixed line, without a traceback.
    """
    main(["prox", "--fn", "nope", "--z", "0"])
    assert capsys.readouterr().err.startswith("proxcvx: error:")


def test_subgradient_of_wrong_dimension_is_a_usage_error(capsys):
    """
    A 1-D xi for a 2-D function is a usage error.
    """
    argv = ["subdiff", "--fn", "quad2d", "--kind", "convex", "--x", "1,0", "--xi", "1"]
    assert main(argv) == EXIT_ERROR
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "xi" in captured.err, "the message should name the offending field"


def test_version(capsys):
    """
    --version prints the program name.
    """
    assert main(["--version"]) == EXIT_OK
    assert "proxcvx" in capsys.readouterr().out
