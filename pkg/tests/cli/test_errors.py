from pathlib import Path

import pytest

DATA = Path(__file__).parent.parent / "data"
TRIANGLES = DATA / "triangles.tsv"
TRUTH = DATA / "triangles_truth.tsv"


@pytest.mark.parametrize(
    "argv,status,message",
    [
        pytest.param(
            ["cluster", DATA / "bad_arity.tsv"], 2, "expected 2 weights, found 1", id="arity"
        ),
        pytest.param(
            ["cluster", DATA / "empty.tsv"], 1, "Cannot cluster a graph without edges", id="empty"
        ),
        pytest.param(["cluster", DATA / "missing.tsv"], 3, "missing.tsv", id="missing-file"),
        pytest.param(
            ["cluster", DATA / "cities.tsv"], 2, "pass --alpha to aggregate them", id="needs-alpha"
        ),
        pytest.param(
            ["cluster", DATA / "cities.tsv", "--alpha", "1,2,3"],
            2,
            "Weight vector has 3 components, the multigraph has 2 edge types",
            id="alpha-dimension",
        ),
        pytest.param(
            ["aggregate", DATA / "cities.tsv", "--pair", "road,air"],
            2,
            "Unknown edge type 'air'; known types: road, rail",
            id="unknown-type",
        ),
        pytest.param(
            ["aggregate", DATA / "cities.tsv", "--alpha=-1,0.5"],
            2,
            "enable clamping to truncate at 0",
            id="negative-composite",
        ),
        pytest.param(
            ["modularity", TRIANGLES, DATA / "cities.tsv"],
            1,
            "Line 1",
            id="clustering-format",
        ),
        pytest.param(
            ["cluster", TRIANGLES, "--starts", "0"],
            2,
            "n_starts must be at least 1, got 0",
            id="bad-setting",
        ),
        pytest.param(
            ["metacluster", TRIANGLES, "--samples", "1"],
            2,
            "Meta-clustering needs at least 2 samples, got 1",
            id="too-few-samples",
        ),
        pytest.param(
            ["recover", TRIANGLES, "--truth", TRUTH, "--steepness", "0"],
            2,
            "steepness must be positive, got 0.0",
            id="steepness",
        ),
    ],
)
def test_error_status(assert_cli, tmp_path, argv, status, message):
    out_flag = "--out-dir" if argv[0] in ("recover", "metacluster") else "--out"
    assert_cli(*argv, out_flag, tmp_path / "out", status=status, stderr=message)


def test_error_prefix(assert_cli, tmp_path):
    assert_cli(
        "cluster", DATA / "empty.tsv", "--out", tmp_path / "c.tsv", status=1, stderr="multiedge: error: "
    )


def test_order_limit(assert_cli, tmp_path):
    clusterings = [TRUTH] * 9
    assert_cli(
        "order", *clusterings, "--out", tmp_path / "order.json",
        status=4, stderr="Exact ordering handles at most 8 clusterings",
    )  # fmt: skip


def test_order_limit_greedy(assert_cli, tmp_path):
    assert_cli("order", *[TRUTH] * 9, "--mode", "greedy", "--out", tmp_path / "order.json")


def test_optimizer_budget(assert_cli, tmp_path):
    assert_cli(
        "discover", TRIANGLES, "--given", TRUTH, "--budget", "0", "--out-dir", tmp_path / "d",
        status=4, stderr="The evaluation budget is 0",
    )  # fmt: skip


def test_no_output_on_failure(assert_cli, tmp_path):
    out = tmp_path / "c.tsv"
    assert_cli("cluster", DATA / "empty.tsv", "--out", out, status=1)
    assert not out.exists()
    assert not (tmp_path / "c.tsv.manifest.json").exists()
