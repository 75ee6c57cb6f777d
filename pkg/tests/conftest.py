import pytest

from multiedge.cli import main
from multiedge.community import Clustering
from multiedge.multigraph import Graph, MultiGraph
from multiedge.synth import FactorSpec, PlantedSpec, generate_factors, generate_planted

TRIANGLE_EDGES = [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f")]


@pytest.fixture
def two_triangles():
    """Two triangles joined by the bridge c-d; {abc|def} has modularity 5/14."""
    edges = [(u, v, 1.0) for u, v in TRIANGLE_EDGES + [("c", "d")]]
    return Graph.from_edges(edges)


@pytest.fixture
def two_triangles_multigraph(two_triangles):
    return MultiGraph.from_edges(
        ("weight",), [(u, v, (w,)) for u, v, w in two_triangles.edges()]
    )


@pytest.fixture
def triangles_truth():
    return Clustering.from_clusters([["a", "b", "c"], ["d", "e", "f"]])


@pytest.fixture
def path():
    """a - b - c with unit weights on a single edge type."""
    return MultiGraph.from_edges(("w",), [("a", "b", (1.0,)), ("b", "c", (1.0,))])


@pytest.fixture
def path_truth():
    return Clustering.from_clusters([["a", "b"], ["c"]])


@pytest.fixture(scope="session")
def planted():
    """Small planted partition with one signal type and one noise type."""
    spec = PlantedSpec(
        n=120, n_clusters=4, avg_degree=12, mixing=0.2, k_types=1, noise_types=1, seed=3
    )
    return generate_planted(spec)


@pytest.fixture(scope="session")
def factors():
    """Two independent factors of three groups each, two views per factor."""
    return generate_factors(FactorSpec(n=90, seed=5))


@pytest.fixture
def assert_cli(capsys):
    """
    Run the command line with the given arguments and check its exit status.

    Example:
        def test_vi(assert_cli, tmp_path):
            out = assert_cli("vi", a, b, "--out", tmp_path / "vi.json")
            assert out == "0.000000\\n"

    Returns standard output; `stderr` checks that the text appears in
    standard error.
    """

    def _assert_cli(*args, status=0, stderr=None):
        code = main([str(arg) for arg in args])
        captured = capsys.readouterr()
        assert code == status, captured.err
        if stderr is not None:
            assert stderr in captured.err
        return captured.out

    return _assert_cli
