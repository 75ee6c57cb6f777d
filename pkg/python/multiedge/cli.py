"""
The `multiedge` command.

Every subcommand reads plain-text inputs, writes its results to the
paths it is given and records one JSON run manifest next to its primary
output. Exit statuses: 0 success, 1 unparseable input, 2 semantic
mismatch, 3 I/O failure, 4 budget or size limit.
"""

import argparse
import csv
import dataclasses
import hashlib
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .community import (
    cluster_greedy_modularity,
    modularity,
    read_clustering,
    write_clustering,
)
from .config import SearchConfig, load_config
from .discovery import enumerate_pairs, find_unexpected, select_distant_set
from .errors import ConfigError, DimensionError, MultiEdgeError
from .metaclustering import (
    analyze_ensemble,
    cspa_consensus,
    invariant_groups,
    load_ensemble,
    order_indices,
    sample_alphas,
    sample_clustering_space,
    save_ensemble,
)
from .metrics import vi_distance, vi_matrix, write_vi_matrix
from .multigraph import (
    aggregate_linear,
    aggregate_product,
    aggregate_union,
    load_multigraph,
    write_graph,
    write_multigraph,
)
from .recovery import (
    HoldingEvaluator,
    correlation_sweep,
    holding_histogram,
    pareto_sweep,
    steepness_sweep,
)
from .synth import (
    FactorSpec,
    GridSpec,
    PlantedSpec,
    factor_name,
    generate_factors,
    generate_grid,
    generate_planted,
    perturb,
    perturbed_copies,
    spec_as_dict,
)

logger = logging.getLogger(__name__)

IO_ERROR_STATUS = 3
UNDEFINED = "undefined"


def _digest(path):
    sha = hashlib.sha256()
    if path.is_dir():
        for child in sorted(p for p in path.rglob("*") if p.is_file()):
            sha.update(child.relative_to(path).as_posix().encode())
            sha.update(child.read_bytes())
    else:
        sha.update(path.read_bytes())
    return sha.hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    seeds: dict
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    wall_time: float = 0.0
    evaluations: int = 0
    # members of the meta-clusters too small to get a representative
    dropped_meta_clusters: list = field(default_factory=list)

    def write(self, path):
        path = Path(path)
        path.write_text(json.dumps(dataclasses.asdict(self), indent=2) + "\n", encoding="utf-8")


class Run:
    """Bookkeeping for one invocation: inputs read, outputs written, evaluations spent."""

    def __init__(self, command, cfg):
        self.manifest = RunManifest(command, cfg.as_dict(), {"seed": cfg.seed})
        self.cfg = cfg
        self.started = time.perf_counter()

    def input(self, path):
        path = Path(path)
        self.manifest.inputs[str(path)] = _digest(path)
        return path

    def output(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.manifest.outputs.append(str(path))
        return path

    def count(self, evaluations):
        self.manifest.evaluations += evaluations

    def finish(self, manifest_path):
        self.manifest.wall_time = time.perf_counter() - self.started
        self.manifest.write(manifest_path)


def _number(value):
    return UNDEFINED if value is None else f"{value:.6f}"


def _write_json(path, data):
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def _write_csv(path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _floats(text):
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _names(text):
    names = tuple(part.strip() for part in text.split(","))
    if len(names) != 2 or not all(names):
        raise argparse.ArgumentTypeError(f"expected two edge type names 'a,b', got {text!r}")
    return names


def _single_graph(g, alpha):
    if alpha is not None:
        return aggregate_linear(g, alpha, clamp_negative=True)
    if g.k != 1:
        raise DimensionError(f"The multigraph has {g.k} edge types; pass --alpha to aggregate them")
    return aggregate_linear(g, (1.0,))


def cmd_aggregate(args, run):
    g = load_multigraph(run.input(args.input))
    if args.pair:
        graph = aggregate_product(g, *args.pair)
    elif args.union:
        graph = aggregate_union(g, *args.union)
    else:
        graph = aggregate_linear(g, args.alpha, clamp_negative=args.clamp)
    write_graph(graph, run.output(args.out))
    print(f"{graph.n_edges} edges")
    return args.out


def cmd_cluster(args, run):
    graph = _single_graph(load_multigraph(run.input(args.input)), args.alpha)
    clustering = cluster_greedy_modularity(graph)
    write_clustering(clustering, run.output(args.out))
    print(f"{clustering.n_clusters} clusters, modularity {_number(modularity(graph, clustering))}")
    return args.out


def cmd_modularity(args, run):
    graph = _single_graph(load_multigraph(run.input(args.input)), args.alpha)
    score = modularity(graph, read_clustering(run.input(args.clustering)))
    _write_json(run.output(args.out), {"modularity": score})
    print(_number(score))
    return args.out


def cmd_vi(args, run):
    a = read_clustering(run.input(args.first))
    b = read_clustering(run.input(args.second))
    distance = vi_distance(a, b)
    _write_json(run.output(args.out), {"vi": distance})
    print(_number(distance))
    return args.out


def cmd_recover(args, run):
    g = load_multigraph(run.input(args.input))
    truth = read_clustering(run.input(args.truth))
    grid = args.steepness_grid or (run.cfg.steepness,)
    rows = steepness_sweep(g, truth, grid, run.cfg)
    best_steepness, best_alpha, best = max(rows, key=lambda row: row[2].positive_fraction)
    for _, _, report in rows:
        if report.search is not None:
            run.count(report.search.evaluations)

    out = args.out_dir
    _write_json(
        run.output(out / "weights.json"),
        {
            "edge_types": list(g.edge_types),
            "runs": [
                {"alpha": list(alpha.alpha), **report.as_dict()} for _, alpha, report in rows
            ],
            "best": {"alpha": list(best_alpha.alpha), **best.as_dict()},
        },
    )
    _write_csv(
        run.output(out / "alphas.csv"),
        ["edge_type", *(repr(float(s)) for s in grid)],
        [
            [name, *(alpha.alpha[t] for _, alpha, _ in rows)]
            for t, name in enumerate(g.edge_types)
        ],
    )
    _write_csv(
        run.output(out / "holding.csv"),
        ["node", "holding_power"],
        best.per_node.items(),
    )
    _write_csv(
        run.output(out / "histogram.csv"),
        ["low", "high", "count"],
        holding_histogram(best),
    )
    print(f"steepness {best_steepness:g}: positive fraction {_number(best.positive_fraction)}")
    return out


def cmd_pareto(args, run):
    g = load_multigraph(run.input(args.input))
    truth = read_clustering(run.input(args.truth))
    points = pareto_sweep(g, truth, run.cfg, reference_alpha=args.reference_alpha)
    _write_csv(
        run.output(args.out),
        [*g.edge_types, "positive_fraction", "normalized_modularity"],
        [
            [*point.alpha.alpha, point.positive_fraction, point.normalized_modularity]
            for point in points
        ],
    )
    print(f"{len(points)} nondominated points")
    return args.out


def cmd_correlate(args, run):
    g = load_multigraph(run.input(args.input))
    truth = read_clustering(run.input(args.truth))
    grid = args.steepness_grid or (run.cfg.steepness,)
    rows = correlation_sweep(g, truth, cluster_greedy_modularity, grid, run.cfg)
    _write_csv(
        run.output(args.out),
        ["steepness", "correlation"],
        [[s, UNDEFINED if r is None else r] for s, r in rows],
    )
    for steepness, correlation in rows:
        print(f"{steepness:g}\t{_number(correlation)}")
    return args.out


def cmd_metacluster(args, run):
    g = load_multigraph(run.input(args.input))
    n_samples = args.samples or run.cfg.n_samples
    if n_samples < 2:
        raise ConfigError(f"Meta-clustering needs at least 2 samples, got {n_samples}")
    alphas = sample_alphas(g.k, n_samples, run.cfg.seed_sequence("metacluster_samples"))
    ensemble = sample_clustering_space(g, alphas, cluster_greedy_modularity)
    run.manifest.config["clamp_negative"] = True
    report = analyze_ensemble(ensemble, cluster_greedy_modularity)
    run.manifest.dropped_meta_clusters = report.dropped
    run.count(len(ensemble))

    out = args.out_dir
    save_ensemble(ensemble, run.output(out / "ensemble"), seed=run.cfg.seed)
    ids = [str(i) for i in range(len(ensemble))]
    write_vi_matrix(vi_matrix(ensemble), ids, run.output(out / "vi_matrix.csv"))
    for rank, representative in enumerate(report.representatives):
        write_clustering(representative, run.output(out / f"representative_{rank:02d}.tsv"))
    _write_json(
        run.output(out / "report.json"),
        {
            "samples": len(ensemble),
            "meta_clusters": report.meta_partition.n_clusters,
            "meta_partition": report.meta_partition.labels.tolist(),
            "members": report.members,
            "dropped": report.dropped,
            "ordering_mode": report.mode,
            "ordering_scores": report.ordering_scores,
            "seriation": report.seriation,
            "warnings": list(ensemble.warnings),
        },
    )
    print(f"{len(report.representatives)} representatives from {len(ensemble)} samples")
    return out


def cmd_consensus(args, run):
    clusterings = [read_clustering(run.input(path)) for path in args.clusterings]
    consensus = cspa_consensus(clusterings, cluster_greedy_modularity)
    write_clustering(consensus, run.output(args.out))
    print(f"{consensus.n_clusters} clusters")
    return args.out


def cmd_order(args, run):
    clusterings = [read_clustering(run.input(path)) for path in args.clusterings]
    order, scores = order_indices(clusterings, args.mode)
    _write_json(
        run.output(args.out),
        {"mode": args.mode, "order": [str(args.clusterings[i]) for i in order], "scores": scores},
    )
    for i, score in zip(order, scores):
        print(f"{args.clusterings[i]}\t{_number(score)}")
    return args.out


def cmd_discover(args, run):
    g = load_multigraph(run.input(args.input))
    given = [read_clustering(run.input(path)) for path in args.given]
    report = find_unexpected(g, given, run.cfg, cluster_greedy_modularity)
    out = args.out_dir
    _write_json(
        run.output(out / "report.json"),
        {"edge_types": list(g.edge_types), **report.as_dict()},
    )
    write_clustering(report.clustering, run.output(out / "clustering.tsv"))
    print(f"modularity {_number(report.modularity)}, objective {_number(report.scalarized)}")
    return out


def cmd_pairs(args, run):
    g = load_multigraph(run.input(args.input))
    reference = read_clustering(run.input(args.reference))
    rows = enumerate_pairs(
        g,
        reference,
        cluster_greedy_modularity,
        include_singletons=not args.no_singletons,
        include_self_pairs=args.self_pairs,
    )
    _write_csv(
        run.output(args.out),
        ["Name", "Modularity", "VI distance"],
        [[row.label, _number(row.modularity), _number(row.vi_to_reference)] for row in rows],
    )
    for row in rows:
        print(f"{row.label}\t{_number(row.modularity)}\t{_number(row.vi_to_reference)}")
    if args.select:
        print("selected:")
        for row, distance in select_distant_set(rows, reference, args.select):
            print(f"{row.label}\t{_number(distance)}")
    return args.out


def cmd_invariant_groups(args, run):
    if args.ensemble:
        ensemble = load_ensemble(run.input(args.ensemble))
        clusterings, universe = ensemble.clusterings, ensemble.node_universe
    else:
        clusterings = [read_clustering(run.input(path)) for path in args.clusterings]
        universe = clusterings[0].nodes
    position = {node: i for i, node in enumerate(universe)}
    groups = [sorted(group, key=position.__getitem__) for group in invariant_groups(clusterings)]
    text = "".join("\t".join(map(str, group)) + "\n" for group in groups)
    run.output(args.out).write_text(text, encoding="utf-8")
    print(f"{len(groups)} groups")
    return args.out


def _spec_from_args(spec_class, args, seed):
    values = {}
    for spec_field in dataclasses.fields(spec_class):
        value = getattr(args, spec_field.name, None)
        if spec_field.name != "seed" and value is not None:
            values[spec_field.name] = value
    return spec_class(seed=seed, **values)


def cmd_generate(args, run):
    out = args.out_dir
    if args.generator == "planted":
        spec = _spec_from_args(PlantedSpec, args, run.cfg.seed)
        g, truth = generate_planted(spec)
        truths = {"truth": truth}
    elif args.generator == "grid":
        spec = _spec_from_args(GridSpec, args, run.cfg.seed)
        g, cells, rows, cols = generate_grid(spec)
        truths = {"truth": cells, "rows": rows, "cols": cols}
    else:
        spec = _spec_from_args(FactorSpec, args, run.cfg.seed)
        g, factors = generate_factors(spec)
        truths = {f"factor_{factor_name(i)}": c for i, c in enumerate(factors)}
    write_multigraph(g, run.output(out / "multigraph.tsv"))
    for name, clustering in truths.items():
        write_clustering(clustering, run.output(out / f"{name}.tsv"))
    _write_json(run.output(out / "spec.json"), spec_as_dict(spec))
    print(f"{g.n_nodes} nodes, {g.n_edges} edges, {g.k} edge types")
    return out


def cmd_perturb(args, run):
    g = load_multigraph(run.input(args.input))
    if args.copies:
        name = args.type or g.edge_types[0]
        result = perturbed_copies(g, name, args.copies, run.cfg.seed)
    else:
        result = perturb(
            g,
            run.cfg.seed,
            sigma_bound=args.sigma_bound,
            nu_bounds=(args.nu_min, args.nu_max),
        )
    write_multigraph(result, run.output(args.out))
    print(f"{result.n_edges} edges")
    return args.out


def cmd_bench(args, run):
    rows = []
    for n in args.sizes:
        spec = PlantedSpec(
            n=n,
            n_clusters=max(2, n // 36),
            avg_degree=args.avg_degree,
            mixing=0.3,
            seed=run.cfg.seed,
        )
        g, truth = generate_planted(spec)
        evaluator = HoldingEvaluator(g, truth)
        evaluator.arctan_objective((1.0,), run.cfg.steepness)
        timings = []
        for _ in range(args.runs):
            started = time.perf_counter()
            evaluator.arctan_objective((1.0,), run.cfg.steepness)
            timings.append(time.perf_counter() - started)
        run.count(args.runs + 1)
        rows.append([n, g.n_edges, sum(timings) / len(timings)])
        logger.info("bench: %d edges, %.3g s per evaluation", g.n_edges, rows[-1][2])
    _write_csv(run.output(args.out), ["nodes", "edges", "mean_seconds"], rows)
    for n, edges, seconds in rows:
        print(f"{edges}\t{seconds:.6g}")
    return args.out


def cmd_config_dump(args, run):
    text = run.cfg.dump()
    run.output(args.out).write_text(text, encoding="utf-8")
    print(text, end="")
    return args.out


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for progress, -vv for details"
    )
    common.add_argument("--config", type=Path, help="key=value file of search settings")
    common.add_argument("--manifest", type=Path, help="where to write the run manifest")
    common.add_argument("--seed", type=int, help="seed for every random choice")
    common.add_argument("--budget", type=int, help="maximum objective evaluations")
    common.add_argument("--samples", type=int, help="number of sampled weight vectors")
    common.add_argument("--starts", type=int, help="number of random search starts")
    common.add_argument("--lambda", dest="lambda_", type=float, help="novelty trade-off")
    common.add_argument("--steepness", type=float, help="arctan steepness")
    return common


def _add_spec_arguments(parser, spec_class):
    for spec_field in dataclasses.fields(spec_class):
        if spec_field.name == "seed":
            continue
        kind = _floats if spec_field.name == "angles" else spec_field.type
        parser.add_argument(
            f"--{spec_field.name.replace('_', '-')}",
            dest=spec_field.name,
            type=kind,
            help=f"default: {spec_field.default}",
        )


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="multiedge", description="Clustering graphs with several edge types"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name, handler, help):
        sub = commands.add_parser(name, parents=[common], help=help)
        sub.set_defaults(handler=handler)
        return sub

    sub = command("aggregate", cmd_aggregate, "reduce a multigraph to a single-weight graph")
    sub.add_argument("input", type=Path)
    how = sub.add_mutually_exclusive_group(required=True)
    how.add_argument("--alpha", type=_floats, help="linear weights, e.g. 1,0.5")
    how.add_argument("--pair", type=_names, help="product of two types, e.g. a,b")
    how.add_argument("--union", type=_names, help="maximum of two types, e.g. a,b")
    sub.add_argument("--clamp", action="store_true", help="truncate negative composites at 0")
    sub.add_argument("--out", type=Path, required=True)

    sub = command("cluster", cmd_cluster, "greedy modularity clustering")
    sub.add_argument("input", type=Path)
    sub.add_argument("--alpha", type=_floats)
    sub.add_argument("--out", type=Path, required=True)

    sub = command("modularity", cmd_modularity, "modularity of a clustering")
    sub.add_argument("input", type=Path)
    sub.add_argument("clustering", type=Path)
    sub.add_argument("--alpha", type=_floats)
    sub.add_argument("--out", type=Path, required=True)

    sub = command("vi", cmd_vi, "variation of information between two clusterings")
    sub.add_argument("first", type=Path)
    sub.add_argument("second", type=Path)
    sub.add_argument("--out", type=Path, required=True)

    sub = command("recover", cmd_recover, "recover weights that justify a clustering")
    sub.add_argument("input", type=Path)
    sub.add_argument("--truth", type=Path, required=True)
    sub.add_argument("--steepness-grid", type=_floats)
    sub.add_argument("--out-dir", type=Path, required=True)

    sub = command("pareto", cmd_pareto, "holding fraction against modularity")
    sub.add_argument("input", type=Path)
    sub.add_argument("--truth", type=Path, required=True)
    sub.add_argument("--reference-alpha", type=_floats)
    sub.add_argument("--out", type=Path, required=True)

    sub = command("correlate", cmd_correlate, "arctan objective against forward-clustering VI")
    sub.add_argument("input", type=Path)
    sub.add_argument("--truth", type=Path, required=True)
    sub.add_argument("--steepness-grid", type=_floats)
    sub.add_argument("--out", type=Path, required=True)

    sub = command("metacluster", cmd_metacluster, "sample, meta-cluster and order clusterings")
    sub.add_argument("input", type=Path)
    sub.add_argument("--out-dir", type=Path, required=True)

    sub = command("consensus", cmd_consensus, "CSPA consensus of clusterings")
    sub.add_argument("clusterings", type=Path, nargs="+")
    sub.add_argument("--out", type=Path, required=True)

    sub = command("order", cmd_order, "order clusterings by set-wise information")
    sub.add_argument("clusterings", type=Path, nargs="+")
    sub.add_argument("--mode", choices=("exact", "greedy"), default="exact")
    sub.add_argument("--out", type=Path, required=True)

    sub = command("discover", cmd_discover, "find a good clustering unlike the given ones")
    sub.add_argument("input", type=Path)
    sub.add_argument("--given", type=Path, nargs="+", required=True)
    sub.add_argument("--out-dir", type=Path, required=True)

    sub = command("pairs", cmd_pairs, "score singleton types and pair products")
    sub.add_argument("input", type=Path)
    sub.add_argument("--reference", type=Path, required=True)
    sub.add_argument("--no-singletons", action="store_true")
    sub.add_argument("--self-pairs", action="store_true")
    sub.add_argument("--select", type=int, help="also pick this many mutually distant rows")
    sub.add_argument("--out", type=Path, required=True)

    sub = command("invariant-groups", cmd_invariant_groups, "nodes every clustering keeps together")
    source = sub.add_mutually_exclusive_group(required=True)
    source.add_argument("--ensemble", type=Path, help="ensemble directory")
    source.add_argument("--clusterings", type=Path, nargs="+")
    sub.add_argument("--out", type=Path, required=True)

    # the shared options belong to the generator parsers only
    sub = commands.add_parser("generate", help="write a synthetic multigraph and its ground truth")
    sub.set_defaults(handler=cmd_generate)
    generators = sub.add_subparsers(dest="generator", required=True)
    for name, spec_class in (("planted", PlantedSpec), ("grid", GridSpec), ("factors", FactorSpec)):
        generator = generators.add_parser(name, parents=[common])
        _add_spec_arguments(generator, spec_class)
        generator.add_argument("--out-dir", type=Path, required=True)

    sub = command("perturb", cmd_perturb, "randomly perturb edge weights")
    sub.add_argument("input", type=Path)
    sub.add_argument("--copies", type=int, help="make this many perturbed copies of one type")
    sub.add_argument("--type", help="edge type to copy (default: the first)")
    sub.add_argument("--sigma-bound", type=float, default=2.0)
    sub.add_argument("--nu-min", type=float, default=0.0)
    sub.add_argument("--nu-max", type=float, default=1.0)
    sub.add_argument("--out", type=Path, required=True)

    sub = command("bench", cmd_bench, "time the holding-power objective")
    sub.add_argument("--sizes", type=lambda text: tuple(int(v) for v in _floats(text)), default=(250, 500))
    sub.add_argument("--avg-degree", type=float, default=30.0)
    sub.add_argument("--runs", type=int, default=10)
    sub.add_argument("--out", type=Path, required=True)

    sub = command("config-dump", cmd_config_dump, "print every search setting")
    sub.add_argument("--out", type=Path, required=True)
    return parser


def _config(args):
    cfg = load_config(args.config) if args.config else SearchConfig()
    overrides = {
        "seed": args.seed,
        "max_evaluations": args.budget,
        "n_samples": args.samples,
        "n_starts": args.starts,
        "lambda_": args.lambda_,
        "steepness": args.steepness,
    }
    return cfg.replace(**{key: value for key, value in overrides.items() if value is not None})


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = _config(args)
        run = Run(args.command, cfg)
        primary = args.handler(args, run)
        run.finish(args.manifest or Path(f"{primary}.manifest.json"))
    except MultiEdgeError as error:
        print(f"multiedge: error: {error}", file=sys.stderr)
        return error.exit_status
    except OSError as error:
        print(f"multiedge: error: {error}", file=sys.stderr)
        return IO_ERROR_STATUS
    return 0
