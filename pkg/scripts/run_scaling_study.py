"""Collect optimizer evaluation counts and objective timings across graph sizes and edge types."""

import argparse
import csv
import json
import os
import subprocess
import sys
from pathlib import Path

SCRIPT_DIR = Path(__file__).parent
SOURCE_DIR = SCRIPT_DIR.parent / "python"
WORK_DIR = SCRIPT_DIR / ".scaling"


def log(header: str):
    print(f"\033[1;32m==> {header}\033[0m\n", flush=True)


def _int_list(text: str) -> list[int]:
    return [int(value) for value in text.split(",") if value]


def multiedge(*args) -> None:
    subprocess.run(
        [sys.executable, "-m", "multiedge", *(str(arg) for arg in args)],
        check=True,
        env={**os.environ, "PYTHONPATH": str(SOURCE_DIR)},
    )


def recover_run(work_dir: Path, n: int, k: int, budget: int, seed: int) -> dict:
    """Generate one planted multigraph with `k` edge types and recover its weights."""
    case = work_dir / f"n{n}_k{k}"
    multiedge(
        "generate", "planted",
        "--n", n, "--n-clusters", max(2, n // 36), "--k-types", 1, "--noise-types", k - 1,
        "--seed", seed, "--out-dir", case,
    )  # fmt: skip
    recovered = case / "recovered"
    multiedge(
        "recover", case / "multigraph.tsv", "--truth", case / "truth.tsv",
        "--budget", budget, "--seed", seed, "--out-dir", recovered,
    )  # fmt: skip
    manifest = json.loads(Path(f"{recovered}.manifest.json").read_text())
    weights = json.loads((recovered / "weights.json").read_text())
    return {
        "nodes": n,
        "edge_types": k,
        "evaluations": manifest["evaluations"],
        "wall_time": manifest["wall_time"],
        "positive_fraction": weights["best"]["positive_fraction"],
    }


def bench_rows(work_dir: Path, sizes: list[int], runs: int) -> list[dict]:
    out = work_dir / "bench.csv"
    multiedge("bench", "--sizes", ",".join(map(str, sizes)), "--runs", runs, "--out", out)
    with out.open(newline="") as handle:
        return [
            {"nodes": int(row["nodes"]), "edges": int(row["edges"]), "mean_seconds": float(row["mean_seconds"])}
            for row in csv.DictReader(handle)
        ]


def main():
    parser = argparse.ArgumentParser(
        description="Run the multiedge CLI over growing graphs and edge-type counts"
    )
    parser.add_argument("--sizes", type=_int_list, default=[250, 500, 1000])
    parser.add_argument("--types", type=_int_list, default=[1, 2, 4, 8])
    parser.add_argument("--budget", type=int, default=2000)
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--work-dir", type=Path, default=WORK_DIR)
    parser.add_argument(
        "--summary",
        type=Path,
        help="The file to write the summary to (default: <work-dir>/summary.json)",
    )
    args = parser.parse_args()
    args.work_dir.mkdir(parents=True, exist_ok=True)

    recover = []
    for n in args.sizes:
        for k in args.types:
            log(f"Recovering weights: {n} nodes, {k} edge types")
            recover.append(recover_run(args.work_dir, n, k, args.budget, args.seed))

    log("Timing the holding-power objective...")
    bench = bench_rows(args.work_dir, args.sizes, args.runs)

    summary = args.summary or args.work_dir / "summary.json"
    summary.write_text(json.dumps({"recover": recover, "bench": bench}, indent=2) + "\n")
    for row in recover:
        log(f"{row['nodes']} nodes, {row['edge_types']} types: {row['evaluations']} evaluations")
    log(f"Summary written to {summary}")

    log("Done !")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
