"""Command line entry point: simulations, terminal sorting, and the service.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import socket
import sys
from pathlib import Path

from .engine import Algorithm, ComparisonOutcome, new_session
from .harness import (
    DEFAULT_ALGORITHMS,
    DEFAULT_LENGTHS,
    DEFAULT_NOISE_LEVELS,
    ExperimentConfig,
    run_matrix,
)


def _split_values(tokens: list[str]) -> list[str]:
    out: list[str] = []
    for tok in tokens:
        out.extend(t for t in tok.split(",") if t)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="probsort",
        description="Probabilistic, noise-resistant comparison sorting tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the convergence experiment matrix")
    sim.add_argument("--lengths", nargs="+", default=None, metavar="N",
                     help="list lengths (default: 8 16 32 64 128 256 512)")
    sim.add_argument("--noise", nargs="+", default=None, metavar="P",
                     help="noise levels in [0,1] (default: 0 0.1)")
    sim.add_argument("--algorithms", nargs="+", default=None, metavar="NAME",
                     help="subset of: " + " ".join(a.name.lower() for a in DEFAULT_ALGORITHMS))
    sim.add_argument("--runs", type=int, default=None,
                     help="override runs per cell (default: 128 for n<=64, else 64)")
    sim.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    sim.add_argument("--budget-multiplier", type=float, default=1.0,
                     help="scale the n*log2(n) comparison budget")
    sim.add_argument("--workers", type=int, default=None,
                     help="parallel worker processes (default: CPU count)")
    sim.add_argument("--out", required=True, metavar="DIR", help="output directory")

    srt = sub.add_parser("sort", help="sort a list of items interactively")
    srt.add_argument("--items", required=True, metavar="FILE",
                     help="UTF-8 file, one item label per line, blank lines ignored")
    srt.add_argument("--algorithm", default="tssort_partner_wover",
                     help="session algorithm (default: tssort_partner_wover)")

    srv = sub.add_parser("serve", help="run the HTTP session service")
    srv.add_argument("--port", type=int, default=8000, help="TCP port; 0 picks a free one")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--data-dir", required=True, help="directory for persisted sessions")
    srv.add_argument("--ui-dir", default=None, help="optional static web UI bundle to serve")

    return parser


def cmd_simulate(args, parser) -> int:
    try:
        lengths = tuple(int(t) for t in _split_values(args.lengths)) if args.lengths else DEFAULT_LENGTHS
    except ValueError:
        parser.error(f"invalid --lengths value in {args.lengths}: must be integers")
    try:
        noise = tuple(float(t) for t in _split_values(args.noise)) if args.noise else DEFAULT_NOISE_LEVELS
    except ValueError:
        parser.error(f"invalid --noise value in {args.noise}: must be numbers")
    if any(n < 2 for n in lengths):
        parser.error(f"invalid --lengths value: lengths must be >= 2, got {list(lengths)}")
    if any(not 0.0 <= p <= 1.0 for p in noise):
        parser.error(f"invalid --noise value: noise must be in [0, 1], got {list(noise)}")
    if args.runs is not None and args.runs < 1:
        parser.error(f"invalid --runs value: must be >= 1, got {args.runs}")
    if args.budget_multiplier <= 0:
        parser.error(f"invalid --budget-multiplier value: must be > 0, got {args.budget_multiplier}")
    if args.algorithms:
        try:
            algorithms = tuple(Algorithm.from_name(t) for t in _split_values(args.algorithms))
        except ValueError as exc:
            parser.error(f"invalid --algorithms value: {exc}")
    else:
        algorithms = DEFAULT_ALGORITHMS

    config = ExperimentConfig(
        lengths=lengths,
        noise_levels=noise,
        algorithms=algorithms,
        base_seed=args.seed,
        runs_override=args.runs,
        budget_multiplier=args.budget_multiplier,
    )
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    result = run_matrix(config, args.out, workers=max(1, workers))
    print(f"wrote {len(result.completed)} curve files and {result.manifest_path.name} to {result.out_dir}")
    if result.failed:
        for (n, p, a), err in sorted(result.failed.items(), key=str):
            print(f"FAILED cell {a.name} n={n} noise={p}: {err}", file=sys.stderr)
        return 1
    return 0


def _read_items(path: str, parser) -> list[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        parser.error(f"cannot read --items file: {exc}")
    labels = [line.strip() for line in text.splitlines() if line.strip()]
    if len(labels) < 2:
        parser.error(f"--items file must contain at least 2 non-empty lines, got {len(labels)}")
    return labels


def cmd_sort(args, parser) -> int:
    labels = _read_items(args.items, parser)
    try:
        algorithm = Algorithm.from_name(args.algorithm)
        session = new_session(len(labels), algorithm)
    except ValueError as exc:
        parser.error(f"invalid --algorithm value: {exc}")

    print(f"Sorting {len(labels)} items with {algorithm.name}; "
          f"budget {session.budget} comparisons. Answer 1, 2, = (draw) or q (quit).")
    while not session.is_finished():
        pair = session.next_pair()
        first = labels[pair.first_index]
        second = labels[pair.second_index]
        print(f"\n[{session.comparisons_done + 1}/{session.budget}] Which is greater?")
        print(f"  1) {first}")
        print(f"  2) {second}")
        try:
            answer = input("> ").strip()
        except EOFError:
            answer = "q"
        if answer == "q":
            break
        outcome = {
            "1": ComparisonOutcome.FIRST_WINS,
            "2": ComparisonOutcome.SECOND_WINS,
            "=": ComparisonOutcome.DRAW,
        }.get(answer)
        if outcome is None:
            print("please answer 1, 2, = or q")
            continue
        session.apply_outcome(pair, outcome)

    print("\nrank  label                             mu        sigma     score")
    ratings = session.ratings
    for rank, idx in enumerate(session.current_order(), start=1):
        r = ratings[idx]
        if hasattr(r, "mu"):
            mu, sigma, score = r.mu, r.sigma, r.mu - 3.0 * r.sigma
        else:
            mu, sigma, score = r.score, 0.0, r.score
        print(f"{rank:>4}  {labels[idx]:<32}  {mu:>8.3f}  {sigma:>8.3f}  {score:>8.3f}")
    return 0


def cmd_serve(args, parser) -> int:
    import uvicorn

    from .service import create_app

    data_dir = Path(args.data_dir)
    try:
        data_dir.mkdir(parents=True, exist_ok=True)
        probe = data_dir / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"data dir {args.data_dir!r} is not writable: {exc}", file=sys.stderr)
        return 1

    if args.ui_dir is not None and not Path(args.ui_dir).is_dir():
        print(f"ui dir {args.ui_dir!r} does not exist", file=sys.stderr)
        return 1

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((args.host, args.port))
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        sock.close()
        return 1
    host, port = sock.getsockname()[:2]
    print(f"probsort session service listening on http://{host}:{port}", flush=True)

    app = create_app(data_dir, ui_dir=args.ui_dir)
    config = uvicorn.Config(app, log_level="warning")
    server = uvicorn.Server(config)
    server.run(sockets=[sock])
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate":
        return cmd_simulate(args, parser)
    if args.command == "sort":
        return cmd_sort(args, parser)
    return cmd_serve(args, parser)


if __name__ == "__main__":
    sys.exit(main())
