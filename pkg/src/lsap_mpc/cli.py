"""``lsap-mpc`` command-line front end.

Exit codes: 0 success, 1 usage or unreadable input, 2 verification failed,
3 solver or internal error. ``LSAP_MPC_OUT`` sets the default output
directory (current directory otherwise).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import bench
from .certificate import (
    CertificateError,
    certificate_id,
    dumps_public,
    dumps_witness,
    extract_certificate,
    load_public,
    loads_witness,
    verify_certificate_clear,
)
from .model import MatrixFormatError, WeightMatrix, read_matrix
from .mpc import ALGORITHMS, run_oblivious
from .mpc.engine import BACKENDS, CostModel
from .solvers import SolverError, solve
from .zk.group import DEFAULT_LABEL

EXIT_OK, EXIT_USAGE, EXIT_REJECT, EXIT_INTERNAL = 0, 1, 2, 3
OUT_ENV = "LSAP_MPC_OUT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- flag parsing -------------------------------------------------------------


def parse_ints(text: str) -> list[int]:
    """``"4"``, ``"2,4,8"``, ``"10..50"`` (step 1) or ``"10..50:10"``."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                span, _, step = part.partition(":")
                lo, hi = (int(x) for x in span.split(".."))
                out += range(lo, hi + 1, int(step) if step else 1)
            elif part:
                out.append(int(part))
    except ValueError as exc:
        raise UsageError(f"cannot parse integer list {text!r}") from exc
    if not out:
        raise UsageError(f"empty integer list {text!r}")
    return out


def parse_seeds(text: str) -> list[int]:
    """A bare integer is a count (seeds 0..k-1); lists and ranges are explicit."""
    if "," in text or ".." in text:
        return parse_ints(text)
    k = parse_ints(text)[0]
    if k < 1:
        raise UsageError("--seeds must be at least 1")
    return list(range(k))


def parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse latency list {text!r}") from exc


def parse_algos(text: str, allowed=ALGORITHMS, all_=bench.BENCH_ALGORITHMS) -> list[str]:
    if text == "all":
        return list(all_)
    algos = [a.strip() for a in text.split(",") if a.strip()]
    bad = [a for a in algos if a not in allowed]
    if bad or not algos:
        raise UsageError(f"unknown algorithm(s) {bad or text!r}; choose from {', '.join(allowed)} or all")
    return algos


def out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or ".")


def load_instance(args) -> WeightMatrix:
    if args.data == "file":
        if not args.input:
            raise UsageError("--data file needs --in PATH")
        return read_matrix(args.input, bits=args.width)
    if args.input:
        raise UsageError("--in is only valid with --data file")
    return bench.generate(args.data, parse_ints(args.n)[0], parse_seeds(args.seeds)[0], args.width)


# -- verbs --------------------------------------------------------------------


def _stats_line(stats) -> str:
    return " ".join(f"{k}={v}" for k, v in stats.as_dict().items())


def cmd_solve(args) -> int:
    W = load_instance(args)
    for algo in parse_algos(args.algo, all_=ALGORITHMS):
        if args.mpc:
            run = run_oblivious(algo, W, CostModel(), countermeasure=args.countermeasure,
                                seed=args.mpc_seed, backend=args.backend)
            res = run.result
        else:
            res = solve(W, algo)
        print(f"algorithm: {algo}")
        print(f"assignment: {' '.join(f'{i}->{j}' for i, j in res.assignment.pairs)}")
        print(f"cost: {res.cost}")
        print(f"u: {' '.join(map(str, res.dual.u))}")
        print(f"v: {' '.join(map(str, res.dual.v))}")
        print(f"stats: {_stats_line(res.stats)}")
        if args.mpc:
            c = run.cost
            print(f"mpc: rounds={c.rounds} zero_tests={c.zero_tests} comparisons={c.comparisons} "
                  f"min_finds={c.min_finds} multiplications={c.multiplications} "
                  f"simulated_s={c.simulated_time(args.latency_ms):.6f}")
    return EXIT_OK


def cmd_certify(args) -> int:
    W = load_instance(args)
    algo = parse_algos(args.algo, all_=ALGORITHMS)[0]
    cert = extract_certificate(W, solve(W, algo))
    out = out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    (out / "certificate.public.json").write_text(dumps_public(cert), encoding="ascii")
    (out / "certificate.witness.json").write_text(dumps_witness(cert), encoding="ascii")
    print(f"certificate: {certificate_id(cert)}")
    print(f"verdict: {verify_certificate_clear(cert)}")
    print(f"written: {out / 'certificate.public.json'} {out / 'certificate.witness.json'}")
    return EXIT_OK


def cmd_prove(args) -> int:
    from .zk import Blindings, commit_instance, dumps_proof, manifest, prove_optimality, setup

    cert = loads_witness(Path(args.witness).read_text(encoding="ascii"))
    ctx = setup(args.label)
    blinds = Blindings.fresh(cert.n)
    cs, _ = commit_instance(ctx, cert.weights, cert.dual, blinds, args.width)
    proof = prove_optimality(ctx, cert, blinds, args.width, commitments=cs)
    path = Path(args.out) if args.out else Path(os.environ.get(OUT_ENV) or ".") / "proof.bin"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps_proof(proof, cs))
    text = manifest(proof, cs)
    path.with_name(path.name + ".manifest").write_text(text, encoding="ascii")
    print(text, end="")
    print(f"written: {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .zk import MalformedProof, loads_proof, setup, verify_optimality

    data = Path(args.proof).read_bytes()
    try:
        proof, cs = loads_proof(data)
        pairs, optimum = proof.assignment, proof.optimum
        if args.public:
            pub = load_public(Path(args.public).read_text(encoding="ascii"))
            pairs, optimum = [tuple(p) for p in pub["assignment"]], pub["optimum"]
        verdict = verify_optimality(setup(args.label), cs, pairs, optimum, proof)
    except MalformedProof as exc:
        print(f"reject: malformed proof: {exc}")
        return EXIT_REJECT
    print(verdict)
    return EXIT_OK if verdict else EXIT_REJECT


def cmd_bench(args) -> int:
    if args.data == "file":
        if not args.input:
            raise UsageError("--data file needs --in PATH")
        matrix = read_matrix(args.input, bits=args.width)
        if not matrix.is_square:
            raise UsageError("bench needs a square matrix")
    else:
        matrix = None
    cm = {"off": [False], "on": [True], "both": [False, True]}[args.countermeasure]
    records = bench.run_bench(
        algorithms=parse_algos(args.algo),
        ns=parse_ints(args.n),
        seeds=parse_seeds(args.seeds),
        latencies=parse_floats(args.latency),
        data=args.data,
        width=args.width,
        countermeasure=cm,
        backend=args.backend,
        oracle=not args.no_oracle,
        jobs=args.jobs,
        matrix=matrix,
    )
    text = bench.records_to_csv(records, timestamp=not args.no_timestamp)
    if args.out == "-":
        sys.stdout.write(text)
        return EXIT_OK
    out = out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench.csv").write_text(text, encoding="utf-8")
    print(f"written: {out / 'bench.csv'} ({len(records)} records)")
    if args.tables:
        for p in bench.write_reports(records, out):
            print(f"written: {p}")
    return EXIT_OK


def cmd_shuffle_demo(args) -> int:
    W = load_instance(args)
    algo = parse_algos(args.algo, all_=["hungarian"])[0]
    rows = []
    for cm in (False, True):
        for s in range(args.draws):
            run = run_oblivious(algo, W, CostModel(), countermeasure=cm, seed=s, backend=args.backend)
            rows.append((cm, s, run.result.cost, len(run.log), run.log.digest()))
    print(f"algorithm: {algo} n={W.rows}x{W.cols}")
    for cm, s, cost, events, digest in rows:
        label = "shuffled  " if cm else "unshuffled"
        print(f"{label} seed={s} cost={cost} events={events} digest={digest[:16]}")
    plain = {d for cm, *_, d in rows if not cm}
    shuf = {d for cm, *_, d in rows if cm}
    print(f"distinct digests: unshuffled={len(plain)} shuffled={len(shuf)}")
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _instance_flags(p, algo_default="hungarian"):
    p.add_argument("--algo", default=algo_default, help="algorithm name, comma list, or 'all'")
    p.add_argument("--data", choices=("random", "structured", "file"), default="random")
    p.add_argument("--in", dest="input", metavar="PATH", help="matrix file for --data file")
    p.add_argument("--n", default="4", help="size for generated data")
    p.add_argument("--seeds", default="1", help="seed count, or explicit list/range")
    p.add_argument("--width", type=int, default=16, help="bit width of the weights")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lsap-mpc", description="Verifiable, privacy-preserving assignment solving.")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve an instance and print assignment, cost, duals, stats")
    _instance_flags(p)
    p.add_argument("--mpc", action="store_true", help="run the secret-shared version")
    p.add_argument("--backend", choices=BACKENDS, default="shamir")
    p.add_argument("--countermeasure", action="store_true")
    p.add_argument("--mpc-seed", type=int, default=0)
    p.add_argument("--latency-ms", type=float, default=0.0)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", help="write public and witness certificate files")
    _instance_flags(p)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("prove", help="zero-knowledge optimality proof from a witness file")
    p.add_argument("--witness", required=True)
    p.add_argument("--width", type=int, default=16)
    p.add_argument("--label", default=DEFAULT_LABEL)
    p.add_argument("--out", help="proof file path")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify", help="check a serialized proof")
    p.add_argument("--proof", required=True)
    p.add_argument("--public", help="public certificate whose assignment and optimum must match")
    p.add_argument("--label", default=DEFAULT_LABEL)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="benchmark grid to CSV")
    _instance_flags(p, algo_default="all")
    p.add_argument("--latency", default="0", help="comma list of simulated latencies in ms")
    p.add_argument("--countermeasure", choices=("off", "on", "both"), default="off")
    p.add_argument("--backend", choices=BACKENDS, default="count")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-oracle", action="store_true")
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--tables", action="store_true", help="also write derived tables")
    p.add_argument("--out", help="output directory, or - for stdout")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("shuffle-demo", help="leakage-log digests with and without shuffling")
    _instance_flags(p)
    p.add_argument("--draws", type=int, default=3)
    p.add_argument("--backend", choices=BACKENDS, default="ideal")
    p.set_defaults(func=cmd_shuffle_demo)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, MatrixFormatError, CertificateError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, bench.BenchError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
