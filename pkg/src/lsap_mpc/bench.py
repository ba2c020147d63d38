"""Instance generators, the benchmark grid and table reports.

Runtimes are simulated: a record's ``runtime`` is the cost model's
simulated time (counted local work plus ``rounds * latency``), which is
deterministic. Each (algorithm, n, data, seed, countermeasure) cell is
executed once; its latency variants are derived from the same counters.
"""

from __future__ import annotations

import csv
import io
import itertools
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .model import WeightMatrix
from .mpc.engine import CostModel
from .mpc.oblivious import run_oblivious
from .solvers import BRUTE_FORCE_MAX_SIDE, brute_force

BENCH_ALGORITHMS = ("hungarian", "sap_acm", "sap_jv", "auction")
ORACLE_MAX_SIDE = 8


class BenchError(RuntimeError):
    pass


class IncompleteGrid(BenchError):
    def __init__(self, missing: list[tuple]):
        self.missing = missing
        shown = "; ".join(str(m) for m in missing[:10])
        more = f" (+{len(missing) - 10} more)" if len(missing) > 10 else ""
        super().__init__(f"{len(missing)} grid cells missing: {shown}{more}")


# -- generators ---------------------------------------------------------------


def gen_random(n: int, width: int = 16, seed: int = 0) -> WeightMatrix:
    """i.i.d. uniform entries in ``[0, 2**width)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    return WeightMatrix(rng.integers(0, 1 << width, size=(n, n)).tolist(), bits=width)


def gen_structured(n: int, seed: int = 0, noise: float = 0.25, width: int = 16) -> WeightMatrix:
    """Stand-in for slot-priority data: each row prefers one column.

    Cost grows linearly with the distance ``|j - pref_i|`` in steps of
    ``2**width // (n + 1)``; ``noise`` adds a uniform perturbation of up to
    ``noise`` steps. With ``noise = 0`` every row's minimum sits at its
    preferred column. Preferences may collide, which is what makes the
    instances non-trivial.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    step = max(1, ((1 << width) - 1) // (n + 1))
    pref = rng.integers(0, n, size=n)
    dist = np.abs(np.arange(n)[None, :] - pref[:, None])
    jitter = np.floor(rng.random((n, n)) * noise * step).astype(np.int64)
    w = np.minimum(dist * step + jitter, (1 << width) - 1)
    return WeightMatrix(w.tolist(), bits=width)


def generate(kind: str, n: int, seed: int, width: int = 16) -> WeightMatrix:
    if kind == "random":
        return gen_random(n, width, seed)
    if kind == "structured":
        return gen_structured(n, seed, width=width)
    raise ValueError(f"unknown data kind {kind!r}")


# -- records ------------------------------------------------------------------


@dataclass(frozen=True)
class BenchRecord:
    """One benchmark cell. Field order is the CSV column order."""

    algorithm: str
    n: int
    data: str
    seed: int
    latency_ms: float
    countermeasure: bool
    runtime: float
    rounds: int
    zero_tests: int
    min_finds: int
    comparisons: int
    multiplications: int
    opened_values: int
    iterations: int
    steps: int
    cost: int

    def key(self) -> tuple:
        return (self.algorithm, self.n, self.data, self.seed, self.latency_ms, self.countermeasure)


COLUMNS = tuple(f.name for f in fields(BenchRecord))


def _run_cell(args) -> tuple[list[BenchRecord], int]:
    algorithm, n, data, seed, cm, latencies, width, backend, matrix = args
    W = matrix if matrix is not None else generate(data, n, seed, width)
    run = run_oblivious(algorithm, W, CostModel(), countermeasure=cm, seed=seed, backend=backend)
    c, st = run.cost, run.result.stats
    out = [
        BenchRecord(
            algorithm, n, data, seed, float(lat), cm,
            round(c.simulated_time(lat), 6), c.rounds, c.zero_tests, c.min_finds,
            c.comparisons, c.multiplications, c.opened_values, st.iterations, st.steps,
            run.result.cost,
        )
        for lat in latencies
    ]
    return out, run.result.cost


def run_bench(
    algorithms: Sequence[str] = BENCH_ALGORITHMS,
    ns: Sequence[int] = (4,),
    seeds: Sequence[int] = (0,),
    latencies: Sequence[float] = (0.0,),
    data: str = "random",
    width: int = 16,
    countermeasure: Sequence[bool] = (False,),
    backend: str = "count",
    oracle: bool = True,
    jobs: int = 1,
    matrix: WeightMatrix | None = None,
) -> list[BenchRecord]:
    """Run the full grid; asserts cross-algorithm cost agreement per instance
    and, for ``n <= 8`` with ``oracle``, agreement with brute force."""
    if matrix is not None:
        ns, seeds, data = [matrix.rows], [0], "file"
    cells = [
        (a, n, data, s, cm, tuple(latencies), width, backend, matrix)
        for n, s, cm, a in itertools.product(ns, seeds, countermeasure, algorithms)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]

    costs: dict[tuple, dict[str, int]] = {}
    records: list[BenchRecord] = []
    for cell, (recs, cost) in zip(cells, results):
        a, n, d, s, cm = cell[:5]
        costs.setdefault((n, d, s, cm), {})[a] = cost
        records += recs
    for (n, d, s, cm), by_algo in costs.items():
        if len(set(by_algo.values())) > 1:
            raise BenchError(f"algorithms disagree on n={n} {d} seed={s}: {by_algo}")
        if oracle and n <= min(ORACLE_MAX_SIDE, BRUTE_FORCE_MAX_SIDE):
            W = matrix if matrix is not None else generate(d, n, s, width)
            best = brute_force(W).cost
            if any(c != best for c in by_algo.values()):
                raise BenchError(f"n={n} {d} seed={s}: brute force {best}, solvers {by_algo}")
    return sorted(records, key=BenchRecord.key)


def records_to_csv(records: Iterable[BenchRecord], timestamp: bool = True) -> str:
    buf = io.StringIO()
    if timestamp:
        buf.write(f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in sorted(records, key=BenchRecord.key):
        w.writerow([getattr(r, c) for c in COLUMNS])
    return buf.getvalue()


def records_from_csv(text: str) -> list[BenchRecord]:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.DictReader(lines)
    if tuple(reader.fieldnames or ()) != COLUMNS:
        raise BenchError(f"unexpected CSV columns {reader.fieldnames}")
    out = []
    for row in reader:
        vals = {}
        for f in fields(BenchRecord):
            raw = row[f.name]
            if f.type in ("int", int):
                vals[f.name] = int(raw)
            elif f.type in ("float", float):
                vals[f.name] = float(raw)
            elif f.type in ("bool", bool):
                vals[f.name] = raw == "True"
            else:
                vals[f.name] = raw
        out.append(BenchRecord(**vals))
    return out


# -- reports ------------------------------------------------------------------


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list]

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        w.writerows(self.rows)
        return buf.getvalue()

    def text(self) -> str:
        cells = [self.columns] + [[_fmt(x) for x in row] for row in self.rows]
        widths = [max(len(str(r[k])) for r in cells) for k in range(len(self.columns))]
        lines = [self.name]
        for r in cells:
            lines.append("  ".join(str(x).rjust(wd) for x, wd in zip(r, widths)))
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.4f}"
    return str(x)


def check_grid(records: Sequence[BenchRecord]) -> None:
    if not records:
        raise BenchError("no benchmark records")
    axes = [sorted({getattr(r, k) for r in records}, key=str) for k in
            ("algorithm", "n", "data", "seed", "latency_ms", "countermeasure")]
    have = {r.key() for r in records}
    missing = [cell for cell in itertools.product(*axes) if cell not in have]
    if missing:
        raise IncompleteGrid(missing)


def _mean(xs) -> float:
    return statistics.fmean(xs) if xs else float("nan")


def report_tables(records: Sequence[BenchRecord]) -> list[Table]:
    """Derived tables; raises on an empty or incomplete grid."""
    check_grid(records)
    algos = sorted({r.algorithm for r in records})
    ns = sorted({r.n for r in records})
    lats = sorted({r.latency_ms for r in records})
    base_lat = lats[0]
    base = [r for r in records if r.latency_ms == base_lat and not r.countermeasure]

    def sel(rs, algo, n):
        return [r for r in rs if r.algorithm == algo and r.n == n]

    tables = []
    if base:
        tables.append(Table(
            "runtime",
            ["size"] + [f"t_{a}" for a in algos],
            [[n] + [_mean([r.runtime for r in sel(base, a, n)]) for a in algos] for n in ns],
        ))
    for algo, name in (("hungarian", "munkres"), ("sap_acm", "sap")):
        if algo in algos and base:
            rows = []
            for n in ns:
                rs = sel(base, algo, n)
                rows.append([n, _mean([r.steps for r in rs]), _mean([r.runtime for r in rs]),
                             _mean([r.zero_tests for r in rs]), _mean([r.min_finds for r in rs])])
            tables.append(Table(name, ["size", "steps", "time", "iszero", "min"], rows))
    if len(lats) > 1:
        rows = []
        for a in algos:
            for n in ns:
                rs = [r for r in records if r.algorithm == a and r.n == n and not r.countermeasure]
                if rs:
                    rows.append([a, n] + [_mean([r.runtime for r in rs if r.latency_ms == lat]) for lat in lats])
        tables.append(Table("latency", ["algorithm", "size"] + [f"L={lat:g}ms" for lat in lats], rows))
    if {True, False} <= {r.countermeasure for r in records}:
        rows = []
        for a in algos:
            for n in ns:
                plain = [r.runtime for r in records if r.algorithm == a and r.n == n
                         and r.latency_ms == base_lat and not r.countermeasure]
                shuf = [r.runtime for r in records if r.algorithm == a and r.n == n
                        and r.latency_ms == base_lat and r.countermeasure]
                rows.append([a, n, _mean(plain), _mean(shuf), _mean(shuf) - _mean(plain)])
        tables.append(Table("shuffle", ["algorithm", "size", "plain", "shuffle2d", "overhead"], rows))
    return tables


def write_reports(records: Sequence[BenchRecord], outdir: str | Path) -> list[Path]:
    """Write ``<table>.csv`` and ``<table>.txt``; nothing is written on error."""
    tables = report_tables(records)
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for t in tables:
        for suffix, body in (("csv", t.csv()), ("txt", t.text())):
            p = out / f"{t.name}.{suffix}"
            p.write_text(body, encoding="utf-8")
            paths.append(p)
    return paths


def summary(records: Sequence[BenchRecord]) -> dict:
    return {k: v for k, v in asdict(records[0]).items()} if records else {}
