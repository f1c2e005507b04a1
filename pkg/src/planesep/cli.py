"""Command-line front end: build, query, insert, stats, bench, plot.

Exit codes: 0 success (query: found), 1 query absent, 2 input/output or
load failure, 3 algorithm failure, 4 wrong plotting dimension.  Output
files are written to a temporary sibling and renamed into place, so a
failed command never leaves a partial file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels, oracle, repository, separator, svgplot
from .config import RunConfig
from .counters import OpCounters
from .errors import (
    DigitOverflowError,
    DimensionMismatchError,
    GeometryExhaustedError,
    IncidentPointError,
    PlanesepError,
    RepositoryFormatError,
)

EXIT_OK = 0
EXIT_ABSENT = 1
EXIT_IO = 2
EXIT_ALGORITHM = 3
EXIT_DIMENSION = 4


@dataclass
class BenchReport:
    scenario: str
    backend: str
    seed: int
    N_f: int
    n: int
    q_total: int
    q_emitted: int
    multiplications: int
    additions: int
    sign_evals: int
    bit_comparisons: int
    wall_time: float
    verified: bool
    mult_bound: int | None = None   # n * base^(n+1) when the scenario is digit data

    def lines(self) -> list[str]:
        out = [
            f"scenario {self.scenario}",
            f"backend {self.backend}",
            f"seed {self.seed}",
            f"N_f {self.N_f}",
            f"n {self.n}",
            f"q_total {self.q_total}",
            f"q_emitted {self.q_emitted}",
            f"multiplications {self.multiplications}",
            f"additions {self.additions}",
            f"sign_evals {self.sign_evals}",
            f"bit_comparisons {self.bit_comparisons}",
            f"wall_time_s {self.wall_time:.3f}",
            f"verified {'yes' if self.verified else 'NO'}",
        ]
        if self.mult_bound is not None:
            out.append(f"mult_bound {self.mult_bound}")
            out.append(f"mult_ratio {self.multiplications / self.mult_bound:.6f}")
        return out

    def as_dict(self) -> dict:
        d = {
            "scenario": self.scenario,
            "backend": self.backend,
            "seed": self.seed,
            "N_f": self.N_f,
            "n": self.n,
            "q_total": self.q_total,
            "q_emitted": self.q_emitted,
            "multiplications": self.multiplications,
            "additions": self.additions,
            "sign_evals": self.sign_evals,
            "bit_comparisons": self.bit_comparisons,
            "wall_time_s": round(self.wall_time, 6),
            "verified": self.verified,
        }
        if self.mult_bound is not None:
            d["mult_bound"] = self.mult_bound
            d["mult_ratio"] = self.multiplications / self.mult_bound
        return d


def _emit(report_format: str, lines: list[str], payload: dict) -> None:
    if report_format == "jsonl":
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _report_from_state(state, scenario: str, seed: int, wall: float, verified: bool,
                       base: int | None = None) -> BenchReport:
    c = state.counters
    bound = None
    if base is not None:
        bound = state.n * base ** (state.n + 1)
    return BenchReport(
        scenario=scenario,
        backend=kernels.backend_name(),
        seed=seed,
        N_f=state.count,
        n=state.n,
        q_total=state.q,
        q_emitted=state.q_emitted,
        multiplications=c.multiplications,
        additions=c.additions,
        sign_evals=c.sign_evals,
        bit_comparisons=c.bit_comparisons,
        wall_time=wall,
        verified=verified,
        mult_bound=bound,
    )


# ---------------------------------------------------------------------------
# value sources
# ---------------------------------------------------------------------------

def read_values_source(source: str) -> tuple[list[int], int]:
    """Values from `primes:<limit>`, `random:<N>:<limit>:<seed>`, or a file.

    Returns the deduplicated values and how many duplicates were dropped.
    """
    if source.startswith("primes:"):
        limit = int(source.split(":", 1)[1])
        if limit < 3:
            return [], 0
        table = oracle.sieve(limit)
        return [int(p) for p in table.primes() if p < limit], 0
    if source.startswith("random:"):
        parts = source.split(":")
        if len(parts) != 4:
            raise ValueError("random source must be random:<N>:<limit>:<seed>")
        count, limit, seed = int(parts[1]), int(parts[2]), int(parts[3])
        if count > limit:
            raise ValueError(f"cannot draw {count} distinct values below {limit}")
        rng = np.random.default_rng(seed)
        if limit <= 10_000_000:
            vals = rng.choice(limit, size=count, replace=False)
            return [int(v) for v in vals], 0
        chosen: set[int] = set()
        while len(chosen) < count:
            for v in rng.integers(0, limit, size=count):
                chosen.add(int(v))
                if len(chosen) == count:
                    break
        return sorted(chosen), 0

    values: list[int] = []
    seen: set[int] = set()
    duplicates = 0
    with open(source, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                v = int(line)
            except ValueError as exc:
                raise ValueError(f"{source}:{lineno}: not an integer: {line!r}") from exc
            if v < 0:
                raise ValueError(f"{source}:{lineno}: negative values are not storable")
            if v in seen:
                duplicates += 1
                continue
            seen.add(v)
            values.append(v)
    return values, duplicates


def infer_dims(values: list[int], base: int) -> int:
    n = 1
    top = max(values, default=0)
    while base**n <= top:
        n += 1
    return n


def _atomic_write(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _save_repo_atomic(repo, path: str) -> None:
    import io

    buf = io.StringIO()
    repository.save(repo, buf)
    _atomic_write(path, buf.getvalue())


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        seed=args.seed,
        epsilon=args.epsilon,
        delta0=args.delta0,
        max_retries=args.max_retries,
        base=args.base,
        report_format=args.format,
    )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_build(args) -> int:
    try:
        values, duplicates = read_values_source(args.source)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    config = _config_from_args(args)
    n = args.dims or infer_dims(values, config.base)
    try:
        t0 = time.perf_counter()
        repo = repository.build(values, n, config.seed, config)
        wall = time.perf_counter() - t0
    except (GeometryExhaustedError, IncidentPointError) as exc:
        print(f"algorithm failure: {exc}", file=sys.stderr)
        return EXIT_ALGORITHM
    except (DigitOverflowError, PlanesepError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    verdict = oracle.verify_separation(
        repo.state.points, repo.state.plane_matrix, config.epsilon
    )
    try:
        _save_repo_atomic(repo, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    report = _report_from_state(
        repo.state, f"build:{args.source}", config.seed, wall, verdict.ok, base=config.base
    )
    lines = report.lines()
    payload = report.as_dict()
    if duplicates:
        lines.append(f"duplicates_skipped {duplicates}")
        payload["duplicates_skipped"] = duplicates
    lines.append(f"out {args.out}")
    payload["out"] = args.out
    _emit(args.format, lines, payload)
    return EXIT_OK if verdict.ok else EXIT_ALGORITHM


def _load_repo(path: str):
    try:
        return repository.load(path), EXIT_OK
    except (OSError, RepositoryFormatError) as exc:
        print(f"error: cannot load {path}: {exc}", file=sys.stderr)
        return None, EXIT_IO


def cmd_query(args) -> int:
    repo, code = _load_repo(args.repo)
    if repo is None:
        return code
    counters = OpCounters()
    try:
        result = repository.query(repo, args.value, counters)
    except DigitOverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    status = "found" if result.found else f"absent ({result.reason.value})"
    lines = [
        f"value {args.value}",
        f"result {status}",
        f"multiplications {counters.multiplications}",
        f"additions {counters.additions}",
        f"sign_evals {counters.sign_evals}",
        f"bit_comparisons {counters.bit_comparisons}",
    ]
    payload = {
        "value": args.value,
        "found": result.found,
        "reason": None if result.found else result.reason.value,
        **counters.as_dict(),
    }
    _emit(args.format, lines, payload)
    return EXIT_OK if result.found else EXIT_ABSENT


def cmd_insert(args) -> int:
    repo, code = _load_repo(args.repo)
    if repo is None:
        return code
    try:
        values, duplicates = read_values_source(args.source)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    q_before = repo.q
    try:
        t0 = time.perf_counter()
        report = repository.insert(repo, values)
        wall = time.perf_counter() - t0
    except (GeometryExhaustedError, IncidentPointError) as exc:
        print(f"algorithm failure: {exc}", file=sys.stderr)
        return EXIT_ALGORITHM
    except DigitOverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        _save_repo_atomic(repo, args.repo)
    except OSError as exc:
        print(f"error: cannot write {args.repo}: {exc}", file=sys.stderr)
        return EXIT_IO
    lines = [
        f"added {report.added}",
        f"skipped_duplicates {len(report.skipped_duplicates) + duplicates}",
        f"planes_added {report.planes_added}",
        f"q_total {repo.q}",
        f"wall_time_s {wall:.3f}",
    ]
    payload = {
        "added": report.added,
        "skipped_duplicates": len(report.skipped_duplicates) + duplicates,
        "planes_added": report.planes_added,
        "q_before": q_before,
        "q_total": repo.q,
        "wall_time_s": round(wall, 6),
    }
    _emit(args.format, lines, payload)
    return EXIT_OK


def cmd_stats(args) -> int:
    repo, code = _load_repo(args.repo)
    if repo is None:
        return code
    state = repo.state
    base = repo.mapping.base
    n = state.n
    c = state.counters
    hard_bound = (base - 1) * n + state.q0
    quoted_bound = 10 * n
    expected_nf = base**n / n
    ov_floor = state.count * n * state.q

    lines = [
        f"n {n}",
        f"dims_history {','.join(str(d) for d in repo.meta.dims_history)}",
        f"base {base}",
        f"N_f {state.count}",
        f"q_total {state.q}",
        f"q0 {state.q0}",
        f"q_emitted {state.q_emitted}",
        f"offers {state.offers}",
        f"recycle_events {state.recycle_events}",
    ]
    lines += [f"{k} {v}" for k, v in c.as_dict().items()]
    lines += [
        f"bound_quoted_q_le_10n {quoted_bound} ({'ok' if state.q <= quoted_bound else 'exceeded'})",
        f"bound_hard_q_le_thresholds_plus_q0 {hard_bound} "
        f"({'ok' if state.q <= hard_bound else 'VIOLATION'})",
        f"expected_N_f_base^n/n {expected_nf:.1f}",
        f"ov_mult_floor_N.n.q {ov_floor} "
        f"({'ok' if c.multiplications >= ov_floor else 'VIOLATION'})",
    ]
    payload = {
        "n": n,
        "dims_history": list(repo.meta.dims_history),
        "base": base,
        "N_f": state.count,
        "q_total": state.q,
        "q0": state.q0,
        "q_emitted": state.q_emitted,
        "offers": state.offers,
        "recycle_events": state.recycle_events,
        **c.as_dict(),
        "bound_quoted_q_le_10n": quoted_bound,
        "bound_hard": hard_bound,
        "bound_hard_ok": state.q <= hard_bound,
        "expected_N_f": expected_nf,
        "ov_mult_floor": ov_floor,
        "ov_mult_floor_ok": c.multiplications >= ov_floor,
    }
    _emit(args.format, lines, payload)
    return EXIT_OK


def _warm_kernels() -> None:
    a = np.ones((2, 2))
    p = np.ones(2)
    kernels.residuals_point(a, p)
    kernels.residuals_plane(a, p)
    kernels.gauss_solve(a + np.eye(2), np.full(2, -1.0), np.zeros(2))


def _bench_once(scenario: str, seed: int, config: RunConfig, rep: int = 0) -> BenchReport:
    parts = scenario.split(":")
    _warm_kernels()
    if parts[0] == "cube":
        if len(parts) not in (3, 4):
            raise ValueError("cube scenario must be cube:<N>:<dims>[:<seed>]")
        count, dims = int(parts[1]), int(parts[2])
        if len(parts) == 4:
            seed = int(parts[3]) + rep  # the caller's seed already advances per rep
        pts = np.random.default_rng(seed).random((count, dims))
        t0 = time.perf_counter()
        state = separator.run(pts, dims, seed, config)
        wall = time.perf_counter() - t0
        verdict = oracle.verify_separation(state.points, state.plane_matrix, config.epsilon)
        return _report_from_state(state, scenario, seed, wall, verdict.ok)
    if parts[0] == "primes":
        if len(parts) != 3:
            raise ValueError("primes scenario must be primes:<limit>:<dims>")
        limit, dims = int(parts[1]), int(parts[2])
        values, _ = read_values_source(f"primes:{limit}")
        t0 = time.perf_counter()
        repo = repository.build(values, dims, seed, config)
        wall = time.perf_counter() - t0
        verdict = oracle.verify_separation(
            repo.state.points, repo.state.plane_matrix, config.epsilon
        )
        return _report_from_state(repo.state, scenario, seed, wall, verdict.ok, base=config.base)
    raise ValueError(f"unknown scenario {parts[0]!r}")


def cmd_bench(args) -> int:
    config = _config_from_args(args)
    if args.backend:
        backends = [args.backend]
    elif args.compare_backends:
        backends = list(kernels.available_backends())
    else:
        backends = [kernels.backend_name()]
    previous = kernels.backend_name()
    walls: dict[str, float] = {}
    exit_code = EXIT_OK
    try:
        for backend in backends:
            kernels.set_backend(backend)
            for rep in range(args.repeat):
                try:
                    report = _bench_once(args.scenario, args.seed + rep, config, rep)
                except (GeometryExhaustedError, IncidentPointError) as exc:
                    print(f"algorithm failure: {exc}", file=sys.stderr)
                    return EXIT_ALGORITHM
                except ValueError as exc:
                    print(f"error: {exc}", file=sys.stderr)
                    return EXIT_IO
                walls[backend] = walls.get(backend, 0.0) + report.wall_time
                if not report.verified:
                    exit_code = EXIT_ALGORITHM
                _emit(args.format, report.lines() + [""], report.as_dict())
    finally:
        kernels.set_backend(previous)
    if args.compare_backends and len(walls) > 1 and "numba" in walls and "numpy" in walls:
        ratio = walls["numpy"] / walls["numba"] if walls["numba"] > 0 else math.inf
        summary = f"numpy/numba wall-time ratio {ratio:.2f}"
        if args.format == "jsonl":
            print(json.dumps({"compare": summary, "walls": walls}, sort_keys=True))
        else:
            print(summary)
    return exit_code


def cmd_plot(args) -> int:
    repo, code = _load_repo(args.repo)
    if repo is None:
        return code
    try:
        text = svgplot.render_svg(repo)
    except DimensionMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    try:
        _atomic_write(args.out, text)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_config_args(sp) -> None:
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--epsilon", type=float, default=1e-9)
    sp.add_argument("--delta0", type=float, default=1e-4)
    sp.add_argument("--max-retries", type=int, default=8)
    sp.add_argument("--base", type=int, default=10)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planesep",
        description="Store integer sets as points separated by hyperplanes and "
        "query exact membership via packed sign vectors.",
    )
    parser.add_argument(
        "--format", choices=("text", "jsonl"), default="text", help="report format"
    )
    # accept --format after the subcommand as well
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("text", "jsonl"), default=argparse.SUPPRESS,
        help="report format",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=argparse.ArgumentParser)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    sp = add_parser("build", help="build a repository from a values source")
    sp.add_argument("--source", required=True,
                    help="file of integers, primes:<limit>, or random:<N>:<limit>:<seed>")
    sp.add_argument("--out", required=True, help="repository file to write")
    sp.add_argument("--dims", type=int, default=0, help="digit width (default: inferred)")
    _add_config_args(sp)
    sp.set_defaults(func=cmd_build)

    sp = add_parser("query", help="exact membership test for one value")
    sp.add_argument("repo")
    sp.add_argument("value", type=int)
    sp.set_defaults(func=cmd_query)

    sp = add_parser("insert", help="insert new values into a repository file")
    sp.add_argument("repo")
    sp.add_argument("--source", required=True)
    sp.set_defaults(func=cmd_insert)

    sp = add_parser("stats", help="counters and bound checks for a repository")
    sp.add_argument("repo")
    sp.set_defaults(func=cmd_stats)

    sp = add_parser("bench", help="run a separation scenario and report counters")
    sp.add_argument("scenario", help="cube:<N>:<dims>[:<seed>] or primes:<limit>:<dims>")
    sp.add_argument("--repeat", type=int, default=1)
    sp.add_argument("--backend", choices=kernels.available_backends(), default=None)
    sp.add_argument("--compare-backends", action="store_true",
                    help="run every available kernel backend and report the speedup")
    _add_config_args(sp)
    sp.set_defaults(func=cmd_bench)

    sp = add_parser("plot", help="render a 2-digit repository as SVG")
    sp.add_argument("repo")
    sp.add_argument("out")
    sp.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
