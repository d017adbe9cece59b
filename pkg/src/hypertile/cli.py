"""Command-line entry point.

Exit codes: 0 success, 1 negative verdict, 2 bad parameters, 3 I/O or parse
error, 4 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .absorption import PipelineConfig, closed_partition, closeness_graph, run_absorption_pipeline
from .constructions import (
    Certificate,
    fano_plane,
    multipartite_graph_extremal,
    parity_construction,
    pikhurko_construction,
    space_barrier,
)
from .core import Hypergraph, parse_pattern, read_hypergraph, write_hypergraph
from .design import contains_B_lambda, independence_number, is_partial_design, random_greedy_design
from .errors import (
    HypergraphParseError,
    HypertileError,
    PreconditionError,
    ResourceCapError,
)
from .factor import almost_factor_local_search, exact_factor, verify_tiling
from .parameters import table_to_csv, table_to_json, threshold_table

EXIT_OK, EXIT_NEGATIVE, EXIT_PARAMS, EXIT_IO, EXIT_CAP = 0, 1, 2, 3, 4


class _Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _read(path: str) -> Hypergraph:
    try:
        return read_hypergraph(path)
    except OSError as exc:
        raise _Failure(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from exc


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise _Failure(EXIT_IO, f"cannot write {path}: {exc.strerror or exc}") from exc


def _params(args: argparse.Namespace) -> dict:
    skip = {"func", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# construct


def _emit_construction(args, H: Hypergraph, cert: Certificate, name: str) -> tuple[dict, list[str], int]:
    out = Path(args.out_dir)
    hg = out / f"{name}.hg"
    cj = out / f"{name}.cert.json"
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_hypergraph(H, hg)
    except OSError as exc:
        raise _Failure(EXIT_IO, f"cannot write {hg}: {exc.strerror or exc}") from exc
    _write_text(cj, _dumps(cert.to_json()))
    return {"hypergraph": str(hg), "certificate": cert.to_json(), "certificate_file": str(cj)}, [], EXIT_OK


def cmd_construct(args):
    kind = args.kind
    if kind == "parity":
        H, cert = parity_construction(args.k, args.n)
        name = f"parity_k{args.k}_n{args.n}"
    elif kind == "space-barrier":
        H, cert = space_barrier(args.k, args.t, args.n)
        name = f"space_barrier_k{args.k}_t{args.t}_n{args.n}"
    elif kind == "pikhurko":
        H0 = _read(args.h0) if args.h0 else fano_plane()
        H, cert = pikhurko_construction(args.t, args.n, args.lam, H0)
        name = f"pikhurko_t{args.t}_n{args.n}_l{args.lam}"
    else:
        H, cert = multipartite_graph_extremal(args.t, args.n, args.balanced)
        name = f"multipartite_t{args.t}_n{args.n}" + ("_balanced" if args.balanced else "")
    payload, inputs, code = _emit_construction(args, H, cert, name)
    return payload, [args.h0] if getattr(args, "h0", None) else inputs, code


# factor


def cmd_factor(args):
    H = _read(args.file)
    F = parse_pattern(args.pattern)
    inputs = [args.file]
    if args.pattern.startswith("F:"):
        inputs.append(args.pattern[2:])
    if args.mode == "exact":
        tiling = exact_factor(H, F)
        if tiling is None:
            return {"mode": "exact", "factor": False, "tiling": None}, inputs, EXIT_NEGATIVE
        report = verify_tiling(tiling)
        return {"mode": "exact", "factor": True, "verified": report.ok,
                "tiling": tiling.to_json()}, inputs, EXIT_OK
    if args.mode == "local-search":
        if not F.kind == "complete":
            raise PreconditionError("local search tiles complete patterns K:t:k only")
        res = almost_factor_local_search(H, F.order, seed=args.seed, restarts=args.restarts)
        if args.trace:
            _write_text(Path(args.trace), "".join(json.dumps(m) + "\n" for m in res.trace))
        payload = {"mode": "local-search", "tiling": res.tiling.to_json(),
                   "leftover_size": len(res.tiling.leftover),
                   "final_weight": str(res.partition.total_weight), "moves": len(res.trace),
                   "restarts": res.restarts, "verified": verify_tiling(res.tiling).ok}
        return payload, inputs, EXIT_OK if res.tiling.is_perfect else EXIT_NEGATIVE
    cfg = PipelineConfig(seed=args.seed, restarts=args.restarts, step1=args.step1,
                         capacity_target=args.capacity)
    res = run_absorption_pipeline(H, F, cfg)
    payload = {"mode": "pipeline", "config": cfg.to_json(), **res.to_json()}
    return payload, inputs, EXIT_OK if res.ok else EXIT_NEGATIVE


# thresholds


def cmd_thresholds(args):
    if args.k_max < args.k_min:
        raise PreconditionError("--k-max must be at least --k-min")
    rows = threshold_table(range(args.k_min, args.k_max + 1), lambda k: k + args.t_offset)
    csv_text, json_text = table_to_csv(rows), table_to_json(rows)
    written = []
    if args.csv:
        _write_text(Path(args.csv), csv_text)
        written.append(args.csv)
    if args.json:
        _write_text(Path(args.json), json_text)
        written.append(args.json)
    payload = {"rows": [{**r.as_record(), "coefficient": str(r.codegree_coefficient),
                         "beta": str(r.beta), "d": str(r.d)} for r in rows],
               "written": written}
    if args.format == "csv":
        return csv_text, [], EXIT_OK
    return payload, [], EXIT_OK


# design


def cmd_design(args):
    if args.action == "gen":
        state = random_greedy_design(args.n, args.k, args.t, args.lam, args.seed)
        payload = {"design": state.to_json(), "blocks": len(state.blocks)}
        if args.out:
            base = Path(args.out)
            try:
                base.parent.mkdir(parents=True, exist_ok=True)
                write_hypergraph(state.hypergraph(), base.with_suffix(".hg"))
            except OSError as exc:
                raise _Failure(EXIT_IO, f"cannot write {base}: {exc.strerror or exc}") from exc
            _write_text(base.with_suffix(".json"), _dumps(state.to_json()))
            payload["files"] = [str(base.with_suffix(".hg")), str(base.with_suffix(".json"))]
        return payload, [], EXIT_OK
    H = _read(args.file)
    if args.action == "check":
        verdict = is_partial_design(H.edges, H.n, H.k, args.t, args.lam)
        payload = {"partial_design": verdict.ok,
                   "violation": None if verdict.ok else {"tset": list(verdict.tset),
                                                         "multiplicity": verdict.multiplicity}}
        if H.k == 3 and args.t == 2:
            book = contains_B_lambda(H, args.lam)
            payload["book"] = {"contains": book.contains,
                               "pair": list(book.pair) if book.pair else None,
                               "petals": list(book.petals)}
        return payload, [args.file], EXIT_OK if verdict.ok else EXIT_NEGATIVE
    res = independence_number(H)
    return {"alpha": res.size, "witness": sorted(res.witness), "exact": res.exact}, [args.file], EXIT_OK


# closeness


def cmd_closeness(args):
    H = _read(args.file)
    F = parse_pattern(args.pattern)
    G = closeness_graph(H, F, args.i, args.tau)
    part = closed_partition(G)
    payload = {**G.to_json(), "components": len(part.classes)}
    return payload, [args.file], EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hypertile", description="Hypergraph tiling toolkit.")
    p.add_argument("--version", action="version", version=f"hypertile {__version__}")
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap; all engines currently run on one thread")
    p.add_argument("--report", help="also write the run report JSON to this path")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build an extremal host and its certificate")
    csub = c.add_subparsers(dest="kind", required=True)
    for kind, fields in (("parity", ("k", "n")), ("space-barrier", ("k", "t", "n")),
                         ("pikhurko", ("t", "n")), ("multipartite", ("t", "n"))):
        q = csub.add_parser(kind)
        for f in fields:
            q.add_argument(f"--{f}", type=int, required=True)
        q.add_argument("--out-dir", default=".")
        if kind == "pikhurko":
            q.add_argument("--lambda", dest="lam", type=int, default=1)
            q.add_argument("--h0", help="3-graph file for H0 (default: the Fano plane)")
        if kind == "multipartite":
            q.add_argument("--balanced", action="store_true")
        q.set_defaults(func=cmd_construct)

    f = sub.add_parser("factor", help="search for an F-factor")
    f.add_argument("file")
    f.add_argument("--pattern", required=True, help="K:t:k, KP:k:m1,..,mk, B:lambda or F:<file>")
    f.add_argument("--mode", choices=("exact", "local-search", "pipeline"), default="exact")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--restarts", type=int, default=8)
    f.add_argument("--step1", choices=("alpha-good", "noop"), default="alpha-good")
    f.add_argument("--capacity", type=int, default=1)
    f.add_argument("--trace", help="write local-search moves as JSON lines")
    f.set_defaults(func=cmd_factor)

    t = sub.add_parser("thresholds", help="exact codegree threshold table")
    t.add_argument("--k-max", type=int, required=True)
    t.add_argument("--k-min", type=int, default=3)
    t.add_argument("--t-offset", type=int, default=1, help="t = k + offset")
    t.add_argument("--csv")
    t.add_argument("--json")
    t.add_argument("--format", choices=("report", "csv"), default="report",
                   help="stdout format")
    t.set_defaults(func=cmd_thresholds)

    d = sub.add_parser("design", help="partial designs")
    dsub = d.add_subparsers(dest="action", required=True)
    g = dsub.add_parser("gen")
    for name in ("n", "k", "t"):
        g.add_argument(f"--{name}", type=int, required=True)
    g.add_argument("--lambda", dest="lam", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output path prefix for .hg and .json")
    ch = dsub.add_parser("check")
    ch.add_argument("file")
    ch.add_argument("--t", type=int, required=True)
    ch.add_argument("--lambda", dest="lam", type=int, required=True)
    al = dsub.add_parser("alpha")
    al.add_argument("file")
    for q in (g, ch, al):
        q.set_defaults(func=cmd_design)

    cl = sub.add_parser("closeness", help="closeness graph diagnostics")
    cl.add_argument("file")
    cl.add_argument("--pattern", required=True)
    cl.add_argument("--i", type=int, default=1)
    cl.add_argument("--tau", type=int, default=1)
    cl.set_defaults(func=cmd_closeness)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARAMS
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_PARAMS
    started = time.perf_counter()
    try:
        payload, inputs, code = args.func(args)
    except _Failure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except HypergraphParseError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (PreconditionError, HypertileError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    if isinstance(payload, str):
        sys.stdout.write(payload)
        return code
    params = _params(args)
    params.pop("report", None)
    report = {
        "subcommand": " ".join(x for x in (args.command, getattr(args, "kind", None),
                                           getattr(args, "action", None)) if x),
        "params": params,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "inputs": {p: _digest(p) for p in inputs if p and Path(p).exists()},
        "result": payload,
        "exit_code": code,
        "wall_seconds": round(time.perf_counter() - started, 6),
    }
    text = _dumps(report)
    if args.report:
        try:
            Path(args.report).write_text(text)
        except OSError as exc:
            print(f"error: cannot write {args.report}: {exc}", file=sys.stderr)
            return EXIT_IO
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
