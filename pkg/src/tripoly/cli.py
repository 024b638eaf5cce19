"""Command-line surface.

One subcommand per experiment; every command reads a config file, honours
budget override flags, writes CSV/JSON artifacts, and exits 0 on success,
1 on validation failures, 2 on blown budgets, 3 on I/O trouble. Failures
put a machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from contextlib import contextmanager

from . import discrep, genseq, spectra, trisys
from .config import ExperimentConfig, load_config
from .errors import BudgetExceeded, MissingField, TripolyError
from .ffield import Field
from .mpoly import PolyRing

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_BUDGET = 2
EXIT_IO = 3


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    for attr, key in (("term_budget", "term_budget"), ("step_budget", "step_budget"),
                      ("enum_cap", "enum_cap"), ("work_cap", "work_cap")):
        override = getattr(args, key, None)
        if override is not None:
            setattr(cfg, attr, override)
    if getattr(args, "n", None) is not None:
        cfg.n = args.n
    if getattr(args, "limit", None) is not None:
        cfg.limit = args.limit
    return cfg


@contextmanager
def _out_stream(path, binary=False):
    if path is None or path == "-":
        yield sys.stdout.buffer if binary else sys.stdout
    else:
        mode = "wb" if binary else "w"
        with open(path, mode) as fh:
            yield fh


def _emit_json(obj, path) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2)
    with _out_stream(path) as fh:
        fh.write(text + "\n")


# ------------------------------------------------------------------ commands

def _cmd_validate(args) -> int:
    cfg = _load(args)
    sys_ = cfg.build()
    sys.stdout.write(trisys.canonical_spec_text(sys_))
    return EXIT_OK


def _degree_rows(sys_, k_max: int, term_budget: int) -> list[dict]:
    preds = [trisys.predicted_leading(sys_, i) for i in range(sys_.m)]
    rows = []
    for k in range(k_max + 1):
        row = {"k": k}
        d = trisys.degree_vector(sys_, k).d
        for i, di in enumerate(d):
            row[f"d{i}"] = di
        for i, (c, e) in enumerate(preds):
            row[f"lead_coeff_{i}"] = str(c)
            row[f"lead_power_{i}"] = e
        try:
            iterates = trisys.iterate_symbolic(sys_, k, term_budget=term_budget)
            row["symbolic_ok"] = int(
                all(f.total_degree() == d[i] for i, f in enumerate(iterates))
            )
        except BudgetExceeded:
            row["symbolic_ok"] = ""
        rows.append(row)
    return rows


def _cmd_degrees(args) -> int:
    cfg = _load(args)
    sys_ = cfg.build()
    rows = _degree_rows(sys_, args.k, cfg.term_budget)
    with _out_stream(args.out) as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return EXIT_OK


def _cmd_generate(args) -> int:
    cfg = _load(args)
    sys_ = cfg.build()
    w0 = cfg.seed_state(sys_)
    skip_last = not args.full
    if args.format == "binary":
        u = genseq.generate_array(sys_, w0, cfg.n, skip_last=skip_last)
        with _out_stream(args.out, binary=True) as fh:
            genseq.write_binary(fh, u, sys_.field.p)
    else:
        stream = genseq.generate(sys_, w0, cfg.n, skip_last=skip_last)
        width = sys_.m if skip_last else sys_.m + 1
        with _out_stream(args.out) as fh:
            genseq.write_csv(fh, stream, width)
    return EXIT_OK


def _cmd_period(args) -> int:
    cfg = _load(args)
    sys_ = cfg.build()
    w0 = cfg.seed_state(sys_)
    info = genseq.find_cycle(sys_, w0, max_steps=cfg.step_budget)
    _emit_json({"lambda": info.preperiod, "period": info.period}, args.out)
    return EXIT_OK


def _expsum_rows(sys_, cfg: ExperimentConfig, w0) -> list[dict]:
    limit = cfg.resolved_limit(sys_.field.p)
    report = spectra.exp_sum_max(
        sys_, w0, cfg.n, limit=limit, max_steps=cfg.step_budget,
        enum_cap=cfg.enum_cap,
    )
    envs = {
        nu: spectra.BoundEnvelope(sys_.m, nu).sum_envelope(sys_.field.p, cfg.n)
        for nu in cfg.nu
    }
    rows = []
    for a, value in report.rows:
        row = {f"a{i}": a[i] for i in range(sys_.m)}
        row["N"] = cfg.n
        row["re"] = repr(value.real)
        row["im"] = repr(value.imag)
        row["abs"] = repr(abs(value))
        for nu, env in envs.items():
            row[f"envelope_nu{nu}"] = repr(env)
        rows.append(row)
    return rows


def _cmd_expsum(args) -> int:
    cfg = _load(args)
    sys_ = cfg.build()
    rows = _expsum_rows(sys_, cfg, cfg.seed_state(sys_))
    if not rows:
        raise MissingField("coefficient box produced no usable vectors")
    with _out_stream(args.out) as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return EXIT_OK


def _weil_one(field, poly, cap) -> dict:
    rep = spectra.weil_bruteforce(field, poly, cap=cap)
    return {
        "poly": poly.to_string(),
        "degree": rep.degree,
        "nvars": rep.nvars,
        "abs": rep.magnitude,
        "bound": rep.bound,
        "ok": rep.bound_ok,
    }


def _cmd_weil(args) -> int:
    if args.poly is not None:
        if args.p is None or args.vars is None:
            raise MissingField("--poly needs --p and --vars")
        field = Field(args.p)
        poly = PolyRing(field, args.vars).from_string(args.poly)
        checks = [_weil_one(field, poly, args.enum_cap or 10**7)]
    else:
        if args.config is None:
            raise MissingField("weil needs a config or an explicit --poly")
        cfg = _load(args)
        sys_ = cfg.build()
        checks = [
            _weil_one(sys_.field, f, cfg.enum_cap)
            for f in sys_.f
            if f.total_degree() > 0
        ]
    _emit_json({"checks": checks, "all_ok": all(c["ok"] for c in checks)}, args.out)
    return EXIT_OK


def _cmd_discrepancy(args) -> int:
    cfg = _load(args)
    sys_ = cfg.build()
    if args.points_csv:
        with open(args.points_csv, "r", encoding="utf-8") as fh:
            u = genseq.read_csv(fh)
        report = discrep.measure_residues(
            u, sys_.field.p, cfg.resolved_limit(sys_.field.p), nu=cfg.nu[0],
            want_exact=args.exact, box_cap=cfg.enum_cap, work_cap=cfg.work_cap,
        )
    else:
        report = discrep.measure_discrepancy(
            sys_, cfg.seed_state(sys_), cfg.n, cfg.resolved_limit(sys_.field.p),
            nu=cfg.nu[0], want_exact=args.exact, box_cap=cfg.enum_cap,
            work_cap=cfg.work_cap, max_steps=cfg.step_budget,
        )
    _emit_json(report.to_dict(), args.out)
    return EXIT_OK


def _cmd_report(args) -> int:
    cfg = _load(args)
    sys_ = cfg.build()
    w0 = cfg.seed_state(sys_)
    t0 = time.perf_counter()
    info = genseq.find_cycle(sys_, w0, max_steps=cfg.step_budget)
    expsum_rows = _expsum_rows(sys_, cfg, w0)
    n_exact = min(cfg.n, 256)
    disc = discrep.measure_discrepancy(
        sys_, w0, cfg.n, cfg.resolved_limit(sys_.field.p), nu=cfg.nu[0],
        want_exact=(sys_.m <= 3 and cfg.n <= 2000), box_cap=cfg.enum_cap,
        work_cap=cfg.work_cap, max_steps=cfg.step_budget,
    )
    bundle = {
        "system": trisys.system_to_mapping(sys_),
        "degrees": _degree_rows(sys_, args.k, cfg.term_budget),
        "period": {"lambda": info.preperiod, "period": info.period},
        "expsum": {
            "rows": expsum_rows,
            "max_abs": max((float(r["abs"]) for r in expsum_rows), default=0.0),
        },
        "discrepancy": disc.to_dict(),
        "wall_time_ms": (time.perf_counter() - t0) * 1000.0,
        "exact_points_cap": n_exact,
    }
    _emit_json(bundle, args.out)
    return EXIT_OK


# -------------------------------------------------------------------- parser

def _add_budget_flags(sp) -> None:
    sp.add_argument("--term-budget", dest="term_budget", type=int, default=None)
    sp.add_argument("--step-budget", dest="step_budget", type=int, default=None)
    sp.add_argument("--enum-cap", dest="enum_cap", type=int, default=None)
    sp.add_argument("--work-cap", dest="work_cap", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tripoly",
        description="Triangular polynomial dynamical systems mod p: validation, "
                    "degree growth, vector streams, exponential sums, discrepancy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="validate a system and echo its canonical form")
    sp.add_argument("config")
    _add_budget_flags(sp)
    sp.set_defaults(func=_cmd_validate)

    sp = sub.add_parser("degrees", help="degree table with predictions and symbolic checks")
    sp.add_argument("config")
    sp.add_argument("--k", type=int, default=6, help="largest iteration index")
    sp.add_argument("--out", default=None)
    _add_budget_flags(sp)
    sp.set_defaults(func=_cmd_degrees)

    sp = sub.add_parser("generate", help="emit the vector stream as CSV or binary")
    sp.add_argument("config")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--format", choices=("csv", "binary"), default="csv")
    sp.add_argument("--full", action="store_true", help="keep the last state component")
    sp.add_argument("--out", default=None)
    _add_budget_flags(sp)
    sp.set_defaults(func=_cmd_generate)

    sp = sub.add_parser("period", help="exact preperiod and minimal period")
    sp.add_argument("config")
    sp.add_argument("--out", default=None)
    _add_budget_flags(sp)
    sp.set_defaults(func=_cmd_period)

    sp = sub.add_parser("expsum", help="orbit character sums over a coefficient box")
    sp.add_argument("config")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--limit", type=int, default=None, help="coefficient box half-width L")
    sp.add_argument("--out", default=None)
    _add_budget_flags(sp)
    sp.set_defaults(func=_cmd_expsum)

    sp = sub.add_parser("weil", help="brute-force square-root cancellation verdicts")
    sp.add_argument("config", nargs="?", default=None)
    sp.add_argument("--poly", default=None, help="polynomial string to check directly")
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--vars", type=int, default=None)
    sp.add_argument("--out", default=None)
    _add_budget_flags(sp)
    sp.set_defaults(func=_cmd_weil)

    sp = sub.add_parser("discrepancy", help="estimator, optional exact value, envelope")
    sp.add_argument("config")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--limit", type=int, default=None)
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--points-csv", dest="points_csv", default=None,
                    help="measure residues from a generate-format CSV instead")
    sp.add_argument("--out", default=None)
    _add_budget_flags(sp)
    sp.set_defaults(func=_cmd_discrepancy)

    sp = sub.add_parser("report", help="merged JSON bundle of every experiment")
    sp.add_argument("config")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--limit", type=int, default=None)
    sp.add_argument("--out", default=None)
    _add_budget_flags(sp)
    sp.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        _fail(exc)
        return EXIT_BUDGET
    except TripolyError as exc:
        _fail(exc)
        return EXIT_INVALID
    except OSError as exc:
        _fail(exc)
        return EXIT_IO


def _fail(exc) -> None:
    sys.stderr.write(
        json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
    )


if __name__ == "__main__":
    sys.exit(main())
