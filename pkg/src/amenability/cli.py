"""Command-line entry point.

Exit codes: 0 all checks passed, 1 a computed check failed, 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import certificates as cert
from . import operators as ops
from . import property_a as pa
from .errors import (
    AmenabilityError,
    AxiomViolation,
    DisconnectedSupport,
    EmptySet,
    EntryOutOfRange,
    FamilyMismatch,
    GroupMismatch,
    NegativeEntry,
    NotGenerated,
    NotUnitNorm,
    OrderLimitExceeded,
    ParseError,
    PreconditionViolated,
    TargetOutOfRange,
    UnsupportedExponent,
)
from .group_core import DEFAULT_CLOSURE_CAP, FamilySpec, word_metric
from .group_functions import GroupVector, delta, displacement, indicator, lp_norm, read_vector, write_vector
from .io import read_family, read_group, write_metric_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

INPUT_ERRORS = (
    ParseError, PreconditionViolated, AxiomViolation, NotGenerated, OrderLimitExceeded, EmptySet,
    GroupMismatch, FamilyMismatch, EntryOutOfRange, TargetOutOfRange, NotUnitNorm, NegativeEntry,
    UnsupportedExponent, DisconnectedSupport,
)

COMMANDS = ("build", "folner", "hr-optimal", "pipeline", "operator-check", "property-a", "counterexample")


class UsageError(AmenabilityError):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    epsilon: float | None = None
    radius: int | None = None
    support_d: int | None = None
    cap_n: int = DEFAULT_CLOSURE_CAP
    l1_m: float | None = None
    quantize_q: int | None = None
    budget: int = 10_000
    seed: int = 0
    count: int = 10
    method: str = "both"
    workers: int = 1
    include_delta: bool = False
    vectors: list[str] = field(default_factory=list)
    vector_out: str | None = None
    metric_out: str | None = None
    out: str | None = None
    format: str = "report"

    def validate(self) -> None:
        def bad(msg):
            raise UsageError(msg, module="cli", operation=f"cmd_{self.command.replace('-', '_')}")

        if self.command not in COMMANDS:
            bad(f"unknown command {self.command!r}")
        if self.epsilon is not None and not (self.epsilon >= 0 and math.isfinite(self.epsilon)):
            bad(f"--epsilon must be a finite nonnegative number, got {self.epsilon}")
        if self.command in ("folner",):
            if self.radius is None or self.radius < 1:
                bad("--radius must be a positive integer")
            if self.epsilon is None or self.epsilon <= 0:
                bad("--epsilon must be positive")
        if self.radius is not None and self.radius < 0:
            bad("--radius must be nonnegative")
        if self.support_d is not None and self.support_d < 0:
            bad("--support-d must be nonnegative")
        if self.l1_m is not None and self.l1_m < 1:
            bad("--l1-m must be at least 1 (a unit l2 vector has l1 norm >= 1)")
        if self.quantize_q is not None and self.quantize_q < 1:
            bad("--quantize-q must be a positive integer")
        if self.budget < 1:
            bad("--budget must be positive")
        if self.count < 1:
            bad("--count must be positive")
        if not 0 <= self.seed < 2**64:
            bad("--seed must be a 64-bit unsigned integer")
        if self.cap_n < 1:
            bad("--cap-n must be positive")
        if self.workers < 1:
            bad("--workers must be positive")
        if self.method not in ("both", "dense_eig", "power_iteration"):
            bad(f"--method must be dense_eig, power_iteration or both, got {self.method!r}")


# output helpers


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _emit(cfg: RunConfig, report: dict, columns, rows) -> None:
    if cfg.format == "csv":
        text = _csv_text(columns, rows)
    else:
        text = json.dumps(_jsonable(report), indent=2) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _hr_row(c: cert.HRCertificate) -> dict:
    return {
        "epsilon": c.epsilon,
        "support_card": c.support_card,
        "l1_norm": c.l1_norm,
        "D_bound": c.D_bound,
    }


# commands


def cmd_build(cfg: RunConfig) -> int:
    G, S = read_group(cfg.inputs[0], cap=cfg.cap_n)
    report = {
        "command": "build",
        "group_file": cfg.inputs[0],
        "order": G.order,
        "identity": G.identity,
        "generators": list(S.generators),
        "symmetrized": list(S.symmetrized),
        "diameter": S.diameter,
        "axioms_verified": True,
    }
    if cfg.metric_out:
        write_metric_csv(cfg.metric_out, word_metric(G, S))
        report["metric_out"] = cfg.metric_out
    cols = ["order", "identity", "generators", "diameter"]
    _emit(cfg, report, cols, [[G.order, G.identity, " ".join(map(str, S.generators)), S.diameter]])
    return EXIT_OK


def cmd_folner(cfg: RunConfig) -> int:
    G, S = read_group(cfg.inputs[0], cap=cfg.cap_n)
    fc = cert.search_folner_set(G, S, cfg.radius, cfg.epsilon, budget=cfg.budget, max_radius=cfg.support_d)
    hr = cert.folner_to_hr(S, fc.F)
    report = {"command": "folner", "group_file": cfg.inputs[0], "epsilon": cfg.epsilon,
              "folner": fc.to_dict(), "hr": _hr_row(hr), "pass": True}
    cols = ["group_order", "R", "size", "ratio", "D_bound", "hr_epsilon"]
    _emit(cfg, report, cols, [[G.order, fc.R, len(fc.F), fc.ratio, fc.D_bound, hr.epsilon]])
    return EXIT_OK


def cmd_hr_optimal(cfg: RunConfig) -> int:
    G, S = read_group(cfg.inputs[0], cap=cfg.cap_n)
    D = 2 if cfg.support_d is None else cfg.support_d
    f, eps = cert.optimal_hr_vector(G, S, S.ball(D))
    c = cert.hr_certificate(f, S)
    row = _hr_row(c)
    row["energy"] = cert.displacement_energy(f, S)
    ok = cfg.epsilon is None or eps <= cfg.epsilon
    report = {"command": "hr-optimal", "group_file": cfg.inputs[0], "support_d": D, **row, "pass": ok}
    if cfg.vector_out:
        write_vector(cfg.vector_out, f, group_file=cfg.inputs[0])
        report["vector_out"] = cfg.vector_out
    _emit(cfg, report, ["support_d", *row], [[D, *row.values()]])
    return EXIT_OK if ok else EXIT_FAIL


PIPELINE_COLUMNS = ("member_index", "stage", "epsilon", "epsilon_bound", "statistic", "value", "bound", "dominated")


def cmd_pipeline(cfg: RunConfig) -> int:
    family, paths = read_family(cfg.inputs[0], cap=cfg.cap_n)
    if cfg.vectors and len(cfg.vectors) != len(family):
        raise UsageError(f"{len(cfg.vectors)} vector files for {len(family)} members",
                         module="cli", operation="cmd_pipeline")
    D0 = 3 if cfg.support_d is None else cfg.support_d
    starts = []
    for k, (G, S) in enumerate(family):
        if cfg.vectors:
            f = read_vector(cfg.vectors[k], G)
        else:
            f = indicator(G, S.ball(D0))
        starts.append(f)
    eps_in = max(displacement(f, S) for f, (_, S) in zip(starts, family))
    eps = eps_in if cfg.epsilon is None else cfg.epsilon
    M_in = max(lp_norm(f, 1) for f in starts)
    M = M_in if cfg.l1_m is None else cfg.l1_m
    rows = []
    if eps == 0:
        for k, f in enumerate(starts):
            rows.append([k, "input", 0.0, 0.0, "l1_norm", lp_norm(f, 1), M, True])
        report = {"command": "pipeline", "family_file": cfg.inputs[0], "degenerate": True,
                  "epsilon": 0.0, "M": M, "rows": [dict(zip(PIPELINE_COLUMNS, r)) for r in rows], "pass": True}
        _emit(cfg, report, PIPELINE_COLUMNS, rows)
        return EXIT_OK

    chain = cert.quantitative_chain(eps, M)
    stage2 = [cert.compress_support(f, S, eps, M) for f, (_, S) in zip(starts, family)]
    N = max(c.support_card for c in stage2)
    eps2 = max(c.epsilon for c in stage2)
    stage3 = [cert.pack_components(c.f, S, eps2, N) for c, (_, S) in zip(stage2, family)]
    D = max(c.D_bound for c in stage3)
    eps3 = max(c.epsilon for c in stage3)

    tol = 1e-9
    for k, f in enumerate(starts):
        S = family[k][1]
        e1 = displacement(f, S)
        rows.append([k, "1_l1_bounded", e1, eps, "l1_norm", lp_norm(f, 1), M,
                     e1 <= eps + tol and lp_norm(f, 1) <= M + 1e-12])
        c2 = stage2[k]
        rows.append([k, "2_support_bounded", c2.epsilon, chain.stage2_epsilon, "support_card",
                     c2.support_card, chain.stage2_N,
                     c2.epsilon <= chain.stage2_epsilon + tol and c2.support_card <= chain.stage2_N])
        c3 = stage3[k]
        rows.append([k, "3_uniformly_amenable", c3.epsilon, chain.stage3_epsilon, "D_bound",
                     c3.D_bound, chain.stage3_D,
                     c3.epsilon <= chain.stage3_epsilon + tol and c3.D_bound <= chain.stage3_D])
    family_check = cert.check_uniform_amenability_certificate(family, stage3, eps3, D)
    ok = all(r[-1] for r in rows) and family_check["pass"]
    report = {
        "command": "pipeline",
        "family_file": cfg.inputs[0],
        "members": [str(p) for p in paths],
        "chain": chain.to_dict(),
        "achieved": {"stage2_epsilon": eps2, "stage2_N": N, "stage3_epsilon": eps3, "stage3_D": D},
        "rows": [dict(zip(PIPELINE_COLUMNS, r)) for r in rows],
        "uniform_check": family_check,
        "pass": ok,
    }
    _emit(cfg, report, PIPELINE_COLUMNS, rows)
    return EXIT_OK if ok else EXIT_FAIL


def random_test_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    """Normalized absolute values of standard normal draws (entries land in [0, 1])."""
    x = np.abs(rng.standard_normal(n))
    return x / np.linalg.norm(x)


OPERATOR_COLUMNS = ("item", "group_order", "l1_norm_squared", "norm_dense_eig", "norm_power_iteration", "max_rel_gap", "pass")


def cmd_operator_check(cfg: RunConfig) -> int:
    G, S = read_group(cfg.inputs[0], cap=cfg.cap_n)
    methods = ("dense_eig", "power_iteration") if cfg.method == "both" else (cfg.method,)
    if "dense_eig" in methods and G.order > ops.DENSE_EIG_MAX:
        raise UsageError(
            f"group order {G.order} exceeds the dense cap {ops.DENSE_EIG_MAX}; rerun with --method power_iteration",
            module="cli", operation="cmd_operator_check",
        )
    rng = np.random.default_rng(cfg.seed)
    vecs = [delta(G)] if cfg.include_delta else []
    vecs += [GroupVector(G, random_test_vector(rng, G.order), nonneg=True) for _ in range(cfg.count)]
    rows = []
    for k, f in enumerate(vecs):
        r = ops.verify_norm_identity(f, methods)
        rows.append([k, G.order, r["l1_norm_squared"],
                     r["dense_eig"]["norm"] if "dense_eig" in r else float("nan"),
                     r["power_iteration"]["norm"] if "power_iteration" in r else float("nan"),
                     r["max_rel_gap"], r["pass"]])
    ok = all(r[-1] for r in rows)
    report = {"command": "operator-check", "group_file": cfg.inputs[0], "seed": cfg.seed,
              "generator": "numpy PCG64 via default_rng(seed)",
              "rows": [dict(zip(OPERATOR_COLUMNS, r)) for r in rows],
              "max_rel_gap": max(r[5] for r in rows), "pass": ok}
    _emit(cfg, report, OPERATOR_COLUMNS, rows)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_property_a(cfg: RunConfig) -> int:
    G, S = read_group(cfg.inputs[0], cap=cfg.cap_n)
    R = 1 if cfg.radius is None else cfg.radius
    if cfg.vectors:
        f = read_vector(cfg.vectors[0], G)
    else:
        D = 2 if cfg.support_d is None else cfg.support_d
        f, _ = cert.optimal_hr_vector(G, S, S.ball(D))
    c = cert.hr_certificate(f, S)
    xi = pa.hr_to_higson_roe(f, S, c.D_bound)
    var = pa.variation(xi, R)
    eps = var if cfg.epsilon is None else cfg.epsilon
    check = pa.check_property_a_certificate(xi, eps, R, c.D_bound)
    report = {"command": "property-a", "group_file": cfg.inputs[0], "hr": _hr_row(c),
              "symmetrized_displacement": displacement(f, S, symmetric=True),
              "higson_roe": check}
    ok = check["pass"]
    row = [G.order, c.epsilon, c.D_bound, R, var, ok]
    cols = ["group_order", "hr_epsilon", "D_bound", "R", "variation", "pass"]
    if cfg.quantize_q:
        l1 = pa.l2_to_l1_map(xi)
        sf = pa.l1_to_setfamily(l1, cfg.quantize_q)
        sf_check = pa.check_setfamily_certificate(sf, math.inf, R, c.D_bound)
        sf_check["l1_limit_ratio"] = pa.l1_variation_ratio(l1, R)
        sf_check["Q"] = cfg.quantize_q
        report["set_family"] = sf_check
        ok = ok and sf_check["pass"]
        row += [cfg.quantize_q, sf_check["worst_ratio"]]
        cols += ["Q", "set_family_ratio"]
    report["pass"] = ok
    _emit(cfg, report, cols, [row])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_counterexample(cfg: RunConfig) -> int:
    family, paths = read_family(cfg.inputs[0], cap=cfg.cap_n)
    D = 3 if cfg.support_d is None else cfg.support_d
    res = pa.counterexample_demo(family, D, workers=cfg.workers)
    rows = res["rows"]
    ok = res["trivial_maps_exact"] and res["spectral_bound_holds"]
    report = {
        "command": "counterexample",
        "family_file": cfg.inputs[0],
        "members": [str(p) for p in paths],
        "D_probe": D,
        "rows": [{c: getattr(r, c) for c in (*r.CSV_COLUMNS, "ball_size", "generator_displacement",
                                                "spectral_gap", "bound_holds")} for r in rows],
        "trivial_maps_exact": res["trivial_maps_exact"],
        "spectral_bound_holds": res["spectral_bound_holds"],
        "min_epsilon_star": res["min_epsilon_star"],
        "min_ratio_to_smallest": res["min_ratio_to_smallest"],
        "pass": ok,
    }
    _emit(cfg, report, pa.CounterexampleRow.CSV_COLUMNS, [r.csv_row() for r in rows])
    return EXIT_OK if ok else EXIT_FAIL


HANDLERS = {
    "build": cmd_build,
    "folner": cmd_folner,
    "hr-optimal": cmd_hr_optimal,
    "pipeline": cmd_pipeline,
    "operator-check": cmd_operator_check,
    "property-a": cmd_property_a,
    "counterexample": cmd_counterexample,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", type=float)
    common.add_argument("--radius", type=int)
    common.add_argument("--support-d", type=int, dest="support_d")
    common.add_argument("--cap-n", type=int, dest="cap_n", default=DEFAULT_CLOSURE_CAP,
                        help="closure cap for permutation groups")
    common.add_argument("--l1-m", type=float, dest="l1_m")
    common.add_argument("--quantize-q", type=int, dest="quantize_q")
    common.add_argument("--budget", type=int, default=10_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("report", "csv"), default="report")
    common.add_argument("--out", metavar="PATH")

    p = argparse.ArgumentParser(prog="amenability", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build", parents=[common], help="ingest a group file and verify it")
    s.add_argument("group")
    s.add_argument("--metric-out", dest="metric_out", metavar="PATH")

    s = sub.add_parser("folner", parents=[common], help="search for a Følner set")
    s.add_argument("group")

    s = sub.add_parser("hr-optimal", parents=[common], help="best HR vector on B(e, D)")
    s.add_argument("group")
    s.add_argument("--vector-out", dest="vector_out", metavar="PATH")

    s = sub.add_parser("pipeline", parents=[common], help="compress and pack HR vectors over a family")
    s.add_argument("family")
    s.add_argument("--vectors", nargs="+", default=[], metavar="CSV")

    s = sub.add_parser("operator-check", parents=[common], help="check ‖T_f‖ = ‖f‖₁² on random f")
    s.add_argument("group")
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--method", default="both")
    s.add_argument("--include-delta", action="store_true", dest="include_delta")

    s = sub.add_parser("property-a", parents=[common], help="Higson-Roe map from an HR vector")
    s.add_argument("group")
    s.add_argument("--vector", dest="vectors", action="append", default=[], metavar="CSV")

    s = sub.add_parser("counterexample", parents=[common], help="trivial Higson-Roe data vs localized HR vectors")
    s.add_argument("family")
    s.add_argument("--workers", type=int, default=1)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = vars(ns).copy()
    cmd = d.pop("command")
    inputs = [d.pop(k) for k in ("group", "family") if k in d]
    fields = RunConfig.__dataclass_fields__
    return RunConfig(command=cmd, inputs=inputs, **{k: v for k, v in d.items() if k in fields})


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = config_from_args(ns)
    try:
        cfg.validate()
        return HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AmenabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
