"""Command-line surface: run any subset of the verification suites for given
parameters and emit a human-readable or machine-readable (JSON) report.

Exit status: 0 when every selected suite passes, 1 on any suite failure,
2 on usage errors.  JSON goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

from . import __version__
from .analysis import (
    ReparamJet,
    invariance_check,
    spanning_check,
    verify_pole_table,
)
from .frames import (
    admissible_coefficient_exponents,
    canonical_shift_budget,
    coefficient_field,
    coordinate_field,
    enumerate_frame,
    jet_linear_field,
    shifted_coefficient_field,
    solve_jet_field_coefficients,
)
from .jetspace import (
    JetContext,
    defining_equations_iterated,
    defining_equations_partition_sum,
    jet_weight_partitions,
    partition_coefficient,
)
from .wronskian import (
    VARIANT_CLASSICAL,
    VARIANT_POWER,
    cramer_coefficients,
    cramer_system_residuals,
    power_wronskian,
    power_wronskian_closed_form,
)

SCHEMA_VERSION = "1"

SUITE_ORDER = (
    "equations",
    "wronskian",
    "frames",
    "pole-orders",
    "span",
    "invariance",
    "appendix",
)


@dataclass(frozen=True)
class RunConfig:
    n: int = 2
    d: int = 3
    chart: int = 1
    seed: int = 0
    trials: int = 5
    suites: tuple = SUITE_ORDER
    output: str = "text"

    def context(self) -> JetContext:
        return JetContext(self.n, self.d)


def _item(name, claimed, computed) -> dict:
    claimed_s, computed_s = str(claimed), str(computed)
    return {
        "name": name,
        "claimed": claimed_s,
        "computed": computed_s,
        "ok": claimed_s == computed_s,
    }


def _bool_item(name, ok: bool) -> dict:
    return {"name": name, "claimed": "True", "computed": str(bool(ok)), "ok": bool(ok)}


def suite_equations(config: RunConfig) -> list:
    ctx = config.context()
    items = []
    same = defining_equations_iterated(ctx) == defining_equations_partition_sum(ctx)
    items.append(_bool_item("iterated equals partition-sum route", same))
    eqs = defining_equations_iterated(ctx)
    from jetframes.algebra import COEFF, JET

    linear = all(
        sum(e for v, e in mono if v[0] == COEFF) <= 1 for eq in eqs for mono in eq.terms
    )
    items.append(_bool_item("equations linear in the coefficients", linear))

    def jet_weight(mono):
        return sum(e * v[2] for v, e in mono if v[0] == JET)

    isobaric = all(
        all(jet_weight(m) == kappa for m in eq.terms) for kappa, eq in enumerate(eqs)
    )
    items.append(_bool_item("order-k equation is isobaric of weight k", isobaric))
    expected_factors = {3: {((1, 1), (2, 1)): 3}, 4: {((1, 1), (3, 1)): 4, ((2, 2),): 3, ((1, 2), (2, 1)): 6}}
    for kappa, table in expected_factors.items():
        if kappa > ctx.n:
            continue
        got = {
            tuple(zip(orders, mults)): partition_coefficient(kappa, orders, mults)
            for orders, mults in jet_weight_partitions(kappa)
        }
        for shape, value in table.items():
            items.append(_item(f"chain-rule factor kappa={kappa} shape={shape}", value, got[shape]))
    return items


def suite_wronskian(config: RunConfig) -> list:
    ctx = config.context()
    items = []
    for i in range(1, ctx.nvars + 1):
        got = power_wronskian(i, ctx)
        items.append(
            _item(f"power wronskian chart {i}", power_wronskian_closed_form(i, ctx).to_text(), got.to_text())
        )
    for variant, label, chart in (
        (VARIANT_POWER, "v1", config.chart),
        (VARIANT_CLASSICAL, "v2", None),
    ):
        ok = True
        for alpha in admissible_coefficient_exponents(variant, ctx, chart):
            coeffs = cramer_coefficients(variant, alpha, ctx, chart)
            if not all(r.is_zero() for r in cramer_system_residuals(coeffs, ctx)):
                ok = False
                break
        items.append(_bool_item(f"cramer solution satisfies its system ({label})", ok))
    return items


def suite_frames(config: RunConfig) -> list:
    ctx = config.context()
    eqs = defining_equations_iterated(ctx)
    items = []

    def all_annihilated(fields):
        for f in fields:
            for eq in eqs:
                if not f.apply(eq).is_zero():
                    return f.label
        return None

    coeff_fields = [
        coefficient_field(VARIANT_POWER, a, ctx, config.chart)
        for a in admissible_coefficient_exponents(VARIANT_POWER, ctx, config.chart)
    ] + [
        coefficient_field(VARIANT_CLASSICAL, a, ctx)
        for a in admissible_coefficient_exponents(VARIANT_CLASSICAL, ctx)
    ]
    offender = all_annihilated(coeff_fields)
    items.append(_bool_item("coefficient fields annihilate every equation", offender is None))

    from jetframes.algebra import enumerate_exponents, mi_total

    shift_fields = [
        shifted_coefficient_field(a, canonical_shift_budget(a, ctx), ctx)
        for a in enumerate_exponents(ctx.nvars, ctx.d)
        if ctx.n + 1 <= mi_total(a) <= ctx.d and a[0] < ctx.d
    ]
    items.append(
        _bool_item("shifted fields annihilate every equation", all_annihilated(shift_fields) is None)
    )
    coord_fields = [coordinate_field(i, ctx) for i in range(1, ctx.nvars + 1)]
    items.append(
        _bool_item("coordinate fields annihilate every equation", all_annihilated(coord_fields) is None)
    )

    table = solve_jet_field_coefficients(ctx)
    items.append(_bool_item("jet-field blocks all invertible", all(d != 0 for d in table.block_dets.values())))
    jet_field = jet_linear_field(None, ctx)
    order0 = jet_field.apply(eqs[0])
    try:
        quotient = order0.exact_div(eqs[0])
        items.append(_bool_item("jet field order-0 tangency divisible by E0", quotient == table.top_factor))
    except ValueError:
        items.append(_bool_item("jet field order-0 tangency divisible by E0", False))
    higher = all(jet_field.apply(eqs[k]).is_zero() for k in range(1, ctx.n + 1))
    items.append(_bool_item("jet field annihilates higher equations identically", higher))
    return items


def suite_pole_orders(config: RunConfig) -> list:
    ctx = config.context()
    report = verify_pole_table(ctx)
    items = [
        _bool_item("all closed-form pole orders match", report.all_match),
        _item("max pole order, power variant (n^2+2n)", ctx.n * ctx.n + 2 * ctx.n, report.c_power),
        _item(
            "max pole order, classical variant ((n^2+5n)/2)",
            (ctx.n * ctx.n + 5 * ctx.n) // 2,
            report.c_classical,
        ),
    ]
    mismatches = [r for r in report.rows if not r.match]
    for r in mismatches[:5]:
        items.append(_item(f"pole order {r.name}", r.claimed, r.computed))
    return items, report


def suite_span(config: RunConfig) -> list:
    ctx = config.context()
    items = []
    for variant, label in ((VARIANT_POWER, "v1"), (VARIANT_CLASSICAL, "v2")):
        results = spanning_check(
            ctx, chart=config.chart, trials=config.trials, seed=config.seed, variant=variant
        )
        items.append(_bool_item(f"all frame fields tangent at sampled points ({label})", all(r.tangent_ok for r in results)))
        items.append(
            _item(
                f"tangent-space rank at each sampled point ({label})",
                [r.expected_rank for r in results],
                [r.rank for r in results],
            )
        )
        items.append(
            _item(
                f"defining-equation jacobian rank ({label})",
                [ctx.n + 1] * len(results),
                [r.jacobian_rank for r in results],
            )
        )
    return items


def suite_invariance(config: RunConfig) -> list:
    import random

    ctx = config.context()
    rng = random.Random(config.seed)
    frame = enumerate_frame(ctx, chart=config.chart)
    items = []
    for t in range(config.trials):
        rj = ReparamJet.random(ctx.n, rng)
        offender = None
        for f in frame:
            if not invariance_check(f, rj, ctx):
                offender = f.label
                break
        items.append(_bool_item(f"frame invariant under reparametrization draw {t}", offender is None))
    return items


def suite_appendix(config: RunConfig) -> list:
    from jetframes.wronskian import power_wronskian_identity_holds

    items = []
    for k in range(1, config.n + 1):
        items.append(
            _bool_item(f"determinant identity 1!..n!*(z')^(n(n+1)/2) at n={k}", power_wronskian_identity_holds(k))
        )
    return items


def _pole_orders_entry(config: RunConfig):
    items, table_report = suite_pole_orders(config)
    extra = {
        "c_variant1": table_report.c_power,
        "c_variant2": table_report.c_classical,
        "classical_wronskian_alternate_claim": table_report.alternate_w_claim,
        "classical_wronskian_alternate_matches": table_report.alternate_w_matches,
    }
    return items, extra


SUITES = {
    "equations": lambda cfg: (suite_equations(cfg), {}),
    "wronskian": lambda cfg: (suite_wronskian(cfg), {}),
    "frames": lambda cfg: (suite_frames(cfg), {}),
    "pole-orders": _pole_orders_entry,
    "span": lambda cfg: (suite_span(cfg), {}),
    "invariance": lambda cfg: (suite_invariance(cfg), {}),
    "appendix": lambda cfg: (suite_appendix(cfg), {}),
}


def run(config: RunConfig) -> dict:
    """Execute the selected suites in declaration order and assemble the
    report; deterministic for a fixed config (timing fields aside)."""
    report = {
        "schema_version": SCHEMA_VERSION,
        "artifact": "jetframes",
        "version": __version__,
        "parameters": {
            "n": config.n,
            "d": config.d,
            "chart": config.chart,
            "seed": config.seed,
            "trials": config.trials,
            "suites": list(config.suites),
            "output": config.output,
        },
        "suites": [],
        "ok": True,
    }
    for name in SUITE_ORDER:
        if name not in config.suites:
            continue
        start = time.perf_counter()
        items, extra = SUITES[name](config)
        ok = all(item["ok"] for item in items)
        suite_report = {
            "name": name,
            "ok": ok,
            "items": items,
            "elapsed_ms": round((time.perf_counter() - start) * 1000.0, 3),
        }
        suite_report.update(extra)
        report["suites"].append(suite_report)
        report["ok"] = report["ok"] and ok
    return report


def report_schema() -> dict:
    """Schema document for the JSON report; validate_report interprets it."""
    item_schema = {
        "type": "object",
        "required": ["name", "claimed", "computed", "ok"],
        "properties": {
            "name": {"type": "string"},
            "claimed": {"type": "string"},
            "computed": {"type": "string"},
            "ok": {"type": "boolean"},
        },
    }
    return {
        "version": SCHEMA_VERSION,
        "type": "object",
        "required": ["schema_version", "artifact", "version", "parameters", "suites", "ok"],
        "properties": {
            "schema_version": {"type": "string"},
            "artifact": {"type": "string"},
            "version": {"type": "string"},
            "parameters": {
                "type": "object",
                "required": ["n", "d", "chart", "seed", "trials", "suites", "output"],
                "properties": {
                    "n": {"type": "integer"},
                    "d": {"type": "integer"},
                    "chart": {"type": "integer"},
                    "seed": {"type": "integer"},
                    "trials": {"type": "integer"},
                    "suites": {"type": "array", "items": {"type": "string"}},
                    "output": {"type": "string"},
                },
            },
            "suites": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["name", "ok", "items", "elapsed_ms"],
                    "properties": {
                        "name": {"type": "string"},
                        "ok": {"type": "boolean"},
                        "items": {"type": "array", "items": item_schema},
                        "elapsed_ms": {"type": "number"},
                    },
                },
            },
            "ok": {"type": "boolean"},
        },
    }


class ReportValidationError(ValueError):
    pass


_TYPE_CHECKS = {
    "object": lambda v: isinstance(v, dict),
    "array": lambda v: isinstance(v, list),
    "string": lambda v: isinstance(v, str),
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
    "boolean": lambda v: isinstance(v, bool),
}


def validate_report(obj, schema: dict | None = None, path: str = "$") -> None:
    """Structural validation of a report against the schema document; raises
    ReportValidationError on the first violation."""
    if schema is None:
        schema = report_schema()
    expected = schema.get("type")
    if expected and not _TYPE_CHECKS[expected](obj):
        raise ReportValidationError(f"{path}: expected {expected}")
    if expected == "object":
        for key in schema.get("required", []):
            if key not in obj:
                raise ReportValidationError(f"{path}: missing required key {key!r}")
        for key, sub in schema.get("properties", {}).items():
            if key in obj:
                validate_report(obj[key], sub, f"{path}.{key}")
    elif expected == "array":
        sub = schema.get("items")
        if sub:
            for idx, element in enumerate(obj):
                validate_report(element, sub, f"{path}[{idx}]")


def render_text(report: dict) -> str:
    lines = [
        f"jetframes {report['version']} | n={report['parameters']['n']} "
        f"d={report['parameters']['d']} chart={report['parameters']['chart']} "
        f"seed={report['parameters']['seed']}"
    ]
    for suite in report["suites"]:
        mark = "PASS" if suite["ok"] else "FAIL"
        lines.append(f"[{mark}] {suite['name']} ({suite['elapsed_ms']} ms)")
        for item in suite["items"]:
            mark = "ok " if item["ok"] else "FAIL"
            lines.append(f"    {mark} {item['name']}: {item['computed']}")
    lines.append("result: " + ("PASS" if report["ok"] else "FAIL"))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jetframes",
        description="Exact symbolic verification of tangent frames on vertical jet spaces.",
    )
    parser.add_argument("--n", type=int, default=2, help="jet order / fiber dimension (>= 1)")
    parser.add_argument("--d", type=int, default=3, help="hypersurface degree (> n)")
    parser.add_argument("--chart", type=int, default=1, help="chart index in [1, n+1]")
    parser.add_argument("--seed", type=int, default=0, help="seed for all random draws")
    parser.add_argument("--trials", type=int, default=5, help="sampled points / draws per check")
    parser.add_argument(
        "--suites",
        default=",".join(SUITE_ORDER),
        help="comma-separated subset of: " + ", ".join(SUITE_ORDER),
    )
    parser.add_argument("--output", choices=("text", "json"), default="text")
    parser.add_argument("--schema", action="store_true", help="print the report JSON schema and exit")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        print(json.dumps(report_schema(), indent=2, sort_keys=True))
        return 0
    if args.n < 1:
        parser.error("--n must be >= 1")
    if args.d <= args.n:
        parser.error(f"--d must exceed --n (got n={args.n}, d={args.d})")
    if not 1 <= args.chart <= args.n + 1:
        parser.error(f"--chart must lie in [1, {args.n + 1}]")
    suites = tuple(s.strip() for s in args.suites.split(",") if s.strip())
    unknown = [s for s in suites if s not in SUITE_ORDER]
    if unknown:
        parser.error(f"unknown suites: {', '.join(unknown)}")
    config = RunConfig(
        n=args.n,
        d=args.d,
        chart=args.chart,
        seed=args.seed,
        trials=args.trials,
        suites=suites,
        output=args.output,
    )
    report = run(config)
    if args.output == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(render_text(report))
    if not report["ok"]:
        for suite in report["suites"]:
            if not suite["ok"]:
                first = next(item for item in suite["items"] if not item["ok"])
                print(
                    f"FAIL {suite['name']}: {first['name']} "
                    f"(claimed {first['claimed']}, computed {first['computed']})",
                    file=sys.stderr,
                )
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
