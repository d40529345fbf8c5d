from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Callable
from fractions import Fraction
from pathlib import Path
from typing import Any, TextIO

from .analytic import (
    DensityParams,
    LOParams,
    contradiction_x,
    layer_extended_density,
    lo_bound,
    log_discriminant,
    simulate_matrix,
    split_density,
)
from .config import RunConfig, resolve_config
from .errors import ModelInconsistencyError, PartialSearchError
from .groups import (
    NoSection,
    chebotarev_class,
    element_order,
    layer_centralizer_order,
    section_search,
)
from .lifter import generate_model, run, stabilized_u, verify_chain
from .localdims import (
    ad0_decomposition,
    duality_check,
    euler_characteristic,
    expected_euler_characteristic,
    h1_ord_dim,
    local_h_dims,
    ordinary_tangent_generators,
)
from .logs import configure_logger, log_error, log_info
from .models import GlobalModel, PlaceDescriptor
from .tame import (
    Cocycle,
    LocalRep,
    TameModel,
    adjust_to_special,
    bruteforce_cocycle_dims,
    classify,
    cocycle_space,
    count_lift_classes,
    is_special,
    r_class,
    s_class,
    special_rep,
)
from .trace import dump_record
from .validations import validate_global_model, validate_run_config
from .zmod import Mat2, multiplicative_order, primitive_root, teichmuller, valuation

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3

Record = dict[str, Any]
Handler = Callable[[RunConfig, logging.Logger], tuple[int, list[Record]]]

PLACE_KINDS = {
    "tame": "tame_l",
    "multiplicative": "multiplicative_v",
    "ordinary": "ordinary_p",
}


def _parse_stages_arg(value: str) -> tuple[int, ...]:
    try:
        return tuple(int(item) for item in value.split(",") if item.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated stage numbers; got {value!r}."
        ) from exc


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=None, help="Prime p (default 5).")
    common.add_argument(
        "--N", type=int, default=None, help="Precision: work mod p^N (default 8)."
    )
    common.add_argument("--variant", choices=("uncond", "grh"), default=None)
    common.add_argument("--seed", type=int, default=None, help="Seed (default 0).")
    common.add_argument("--kmax", type=int, default=None, help="Stages to run.")
    common.add_argument("--model", default=None, help="Path to a model JSON file.")
    common.add_argument(
        "--output",
        choices=("table", "records"),
        default=None,
        help="Human table or line-delimited JSON records (default table).",
    )
    common.add_argument("--log", help="Optional path to write execution logs.")
    common.add_argument(
        "--verbose",
        action="store_true",
        help="Enable verbose logging output.",
    )
    common.add_argument(
        "--two-prime-stages",
        type=_parse_stages_arg,
        default=None,
        help="Comma-separated grh stages that add two primes (generated models).",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="ramify",
        description="Workbench for infinitely ramified p-adic lifts.",
        epilog=(
            "Environment: RAMIFY_P, RAMIFY_N, RAMIFY_VARIANT, RAMIFY_SEED, "
            "RAMIFY_OUTPUT and RAMIFY_KMAX apply when the flag is absent; a "
            ".env file in the working directory fills unset variables."
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)

    cohomology = commands.add_parser(
        "cohomology", parents=[common], help="Local cohomology dimensions."
    )
    cohomology.add_argument("--place", choices=tuple(PLACE_KINDS), default="tame")
    cohomology.add_argument("--l", type=int, default=None)
    cohomology.add_argument("--v", type=int, default=11)
    cohomology.add_argument(
        "--star", choices=("nontrivial", "trivial"), default="nontrivial"
    )
    cohomology.add_argument("--psi-order", type=int, default=4)

    tame = commands.add_parser(
        "tame", parents=[common], help="Cocycles of the tame quotient."
    )
    tame.add_argument(
        "--action",
        choices=("basis", "classify", "adjust", "lifts"),
        default="basis",
    )
    tame.add_argument("--l", type=int, default=None)
    tame.add_argument("--level", type=int, default=2)
    tame.add_argument(
        "--vector",
        type=int,
        nargs=6,
        default=[1, 0, 0, 0, 1, 0],
        help="Cocycle (f_sigma x y z, f_tau x y z) for classify.",
    )
    tame.add_argument("--sigma", type=int, nargs=4, default=[17, 0, 0, 21])
    tame.add_argument("--tau", type=int, nargs=4, default=[1, 0, 0, 1])
    tame.add_argument(
        "--f", type=int, nargs=2, default=[1, 0], help="Class (a, b) in (r, s)."
    )
    tame.add_argument("--u", type=int, default=0)

    groups = commands.add_parser("groups", help="Finite matrix group checks.")
    group_commands = groups.add_subparsers(dest="groups_command", required=True)
    search = group_commands.add_parser(
        "section-search", parents=[common], help="Sections of GL2 reduction."
    )
    search.add_argument("--level", type=int, default=2)
    search.add_argument("--budget", type=int, default=None)
    search.add_argument(
        "--split",
        action="store_true",
        help="Search over the diagonal torus, where a section exists.",
    )
    orders = group_commands.add_parser(
        "orders", parents=[common], help="Orders of Chebotarev elements."
    )
    orders.add_argument("--k", type=int, default=0)
    centralizers = group_commands.add_parser(
        "centralizers", parents=[common], help="Layer centralizers."
    )
    centralizers.add_argument("--d", type=Fraction, default=Fraction(1, 100))

    lift = commands.add_parser(
        "lift", parents=[common], help="Run the inductive lift."
    )
    lift.add_argument("--verify", action="store_true")
    lift.add_argument("--trace", default=None, help="Write the lift trace here.")
    lift.add_argument(
        "--save-model", default=None, help="Write the model that was used here."
    )

    density = commands.add_parser(
        "density", parents=[common], help="Densities and the counting argument."
    )
    density.add_argument("--d", type=Fraction, default=Fraction(1, 100))
    density.add_argument("--x", type=float, default=None)
    density.add_argument("--class-ratio", type=float, default=None)
    density.add_argument("--q", type=float, default=2.0)
    density.add_argument("--e1", type=float, default=1.0)
    density.add_argument("--c1", type=float, default=1.0)
    density.add_argument("--c2", type=float, default=10.0)
    density.add_argument("--n-L", dest="n_L", type=int, default=100)
    density.add_argument("--grid-limit", type=int, default=80)

    simulate = commands.add_parser(
        "simulate", parents=[common], help="Monte Carlo of the null heuristic."
    )
    simulate.add_argument("--size", type=int, default=2000)
    simulate.add_argument("--d", type=Fraction, default=None)
    simulate.add_argument("--p-infinite", action="store_true")
    return parser


_COMMON_DESTS = {
    "command",
    "groups_command",
    "p",
    "N",
    "variant",
    "seed",
    "kmax",
    "model",
    "output",
    "log",
    "verbose",
    "two_prime_stages",
}


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    command = args.command
    if getattr(args, "groups_command", None):
        command = f"groups {args.groups_command}"
    flags = {
        "command": command,
        "p": args.p,
        "N": args.N,
        "variant": args.variant,
        "seed": args.seed,
        "kmax": args.kmax,
        "output": args.output,
        "model_path": Path(args.model) if args.model else None,
        "two_prime_stages": args.two_prime_stages,
        "log_path": Path(args.log) if args.log else None,
        "verbose": args.verbose or None,
        "params": {
            key: value for key, value in vars(args).items() if key not in _COMMON_DESTS
        },
    }
    return resolve_config(flags)


def _format_value(value: Any) -> str:
    if isinstance(value, list) and all(
        isinstance(item, (int, float, str, bool)) for item in value
    ):
        return "(" + ", ".join(str(item) for item in value) + ")"
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return str(value)


def render_table(records: list[Record]) -> str:
    """Human rendering built only from the records."""
    lines: list[str] = []
    for record in records:
        lines.append(f"[{record.get('record', '')}]")
        keys = sorted(key for key in record if key != "record")
        width = max((len(key) for key in keys), default=0)
        for key in keys:
            lines.append(f"  {key:<{width}}  {_format_value(record[key])}")
    return "\n".join(lines)


def emit(records: list[Record], output: str, stream: TextIO | None = None) -> None:
    stream = stream or sys.stdout
    if output == "records":
        for record in records:
            stream.write(dump_record(record) + "\n")
        return
    stream.write(render_table(records) + "\n")


def _default_l(p: int, level: int) -> int:
    return teichmuller(2, p, max(level, 2)).value


def _cohomology(config: RunConfig, logger: logging.Logger) -> tuple[int, list[Record]]:
    params = config.params
    place = params["place"]
    descriptor = PlaceDescriptor(
        kind=PLACE_KINDS[place],
        p=config.p,
        l=params["l"] if params["l"] is not None else _default_l(config.p, 2),
        v=params["v"],
        star_nontrivial=params["star"] == "nontrivial",
        psi_order=params["psi_order"],
    )
    dims = local_h_dims(descriptor)
    euler = euler_characteristic(descriptor)
    expected = expected_euler_characteristic(descriptor)
    duality = duality_check(descriptor)
    record: Record = {
        "record": "cohomology",
        "place": place,
        "p": config.p,
        "dims": list(dims.as_tuple()),
        "euler": euler,
        "expected_euler": expected,
        "duality": duality,
    }
    if descriptor.kind == "tame_l":
        record["l"] = descriptor.l
        record["frobenius_eigenvalues"] = ad0_decomposition(descriptor).eigenvalues()
    if descriptor.kind == "ordinary_p":
        record["h1_ord"] = h1_ord_dim(descriptor)
        record["tangent"] = list(ordinary_tangent_generators(descriptor))
    ok = euler == expected and duality
    return (EXIT_OK if ok else EXIT_FAILED), [record]


def _tame(config: RunConfig, logger: logging.Logger) -> tuple[int, list[Record]]:
    params = config.params
    p, level = config.p, params["level"]
    l_value = params["l"] if params["l"] is not None else _default_l(p, level)
    model = TameModel(p, l_value, max(level, 1))
    action = params["action"]

    if action == "basis":
        space = cocycle_space(model)
        brute = bruteforce_cocycle_dims(model)
        z1, b1, h1 = space.dims
        ok = (z1, b1) == (brute.z1, brute.b1)
        return (EXIT_OK if ok else EXIT_FAILED), [
            {
                "record": "tame_basis",
                "p": p,
                "l": model.l,
                "z1": z1,
                "b1": b1,
                "h1": h1,
                "brute_force": {
                    "group_order": brute.group_order,
                    "h0": brute.h0,
                    "z1": brute.z1,
                    "b1": brute.b1,
                    "h1": brute.h1,
                },
                "h1_basis": [cocycle.to_record() for cocycle in space.h1_basis],
            }
        ]

    if action == "classify":
        result = classify(Cocycle.from_vector(list(params["vector"]), p), model)
        return EXIT_OK, [
            {
                "record": "tame_classify",
                "p": p,
                "vector": list(params["vector"]),
                "kind": result.kind,
                "a": result.a,
                "b": result.b,
            }
        ]

    if action == "adjust":
        rep = LocalRep(
            model,
            level,
            Mat2.from_entries(tuple(params["sigma"]), p, level),
            Mat2.from_entries(tuple(params["tau"]), p, level),
        )
        a, b = params["f"]
        adjustment = adjust_to_special(
            rep, r_class(p).scale(a) + s_class(p).scale(b)
        )
        special = is_special(adjustment.rep)
        return (EXIT_OK if special else EXIT_FAILED), [
            {
                "record": "tame_adjust",
                "alpha": adjustment.alpha,
                "special": special,
                **adjustment.rep.to_record(),
            }
        ]

    rep = special_rep(model, level, params["u"])
    count = count_lift_classes(rep)
    return (EXIT_OK if count == p * p else EXIT_FAILED), [
        {
            "record": "tame_lifts",
            "p": p,
            "level": level,
            "u": rep.u.value,
            "classes": count,
            "expected": p * p,
        }
    ]


def _section_search(
    config: RunConfig, logger: logging.Logger
) -> tuple[int, list[Record]]:
    params = config.params
    generators = None
    if params["split"]:
        g = primitive_root(config.p)
        generators = (
            Mat2.diag(g, 1, config.p, 1),
            Mat2.diag(1, g, config.p, 1),
        )
    result = section_search(
        config.p,
        level=params["level"],
        generators=generators,
        budget=params["budget"],
        logger=logger,
    )
    record: Record = {
        "record": "section_search",
        "p": config.p,
        "level": params["level"],
        "split": params["split"],
        "result": type(result).__name__,
        "examined": result.examined,
        "total": result.total,
        "closures": result.closures,
        "elapsed": round(result.elapsed, 4),
    }
    found = not isinstance(result, NoSection)
    if found:
        record["witness"] = [list(matrix.entries) for matrix in result.witness]
    # GL2 must have no section; the split torus must have one.
    expected = bool(params["split"])
    record["passed"] = found == expected
    return (EXIT_OK if found == expected else EXIT_FAILED), [record]


def _orders(config: RunConfig, logger: logging.Logger) -> tuple[int, list[Record]]:
    p, k = config.p, config.params["k"]
    spec = chebotarev_class(config.variant, p, k)
    order = element_order(spec.element())
    top = k + 2
    target = Mat2.diag(teichmuller(2, p, top), 1, p, top)
    special_top = spec.A == target
    special_below = spec.A.reduce(top - 1) == target.reduce(top - 1)
    record: Record = {
        "record": "orders",
        "variant": config.variant,
        "p": p,
        "k": k,
        "A": list(spec.A.entries),
        "B": list(spec.B.entries),
        "order": order,
        "special_mod_top": special_top,
        "special_mod_below": special_below,
    }
    if config.variant == "uncond":
        record["expected_order"] = p * multiplicative_order(2, p)
        ok = order == record["expected_order"]
    else:
        ok = special_below and not special_top
    return (EXIT_OK if ok else EXIT_FAILED), [record]


def _centralizers(
    config: RunConfig, logger: logging.Logger
) -> tuple[int, list[Record]]:
    p = config.p
    d = config.params["d"]
    residual = Mat2.diag(2, 1, p, 1)
    order = layer_centralizer_order(residual)
    extended = layer_extended_density(d, residual)
    zero, _ = split_density(DensityParams(d=d, p=p))
    return (EXIT_OK if order == p and extended == zero else EXIT_FAILED), [
        {
            "record": "centralizers",
            "p": p,
            "residual": list(residual.entries),
            "centralizer_order": order,
            "d": str(d),
            "extended_density": str(extended),
        }
    ]


def _load_model(config: RunConfig) -> GlobalModel:
    if config.model_path is not None:
        return GlobalModel.model_validate_json(
            config.model_path.read_text(encoding="utf-8")
        )
    return generate_model(
        config.p,
        config.N,
        config.variant,
        config.kmax if config.kmax is not None else 3,
        config.seed,
        config.two_prime_stages,
    )


def _lift(config: RunConfig, logger: logging.Logger) -> tuple[int, list[Record]]:
    params = config.params
    document = _load_model(config)
    # The model file fixes p, N and the variant.
    validate_run_config(
        config.model_copy(update={"p": document.p, "N": document.N}), lift=True
    )
    if params["save_model"]:
        path = Path(params["save_model"])
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(document.model_dump_json(indent=2) + "\n", encoding="utf-8")
    validated = validate_global_model(document)
    state, trace = run(validated, config.kmax, logger=logger)
    if params["trace"]:
        path = Path(params["trace"])
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(trace.to_records()) + "\n", encoding="utf-8")
        log_info(logger, "Trace written to %s", path)

    header = trace.header
    records: list[Record] = [
        {
            "record": "lift",
            "p": header.p,
            "N": header.N,
            "variant": header.variant,
            "seed": header.seed,
            "k_max": header.k_max,
            "k_effective": header.k_effective,
            "primes": [prime.name for prime in header.primes],
        }
    ]
    for event in trace.of_kind("stage_output"):
        records.append(
            {
                "record": "stage_output",
                "stage": event.stage,
                "prime": event.prime,
                "u": event.u,
                "u_valuation": valuation(event.u or 0, header.p, header.N),
            }
        )
    records.append({"record": "stabilized_u", "digits": stabilized_u(trace)})
    status = EXIT_OK
    if params["verify"]:
        report = verify_chain(trace)
        records.append(
            {
                "record": "verify",
                "checked": report.checked,
                "ok": report.ok,
                "violations": list(report.violations),
            }
        )
        if not report.ok:
            log_error(logger, "%d chain violations", len(report.violations))
            status = EXIT_FAILED
    return status, records


def _density(config: RunConfig, logger: logging.Logger) -> tuple[int, list[Record]]:
    params = config.params
    density = DensityParams(d=params["d"], p=config.p)
    lo = LOParams(
        e1=params["e1"], c1=params["c1"], c2=params["c2"], n_L=params["n_L"]
    )
    zero, one = split_density(density)
    records: list[Record] = [
        {
            "record": "split_density",
            "d": str(density.d),
            "p": config.p,
            "zero_density": str(zero),
            "one_density": str(one),
        }
    ]
    if params["x"] is not None:
        log_d = log_discriminant(params["q"], lo.c1, lo.c2)
        ratio = params["class_ratio"]
        ratio = float(one) if ratio is None else ratio
        records.append(
            {
                "record": "lo_bound",
                "x": params["x"],
                "class_ratio": ratio,
                "q": params["q"],
                "log_D": log_d,
                "bound": lo_bound(params["x"], ratio, log_d, lo.n_L, lo.e1),
            }
        )
    report = contradiction_x(
        density, lo, grid_limit=params["grid_limit"], logger=logger
    )
    records.append({"record": "counting", **report.model_dump()})
    return (EXIT_OK if report.verdict == "reached" else EXIT_FAILED), records


def _simulate(config: RunConfig, logger: logging.Logger) -> tuple[int, list[Record]]:
    params = config.params
    stats = simulate_matrix(
        params["size"],
        config.p,
        seed=config.seed,
        d=params["d"],
        p_infinite=params["p_infinite"],
    )
    ok = abs(stats.one_density_z) <= 3 and abs(stats.symmetric_z) <= 3
    return (EXIT_OK if ok else EXIT_FAILED), [
        {"record": "simulation", **stats.model_dump()}
    ]


HANDLERS: dict[str, Handler] = {
    "cohomology": _cohomology,
    "tame": _tame,
    "groups section-search": _section_search,
    "groups orders": _orders,
    "groups centralizers": _centralizers,
    "lift": _lift,
    "density": _density,
    "simulate": _simulate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        validate_run_config(config)
    except ValueError as exc:
        print(f"ramify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logger = configure_logger(config.log_path, verbose=config.verbose)
    handler = HANDLERS[config.command]
    try:
        status, records = handler(config, logger)
    except PartialSearchError as exc:
        log_error(logger, "Partial search: %s", exc)
        emit(
            [
                {
                    "record": "partial",
                    "examined": exc.examined,
                    "total": exc.total,
                    "message": str(exc),
                }
            ],
            config.output,
        )
        return EXIT_PARTIAL
    except ModelInconsistencyError as exc:
        log_error(
            logger, "Lift failed at stage %s prime %s: %s", exc.stage, exc.prime, exc
        )
        return EXIT_FAILED
    except (ValueError, OSError) as exc:
        print(f"ramify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    emit(records, config.output)
    return status
