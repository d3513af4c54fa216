"""Command-line interface: classify points, run batteries, verify the
determinant and measure identities, transform shifts, complete moments,
and sweep parameter grids.

All numeric inputs are exact rational strings (num/den); decimal input is
rejected rather than rounded, since a rounded parameter would corrupt
exact ray membership.  Output is deterministic: identical invocations
produce byte-identical bytes (keys sorted, no timestamps, fixed float
formatting).  Exit codes: 0 the command ran, 1 validation error, 2 an
internal invariant was breached (for example the two determinant routes
disagreeing, which should never happen).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Optional

from . import __version__
from .berger import ConstructionError, berger_coefficients, berger_measure, verify_representation
from .completion import (
    CompletionError,
    TwoAtomSpec,
    family_completion,
    family_sector_ranges,
    same_p_completion,
    target_moments,
)
from .hankel import (
    det_closed_form,
    det_exact,
    det_table,
    det_table_json,
    hankel,
    hyponormality_order,
    sector_iv_predicted_order,
)
from .model import (
    ParameterError,
    ShiftParams,
    classify,
    make_params,
    moments,
    weight_sq,
    weights,
)
from .rationals import RationalFormatError, format_rational, parse_rational
from .sequences import (
    HOLDS,
    VIOLATED,
    PropertyVerdict,
    Witness,
    battery,
    function_alternation_probe,
    n_contractive,
)
from .transforms import (
    AffineMap,
    aluthge,
    quotient_shift,
    reciprocal_weights,
    schur_power,
    subshift_weights,
)
from mpmath import mp

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INVARIANT = 2

KNOWN_SHIFT_NOTES = {
    ("2", "1/4", "1/2"): (
        "this shift is sometimes described in the literature as having a "
        "three-atomic Berger measure; the explicit construction here yields "
        "two atoms, (1, 2/3) and (1/2, 1/3), and reproduces every tested "
        "moment exactly"
    ),
}


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with the validation code.

    The negative-number matcher is widened so values like -1/2 are read
    as arguments rather than mistaken for option strings.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        import re
        # argparse assigns this per instance, so override after init.
        self._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")

    def error(self, message):
        self.exit(EXIT_VALIDATION, json.dumps({"error": message}, sort_keys=True) + "\n")


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except RationalFormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _emit_error(message: str) -> int:
    sys.stdout.write(json.dumps({"error": message}, sort_keys=True) + "\n")
    return EXIT_VALIDATION


def _report(command: str, params: Optional[ShiftParams] = None, **fields) -> dict:
    payload = {"command": command, "version": __version__}
    if params is not None:
        payload["params"] = params.to_json()
    payload.update(fields)
    return payload


def _verdict_str(verdict: PropertyVerdict) -> str:
    if verdict.status == VIOLATED and verdict.witness is not None:
        return f"violated(n={verdict.witness.order},k={verdict.witness.index})"
    return verdict.status


def theorem_predictions(params: ShiftParams, label) -> dict:
    """Property claims implied by the sector geometry of (N, D).

    Only established claims appear; cones with no known claims yield an
    empty mapping.  "hyponormality" is the exact finite order when the
    point sits strictly between two rays, else "all" (subnormal).
    """
    if label.on_diagonal:
        return {
            "unweighted": True,
            "mid": True,
            "subnormal": True,
            "completely_hyperexpansive": True,
            "hyponormality": "all",
        }
    out: dict = {}
    if "I" in label.sectors:
        out.update(
            mid=True, subnormal=True, hyponormality="all",
            weights_sq_interpolation="bernstein",
        )
    elif "II" in label.sectors:
        out.update(
            mid=True, subnormal=True, hyponormality="all",
            weights_sq_interpolation="log-bernstein",
        )
    if "III" in label.sectors:
        out.setdefault("subnormal", True)
        out.setdefault("hyponormality", "all")
        out["berger_support"] = "countable"
    if "IV" in label.sectors and params.num_offset > 0:
        if label.special_ray_k is not None:
            out.update(
                subnormal=True, hyponormality="all", mid=False,
                berger_support=f"{label.special_ray_k + 1}-atomic",
            )
        elif params.den_offset > params.num_offset:
            order = sector_iv_predicted_order(params)
            out.update(subnormal=False, mid=False, hyponormality=order)
    if label.viiia:
        out["completely_hyperexpansive"] = True
    return out


def report_notes(params: ShiftParams, label) -> list[str]:
    notes = []
    if label.special_ray_k is not None and label.special_ray_k >= 1:
        k = label.special_ray_k
        notes.append(
            f"point lies on the ray D = p^{k} N: the Berger measure has exactly {k + 1} atoms"
        )
    key = (
        format_rational(params.p),
        format_rational(params.num_offset),
        format_rational(params.den_offset),
    )
    if key in KNOWN_SHIFT_NOTES:
        notes.append(KNOWN_SHIFT_NOTES[key])
    return notes


def _run_verification(params: ShiftParams, predictions: dict,
                      depth_n: int, depth_k: int,
                      k_probe: int, j_probe: int, berger_depth: int) -> dict:
    checks: dict = {}
    weight_fn = lambda n: weight_sq(params, n)  # noqa: E731
    moment_seq = moments(params)
    if "mid" in predictions:
        checks["weights_log_alternating"] = battery(
            weight_fn, "log-alternating", depth_n, depth_k
        ).to_json()
    if predictions.get("weights_sq_interpolation") == "bernstein":
        checks["weights_alternating"] = battery(
            weight_fn, "alternating", depth_n, depth_k
        ).to_json()
    if predictions.get("completely_hyperexpansive"):
        checks["moments_alternating"] = battery(
            moment_seq, "alternating", depth_n, depth_k
        ).to_json()
    if "hyponormality" in predictions:
        checks["hyponormality_order"] = hyponormality_order(
            params, k_probe, j_probe
        ).to_json()
    if predictions.get("subnormal"):
        try:
            measure = berger_measure(params, berger_depth)
            representation = verify_representation(params, measure, n_max=12)
            checks["berger"] = {
                "status": "ok",
                "atoms": len(measure.atoms),
                "truncated": measure.truncated,
                "representation": representation.to_json(),
            }
        except ConstructionError as exc:
            checks["berger"] = {"status": "error", "error": str(exc)}
    return checks


def _concordant(predictions: dict, checks: dict) -> bool:
    """No battery may certify a violation where a property is claimed."""
    ok = True
    if predictions.get("mid") is True and "weights_log_alternating" in checks:
        ok = ok and checks["weights_log_alternating"]["status"] != VIOLATED
    if predictions.get("weights_sq_interpolation") == "bernstein" \
            and "weights_alternating" in checks:
        ok = ok and checks["weights_alternating"]["status"] != VIOLATED
    if predictions.get("completely_hyperexpansive") and "moments_alternating" in checks:
        ok = ok and checks["moments_alternating"]["status"] != VIOLATED
    claimed = predictions.get("hyponormality")
    verdict = checks.get("hyponormality_order")
    if verdict is not None and claimed is not None:
        if claimed == "all":
            ok = ok and verdict["at_least"]
        else:
            if verdict["at_least"]:
                ok = ok and verdict["order"] <= claimed
            else:
                ok = ok and verdict["order"] == claimed
    if predictions.get("subnormal") and "berger" in checks:
        berger_check = checks["berger"]
        ok = ok and berger_check["status"] == "ok"
        if berger_check["status"] == "ok":
            ok = ok and berger_check["representation"]["status"] == HOLDS
    return ok


# ---------------------------------------------------------------- commands


def cmd_classify(args) -> int:
    params = make_params(args.p, args.N, args.D)
    label = classify(params, ray_depth=args.ray_depth)
    predictions = theorem_predictions(params, label)
    report = _report(
        "classify", params,
        sector=label.to_json(),
        predictions=predictions,
        notes=report_notes(params, label),
    )
    exit_code = EXIT_OK
    if args.verify:
        checks = _run_verification(
            params, predictions, args.depth_n, args.depth_k,
            args.k_max, args.j_max, args.berger_depth,
        )
        consistent = _concordant(predictions, checks)
        report["verification"] = checks
        report["consistent"] = consistent
        if not consistent:
            exit_code = EXIT_INVARIANT
    _emit(report)
    return exit_code


def cmd_verify_det(args) -> int:
    params = make_params(args.p, args.N, args.D)
    g = moments(params)
    mismatches = []
    rows = []
    for size in range(2, args.k_max + 1):
        for j in range(args.j_max + 1):
            closed = det_closed_form(params, size, j)
            brute = det_exact(hankel(g, size, j))
            rows.append((size, j, closed))
            if closed != brute:
                mismatches.append({
                    "k": size, "j": j,
                    "closed_form": format_rational(closed),
                    "fraction_free": format_rational(brute),
                })
    if args.format == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["k", "j", "det", "sign"])
        for entry in det_table_json(rows):
            writer.writerow([entry["k"], entry["j"], entry["det"], entry["sign"]])
        return EXIT_INVARIANT if mismatches else EXIT_OK
    report = _report(
        "verify-det", params,
        cells=len(rows),
        all_equal=not mismatches,
        mismatches=mismatches,
    )
    if args.table:
        report["table"] = det_table_json(rows)
    _emit(report)
    return EXIT_INVARIANT if mismatches else EXIT_OK


def cmd_verify_berger(args) -> int:
    params = make_params(args.p, args.N, args.D)
    label = classify(params)
    try:
        coefficients = berger_coefficients(params, args.depth)
        measure = berger_measure(params, args.depth)
    except ConstructionError as exc:
        _emit(_report(
            "verify-berger", params,
            berger={"status": "error", "error": str(exc), "index": exc.index},
            notes=report_notes(params, label),
        ))
        return EXIT_OK
    representation = verify_representation(params, measure, args.n_max)
    report = _report(
        "verify-berger", params,
        coefficients=coefficients.to_json(),
        measure=measure.to_json(),
        representation=representation.to_json(),
        notes=report_notes(params, label),
    )
    _emit(report)
    return EXIT_OK if representation.holds else EXIT_INVARIANT


def _joint_contractive(params: ShiftParams, n_max: int, k_max: int) -> PropertyVerdict:
    g = moments(params)
    for n in range(1, n_max + 1):
        verdict = n_contractive(g, n, k_max)
        if verdict.status == VIOLATED:
            return PropertyVerdict(VIOLATED, verdict.witness, (n_max, k_max))
    return PropertyVerdict(HOLDS, None, (n_max, k_max))


def cmd_battery(args) -> int:
    params = make_params(args.p, args.N, args.D)
    check = args.check
    if check in ("probe-plain", "probe-log"):
        spacings = [parse_rational(s) for s in args.spacings.split(",")] \
            if args.spacings else [Fraction(1)]
        verdict = function_alternation_probe(
            params, check.removeprefix("probe-"), spacings,
            args.depth_n, args.depth_k,
        )
    elif check == "contractive":
        verdict = _joint_contractive(params, args.depth_n, args.depth_k)
    else:
        target = moments(params) if args.target == "moments" \
            else (lambda n: weight_sq(params, n))
        verdict = battery(target, check, args.depth_n, args.depth_k)
    _emit(_report(
        "battery", params,
        check=check, target=args.target, verdict=verdict.to_json(),
    ))
    return EXIT_OK


_PIPELINE_TRANSFORMS = ("aluthge", "quotient", "reciprocal", "schur", "subshift")


def _apply_pipeline(params: ShiftParams, pipeline: str, depth_n: int, depth_k: int,
                    count: int, dps: int) -> dict:
    ws = weights(params)
    applied = []
    steps = [step.strip() for step in pipeline.split("|") if step.strip()]
    for position, step in enumerate(steps):
        name, _, argtext = step.partition(":")
        terminal = position == len(steps) - 1
        if name == "aluthge":
            ws = aluthge(ws)
        elif name == "quotient":
            ws = quotient_shift(ws)
        elif name == "reciprocal":
            ws = reciprocal_weights(ws)
        elif name == "schur":
            ws = schur_power(ws, parse_rational(argtext))
        elif name == "subshift":
            stride_text, _, offset_text = argtext.partition(",")
            ws = subshift_weights(ws, AffineMap(int(stride_text), int(offset_text or 0)))
        elif name in ("battery", "moments-battery"):
            if not terminal:
                raise ValueError(f"{name} must be the last pipeline step")
            flavor = argtext
            if name == "moments-battery":
                from .model import MomentSequence
                seq = MomentSequence(ws)
                source = seq.kernel if flavor.startswith("log-") else seq
            else:
                source = ws.base_sq if flavor.startswith("log-") else ws.weight_sq
            # Log flavors run on the rational kernel: the power is positive,
            # so it cannot change the sign of a log difference.
            verdict = battery(source, flavor, depth_n, depth_k)
            applied.append(step)
            return {
                "pipeline": applied,
                "power": format_rational(ws.power),
                "verdict": verdict.to_json(),
            }
        else:
            raise ValueError(
                f"unknown pipeline step {step!r}; transforms are "
                f"{_PIPELINE_TRANSFORMS} and a terminal battery:<flavor>"
            )
        applied.append(step)
    with mp.workdps(dps):
        table = [
            {
                "n": n,
                "kernel": format_rational(ws.base_sq(n)),
                "weight_approx": mp.nstr(ws.weight_approx(n, dps), dps),
            }
            for n in range(count)
        ]
    return {
        "pipeline": applied,
        "power": format_rational(ws.power),
        "weights": table,
    }


def cmd_transform(args) -> int:
    params = make_params(args.p, args.N, args.D)
    result = _apply_pipeline(
        params, args.pipeline, args.depth_n, args.depth_k, args.count, args.dps
    )
    _emit(_report("transform", params, **result))
    return EXIT_OK


def cmd_complete(args) -> int:
    spec = TwoAtomSpec(mass_ratio=args.a, p=args.p)
    g0, g1, g2 = target_moments(spec)
    report = _report(
        "complete", None,
        a=format_rational(spec.mass_ratio),
        p=format_rational(spec.p),
        target_moments={
            "g0": format_rational(g0),
            "g1": format_rational(g1),
            "g2": format_rational(g2),
        },
    )
    try:
        report["same_p"] = same_p_completion(spec).to_json()
    except CompletionError as exc:
        report["same_p"] = {"error": str(exc)}
    if args.N is not None:
        report["family"] = family_completion(spec, args.N).to_json()
    else:
        ranges = family_sector_ranges(spec)
        report["family_sector_ranges"] = {
            sector: {"low_exclusive": format_rational(low),
                     "high_inclusive": format_rational(high)}
            for sector, (low, high) in ranges.items()
        }
    _emit(report)
    return EXIT_OK


SWEEP_COLUMNS = ("N", "D", "sectors", "special_ray_k", "hypo_order",
                 "mid_verdict", "che_verdict", "berger_status")


def _sweep_row(task) -> dict:
    p_text, n_text, d_text, options = task
    row = {"N": n_text, "D": d_text}
    try:
        params = make_params(
            parse_rational(p_text), parse_rational(n_text), parse_rational(d_text)
        )
        label = classify(params)
        row["sectors"] = "+".join(label.sectors)
        row["special_ray_k"] = "" if label.special_ray_k is None else str(label.special_ray_k)
        checks = options["batteries"]
        if "hypo" in checks:
            verdict = hyponormality_order(params, options["k_max"], options["j_max"])
            row["hypo_order"] = verdict.describe()
        if "mid" in checks:
            mid = battery(
                lambda n: weight_sq(params, n), "log-alternating",
                options["depth_n"], options["depth_k"],
            )
            row["mid_verdict"] = _verdict_str(mid)
        if "che" in checks:
            che = battery(
                moments(params), "alternating", options["depth_n"], options["depth_k"]
            )
            row["che_verdict"] = _verdict_str(che)
        if "berger" in checks:
            try:
                measure = berger_measure(params, options["berger_depth"])
                representation = verify_representation(params, measure, n_max=8)
                kind = "truncated" if measure.truncated else "exact"
                status = f"{kind}:{len(measure.atoms)}atoms"
                if not representation.holds:
                    status += ":representation-failed"
                row["berger_status"] = status
            except ConstructionError as exc:
                if exc.index is not None:
                    row["berger_status"] = f"negative-coefficient:i={exc.index}"
                else:
                    row["berger_status"] = f"error:{exc}"
    except Exception as exc:  # partial rows keep the sweep going
        row["error"] = f"{type(exc).__name__}: {exc}"
    for column in SWEEP_COLUMNS:
        row.setdefault(column, "")
    return row


def _grid_values(step: Fraction) -> list[Fraction]:
    values = []
    value = Fraction(-1) + step
    while value < 1:
        values.append(value)
        value += step
    return values


def cmd_sweep(args) -> int:
    if args.step <= 0:
        return _emit_error("step must be positive")
    batteries = tuple(b.strip() for b in args.batteries.split(",") if b.strip())
    unknown = [b for b in batteries if b not in ("hypo", "mid", "che", "berger")]
    if unknown:
        return _emit_error(f"unknown batteries: {unknown}")
    options = {
        "batteries": batteries,
        "depth_n": args.depth_n,
        "depth_k": args.depth_k,
        "k_max": args.k_max,
        "j_max": args.j_max,
        "berger_depth": args.berger_depth,
    }
    p_text = format_rational(args.p)
    grid = _grid_values(args.step)
    tasks = [
        (p_text, format_rational(n_value), format_rational(d_value), options)
        for n_value in grid
        for d_value in grid
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_row, tasks, chunksize=16))
    else:
        rows = [_sweep_row(task) for task in tasks]
    if args.format == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS + ("error",))
        for row in rows:
            writer.writerow([row.get(c, "") for c in SWEEP_COLUMNS + ("error",)])
    else:
        for row in rows:
            sys.stdout.write(json.dumps(row, sort_keys=True) + "\n")
    return EXIT_OK


# ----------------------------------------------------------------- parser


def _add_param_flags(sub) -> None:
    sub.add_argument("--p", type=_rational_arg, required=True,
                     help="geometric base, rational, > 1")
    sub.add_argument("--N", type=_rational_arg, required=True,
                     help="numerator offset, rational in (-1, 1)")
    sub.add_argument("--D", type=_rational_arg, required=True,
                     help="denominator offset, rational in (-1, 1)")


def _add_depth_flags(sub, depth_n=10, depth_k=25) -> None:
    sub.add_argument("--depth-n", type=int, default=depth_n,
                     help="maximum difference order tested")
    sub.add_argument("--depth-k", type=int, default=depth_k,
                     help="maximum start index tested")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="grws", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("classify", parents=[], help="sector label and predicted properties")
    _add_param_flags(sub)
    sub.add_argument("--ray-depth", type=int, default=64)
    sub.add_argument("--verify", action="store_true",
                     help="also run the property batteries behind each prediction")
    _add_depth_flags(sub, depth_n=8, depth_k=16)
    sub.add_argument("--k-max", type=int, default=6, help="hyponormality probe order")
    sub.add_argument("--j-max", type=int, default=12, help="hyponormality probe start index")
    sub.add_argument("--berger-depth", type=int, default=24)
    sub.set_defaults(func=cmd_classify)

    sub = commands.add_parser("verify-det", help="closed-form vs fraction-free determinants")
    _add_param_flags(sub)
    sub.add_argument("--k-max", type=int, default=6)
    sub.add_argument("--j-max", type=int, default=10)
    sub.add_argument("--table", action="store_true", help="include the determinant table")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.set_defaults(func=cmd_verify_det)

    sub = commands.add_parser("verify-berger", help="construct and verify the atomic measure")
    _add_param_flags(sub)
    sub.add_argument("--depth", type=int, default=24)
    sub.add_argument("--n-max", type=int, default=12,
                     help="verify moments up to this index")
    sub.set_defaults(func=cmd_verify_berger)

    sub = commands.add_parser("battery", help="run one property battery")
    _add_param_flags(sub)
    sub.add_argument("--check", required=True,
                     choices=("monotone", "alternating", "log-monotone",
                              "log-alternating", "contractive",
                              "probe-plain", "probe-log"))
    sub.add_argument("--target", choices=("weights", "moments"), default="weights")
    sub.add_argument("--spacings", default="",
                     help="comma-separated rational spacings for probes")
    _add_depth_flags(sub)
    sub.set_defaults(func=cmd_battery)

    sub = commands.add_parser("transform", help="apply a transform pipeline")
    _add_param_flags(sub)
    sub.add_argument("--pipeline", required=True,
                     help="left-to-right steps, e.g. 'aluthge|subshift:2,1|battery:log-alternating'")
    sub.add_argument("--count", type=int, default=8, help="weights to print without a battery")
    sub.add_argument("--dps", type=int, default=20, help="digits for weight approximations")
    _add_depth_flags(sub)
    sub.set_defaults(func=cmd_transform)

    sub = commands.add_parser("complete", help="two-atom moment completions")
    sub.add_argument("--a", type=_rational_arg, required=True,
                     help="mass ratio of the atom at 1/p, positive rational")
    sub.add_argument("--p", type=_rational_arg, required=True)
    sub.add_argument("--N", type=_rational_arg, default=None,
                     help="prescribe N in (-1, 0] for the changed-parameter family")
    sub.set_defaults(func=cmd_complete)

    sub = commands.add_parser("sweep", help="grid sweep over the open square")
    sub.add_argument("--p", type=_rational_arg, required=True)
    sub.add_argument("--step", type=_rational_arg, required=True,
                     help="grid step; points are -1+step, -1+2*step, ...")
    sub.add_argument("--batteries", default="hypo,mid,che,berger")
    sub.add_argument("--format", choices=("json", "csv"), default="csv")
    sub.add_argument("--jobs", type=int, default=1)
    _add_depth_flags(sub, depth_n=6, depth_k=12)
    sub.add_argument("--k-max", type=int, default=4, help="hyponormality probe order")
    sub.add_argument("--j-max", type=int, default=8)
    sub.add_argument("--berger-depth", type=int, default=24)
    sub.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, RationalFormatError, CompletionError, ValueError) as exc:
        return _emit_error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
