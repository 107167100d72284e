#!/usr/bin/env python3
"""
Ringforge - command line front door

Every subcommand prints a report and returns an exit code:
0 success, 1 recorded finding (a check failed), 2 usage, input or budget error.
"""

import argparse
import math
import sys
from pathlib import Path

from colorama import Fore, Style, init as colorama_init

from errors_module import BudgetExceededError, RingforgeError

colorama_init()

EXIT_OK = 0
EXIT_FINDING = 1
EXIT_USAGE = 2


# Define color codes for terminal output
class Colors:
    BLUE = Fore.BLUE
    GREEN = Fore.GREEN
    YELLOW = Fore.YELLOW
    RED = Fore.RED
    BOLD = Style.BRIGHT
    END = Style.RESET_ALL


def print_header(title):
    """Print a formatted header."""
    print(f"\n{Colors.BLUE}{Colors.BOLD}{'=' * 60}")
    print(f"{title:^60}")
    print(f"{'=' * 60}{Colors.END}\n")


def print_success(message):
    print(f"{Colors.GREEN}[OK] {message}{Colors.END}")


def print_error(message):
    print(f"{Colors.RED}[ERROR] {message}{Colors.END}")


def print_info(message):
    print(f"{Colors.YELLOW}[INFO] {message}{Colors.END}")


def print_finding(message):
    print(f"{Colors.RED}[FINDING] {message}{Colors.END}")


def _verdict(passed, what):
    if passed:
        print_success(what)
        return EXIT_OK
    print_finding(what)
    return EXIT_FINDING


def _pair(text):
    try:
        x, y = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}") from None
    return (x, y)


def _params(text):
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


# -------------------------
# SUBCOMMANDS
# -------------------------
def _instance(args):
    from instance_model_module import load_instance
    return load_instance(args.instance)


def cmd_validate(args):
    from instance_model_module import compute_theta0, validate_instance
    inst = _instance(args)
    print_header("INSTANCE VALIDATION")
    report = validate_instance(inst)
    for check in report.checks:
        mark = "ok" if check.passed else ("warn" if check.severity == "warning" else "FAIL")
        print(f"  {check.name:28s} {mark:5s} {check.detail}")
    print_info(f"theta0 = {compute_theta0(inst)} units")
    return _verdict(report.passed, f"{inst.source} passes validation" if report.passed
                    else f"{inst.source} fails validation")


def cmd_extend(args):
    from patch_engine_module import Patch, forced_moves, format_patch, load_patch, save_patch
    inst = _instance(args)
    patch = load_patch(args.patch, inst)
    applied = forced_moves(patch, eager=args.eager, horizon=args.horizon)
    extended = Patch.from_placements(inst, list(patch.placements) + list(applied))
    print_info(f"{len(applied)} forced placements")
    if args.out:
        save_patch(extended, args.out)
        print_success(f"wrote {args.out}")
    else:
        print(format_patch(extended), end="")
    return EXIT_OK


def cmd_enumerate(args):
    from patch_engine_module import enumerate_completions, load_patch, save_patch
    inst = _instance(args)
    patch = load_patch(args.patch, inst)
    result = enumerate_completions(patch, radius=args.radius, cap=args.cap)
    print_info(f"{result.count} completions at radius {args.radius} "
               f"({result.nodes} nodes, cap exceeded: {result.cap_exceeded})")
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for k, completion in enumerate(result.completions):
            save_patch(completion, out / f"completion_{k:03d}.patch")
        print_success(f"wrote {result.count} patches to {out}")
    return EXIT_OK


def cmd_lemmas(args):
    from classification_module import lemma_suite, suite_frame
    inst = _instance(args)
    print_header("LEMMA CERTIFICATES")
    certs = lemma_suite(only=args.only, radius_cap=args.radius_cap, inst=inst)
    print(suite_frame(certs).to_string(index=False))
    failed = [c.name for c in certs if not c.passed]
    return _verdict(not failed, "all certificates pass" if not failed
                    else f"failed: {', '.join(failed)}")


def cmd_census(args):
    from classification_module import census, check_snapshot, record_snapshot
    inst = _instance(args)
    table = census(args.radius, jobs=args.jobs, inst=inst)
    if args.out:
        table.write(args.out)
        print_success(f"wrote {args.out}")
    else:
        print(table.to_text(), end="")
    print_info(f"{len(table.rows)} balls of radius {args.radius}")
    status = EXIT_OK
    if table.empty_rows():
        print_finding(f"{len(table.empty_rows())} balls match no class")
        status = EXIT_FINDING
    if args.check_snapshot:
        verdict = check_snapshot(table)
        if verdict is None:
            print_info("no snapshot recorded for this radius")
        elif not verdict:
            print_finding("ball count differs from the recorded snapshot")
            status = EXIT_FINDING
        else:
            print_success("ball count matches the snapshot")
    if args.record_snapshot and status == EXIT_OK:
        record_snapshot(table)
        print_success("snapshot recorded")
    return status


def cmd_generate(args):
    from classification_module import ClassificationType, generate_window
    from patch_engine_module import format_patch, save_patch
    from render_module import RenderSpec, render_patch
    inst = _instance(args)
    t = ClassificationType(args.type, args.params)
    window = generate_window(t, args.radius, inst)
    if args.out:
        save_patch(window.patch, args.out)
        print_success(f"wrote {args.out}")
    else:
        print(format_patch(window.patch), end="")
    if args.svg:
        render_patch(window.patch, RenderSpec(out_path=args.svg))
    return EXIT_OK


def cmd_classify(args):
    from classification_module import PuzzleWindow, classify_window
    from patch_engine_module import load_patch
    inst = _instance(args)
    patch = load_patch(args.patch, inst)
    matches = classify_window(PuzzleWindow(patch, args.center, args.radius))
    for m in matches:
        print(f"  {m.type}  {m.constraint}")
    return _verdict(bool(matches), f"{len(matches)} classes consistent with the window"
                    if matches else "window matches no class")


def cmd_distance(args):
    from classification_module import PuzzleWindow
    from patch_engine_module import load_patch
    from puzzle_space_module import valuation_report
    inst = _instance(args)
    wa = PuzzleWindow(load_patch(args.a, inst), args.center_a, args.radius)
    wb = PuzzleWindow(load_patch(args.b, inst), args.center_b, args.radius)
    report = valuation_report(wa, wb)
    chosen = report.with_reflections if inst.reflections else report.rotations_only
    print(f"valuation (reflections allowed): {report.with_reflections}")
    print(f"valuation (rotations only):      {report.rotations_only}")
    print(f"distance: {math.exp(-chosen):.6g}")
    return EXIT_OK


def cmd_isolation(args):
    from classification_module import ClassificationType
    from puzzle_space_module import isolation_radius
    inst = _instance(args)
    t = ClassificationType(args.type, args.params)
    r = isolation_radius(t, args.rmax, inst)
    if r is None:
        print_info(f"{t} is not isolated within radius {args.rmax}")
    else:
        print_success(f"{t} is isolated at radius {r}")
    return EXIT_OK


def cmd_complex(args):
    from development_module import (
        cylinder_search,
        flat_reports,
        flats_from_strips,
        strip_immersions,
        unique_embeddability_check,
    )
    from ring_complex_module import check_type, girth_check, isolated_flats_note, load_complex, rings_at
    inst = _instance(args)
    X = load_complex(args.spec, inst, primes=args.primes, choice=args.choice)
    print_header("RING COMPLEX")
    print_info(repr(X))

    if args.action == "check":
        summary = X.summary()
        print(summary.model_dump_json(indent=2))
        for v in X.vertices:
            print(f"  {v}: {len(rings_at(X, v))} full-turn link cycles")
        report = check_type(X, inst)
        for line in report.bad_faces + report.bad_rings:
            print_finding(line)
        girth = girth_check(X)
        print(f"  link girth: {girth.girth}  npc: {girth.npc}")
        print_info(isolated_flats_note())
        return _verdict(report.passed and girth.npc, "type and girth checks pass"
                        if report.passed and girth.npc else "type or girth check fails")

    if args.action == "strips":
        found = strip_immersions(X, args.template, args.k)
        print_info(f"{len(found)} immersions of {args.template} of length {args.k}")
        cert = unique_embeddability_check(X, args.template, args.k)
        return _verdict(cert.passed, f"unique embeddability k={args.k}: "
                        + ("pass" if cert.passed else cert.witness))

    if args.action == "cylinders":
        report = cylinder_search(X, args.max_c, args.max_h)
        for f in report.findings:
            print(f"  cylinder c={f.circumference} h={f.height} faces={f.faces}")
        if report.budget_hits:
            print_info(f"budget exhausted at {report.budget_hits}")
        return _verdict(report.acylindrical_at_scale,
                        "no cylinders within bounds" if report.acylindrical_at_scale
                        else f"{len(report.findings)} cylinder findings")

    flats = flats_from_strips(X, args.k, inst)
    for row in flat_reports(flats):
        print(f"  period {row.period}: {', '.join(row.classes) or '-'}")
    print_info(f"{len(flats)} flat windows")
    return EXIT_OK


def cmd_density(args):
    from density_sim_module import density_params, density_table
    params = density_params(c_size=args.c, delta=args.delta, f_size=args.f,
                            trials=args.trials, rng_seed=args.seed)
    frame = density_table(params, args.const, args.alpha, jobs=args.jobs)
    print(frame.to_string(index=False))
    row = frame.iloc[0]
    within = abs(row["empirical"] - row["exact"]) <= 3 * row["stderr"] + 1e-12
    ordered = row["exact"] >= row["bound1"] >= row["bound2"]
    return _verdict(within and ordered, "estimate and bounds consistent" if within and ordered
                    else "estimate or bound chain inconsistent")


def cmd_landau(args):
    from density_sim_module import landau_brute_force, landau_g, landau_ratio
    g = landau_g(args.p)
    print(f"g({args.p}) = {g}")
    if args.p >= 2:
        print(f"ln g / sqrt(p ln p) = {landau_ratio(args.p):.6f}")
    if args.brute:
        brute = landau_brute_force(args.p)
        return _verdict(brute == g, f"brute force agrees ({brute})" if brute == g
                        else f"brute force gives {brute}")
    return EXIT_OK


def cmd_smalltori(args):
    from density_sim_module import GrowthParams, first_positive_margin, small_tori_margin, stirling_lower
    margin = small_tori_margin(GrowthParams(p=args.p, c_lin=args.clin), args.delta)
    stirling = stirling_lower(args.p)
    print(f"margin at p={args.p}: {margin:.6g}")
    print(f"ln p! = {stirling.log_factorial:.6g} >= p ln(p/e) = {stirling.log_bound:.6g}")
    first = first_positive_margin(args.clin, args.delta)
    print(f"first positive margin: {first}")
    return _verdict(margin > 0, "margin positive" if margin > 0 else "margin not yet positive")


def cmd_render(args):
    from render_module import RenderSpec, render_link, render_patch
    spec = RenderSpec(out_path=args.out, scale=args.scale)
    if args.patch:
        from patch_engine_module import load_patch
        render_patch(load_patch(args.patch, _instance(args)), spec)
    else:
        from ring_complex_module import link, load_complex
        X = load_complex(args.complex, _instance(args))
        render_link(link(X, args.vertex), spec)
    print_success(f"wrote {args.out}")
    return EXIT_OK


# -------------------------
# PARSER
# -------------------------
def build_parser():
    parser = argparse.ArgumentParser(prog="ringforge", description="Ring puzzle workbench")
    parser.add_argument("--instance", default=None, help="instance file (default: shipped autf2.ring)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an instance file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("extend", help="apply forced placements to a patch")
    p.add_argument("--patch", required=True)
    p.add_argument("--eager", action="store_true")
    p.add_argument("--horizon", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("enumerate", help="completions of a patch over a ball")
    p.add_argument("--patch", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--cap", type=int, default=64)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("lemmas", help="run the lemma certificates")
    p.add_argument("--only")
    p.add_argument("--radius-cap", type=int)
    p.set_defaults(func=cmd_lemmas)

    p = sub.add_parser("census", help="all legal balls of a radius")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--check-snapshot", action="store_true")
    p.add_argument("--record-snapshot", action="store_true")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("generate", help="window of a puzzle class")
    p.add_argument("--type", required=True)
    p.add_argument("--params", type=_params, default=())
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("classify", help="classes consistent with a window")
    p.add_argument("--patch", required=True)
    p.add_argument("--center", type=_pair, default=(0, 0))
    p.add_argument("--radius", type=int, default=3)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("distance", help="valuation and distance of two marked windows")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--center-a", type=_pair, default=(0, 0))
    p.add_argument("--center-b", type=_pair, default=(0, 0))
    p.add_argument("--radius", type=int, default=3)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("isolation", help="isolation radius of a class")
    p.add_argument("--type", required=True)
    p.add_argument("--params", type=_params, default=())
    p.add_argument("--rmax", type=int, default=4)
    p.set_defaults(func=cmd_isolation)

    p = sub.add_parser("complex", help="ring complex checks")
    p.add_argument("action", choices=["check", "strips", "cylinders", "flats"])
    p.add_argument("--in", dest="spec", default=None, help="complex file (default: shipped fixture)")
    p.add_argument("--primes", choices=["inverse", "distinct"])
    p.add_argument("--choice", type=int, default=0)
    p.add_argument("--template", choices=["diamond_strip", "triangle_strip"], default="diamond_strip")
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--max-c", type=int, default=12)
    p.add_argument("--max-h", type=int, default=6)
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("density", help="density event: exact, bounds, Monte Carlo")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--f", type=int, required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--const", type=float)
    p.add_argument("--alpha", type=float)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("landau", help="Landau function")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--brute", action="store_true")
    p.set_defaults(func=cmd_landau)

    p = sub.add_parser("smalltori", help="small tori margin")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--clin", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=cmd_smalltori)

    p = sub.add_parser("render", help="SVG of a patch or a vertex link")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--patch")
    source.add_argument("--complex")
    p.add_argument("--vertex", default="v0")
    p.add_argument("--out", required=True)
    p.add_argument("--scale", type=float, default=40.0)
    p.set_defaults(func=cmd_render)

    return parser


def run(argv=None):
    """Parse argv, run one subcommand, and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except BudgetExceededError as e:
        print_error(str(e))
        return EXIT_USAGE
    except (RingforgeError, OSError, ValueError) as e:
        print_error(str(e))
        return EXIT_USAGE


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    try:
        main()
    except KeyboardInterrupt:
        print(f"\n{Colors.YELLOW}Interrupted by user{Colors.END}")
        sys.exit(EXIT_USAGE)
