"""The ``flowcat`` command line.

Exit status 0 means success, 1 a failed check (the report goes to standard
output) and 2 a usage, input or configuration error (diagnostics go to
standard error).
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Callable
from typing import Any, Optional

from . import __version__
from .bimodule_alg import compose_bimodules
from .config import RunConfig, resolve_config
from .constants import GammaKind, OutputFormat, Ring
from .corner_model import is_corner_model
from .degeneration_geom import (
    conic_fiber,
    cosimplicial_check,
    expected_facet_count,
    lblock_facets,
)
from .error_codes import ErrorCode
from .exceptions import ConfigError, FlowcatError, InputError
from .flow_data import cone, validate_flow_category, validate_flow_simplex
from .homology import chain_complex, homology, les_check
from .horn_fill import fill_horn, fill_inner_2horn
from .morse import (
    Matching,
    SimplicialComplex,
    continuation_bimodule,
    greedy_matching,
    morse_flow_category,
    morse_homology,
    simplicial_homology,
)
from .reports import ValidationReport, Violation
from .serialization import (
    category_dot,
    corner_dot,
    dump,
    dumps,
    homology_csv,
    load_bimodule,
    load_category,
    load_complex,
    load_corner,
    load_matching,
    load_simplex,
    matching_document,
    simplex_dot,
    write_text,
)
from .strat_arcs import (
    RATIONAL_GAMMA,
    TRIVIAL_GAMMA,
    ArcCategory,
    arc_corner_category,
    check_face_identities,
)
from .utils import format_rational, parse_rational

logger = logging.getLogger("flowcat")

Handler = Callable[[argparse.Namespace, RunConfig], int]


def configure_logging(verbose: bool = False) -> None:
    """Send log records to standard error, WARNING by default."""

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("flowcat")
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)


def _status(ok: bool) -> int:
    return 0 if ok else 1


def _emit(
    config: RunConfig,
    data: Any,
    text: Optional[str] = None,
    out: Optional[str] = None,
) -> None:
    if config.output_format == OutputFormat.TEXT and text is not None:
        write_text(text if text.endswith("\n") else text + "\n", out)
    else:
        dump(data, out)


def _report_text(report: ValidationReport) -> str:
    lines = ["ok" if report.ok else "FAILED"]
    lines += [
        f"{v.code.name} {'/'.join(v.location)}: {v.message}" for v in report.violations
    ]
    lines += [f"warning: {w}" for w in report.warnings]
    return "\n".join(lines)


def _emit_report(
    config: RunConfig, report: ValidationReport, out: Optional[str] = None
) -> int:
    _emit(config, report, _report_text(report), out)
    return _status(report.ok)


# Argument helpers


def parse_sequence(text: str) -> tuple[tuple[str, ...], ...]:
    """``"a,b|b|b,c"`` is the sequence ({a, b}, {b}, {b, c})."""

    sets = tuple(
        tuple(e.strip() for e in part.split(",") if e.strip())
        for part in text.split("|")
    )
    if not sets or any(not s for s in sets):
        raise InputError(f"Empty set in sequence {text!r}")

    return sets


def parse_end(text: Optional[str]) -> Optional[tuple[int, str]]:
    """``"0:a"`` is element ``a`` of set 0."""

    if text is None:
        return None

    index, sep, element = text.partition(":")
    if not sep or not index.strip().isdigit() or not element:
        raise InputError(f"Endpoint {text!r} is not of the form index:element")

    return int(index), element


def _arc_category(args: argparse.Namespace) -> ArcCategory:
    rational = args.gamma == GammaKind.NONNEG_RATIONAL.value
    return ArcCategory(
        sequence=parse_sequence(args.sequence),
        gamma=RATIONAL_GAMMA if rational else TRIVIAL_GAMMA,
        source=parse_end(args.source),
        target=parse_end(args.target),
        grade=parse_rational(args.grade),
    )


def _matching(K: SimplicialComplex, choice: str) -> Matching:
    if choice == "greedy":
        return greedy_matching(K)
    if choice == "empty":
        return Matching()

    return load_matching(choice)


# Handlers


def cmd_arcs_enum(args: argparse.Namespace, config: RunConfig) -> int:
    arcs = _arc_category(args).enumerate_objects(config.max_codim)
    data = [{"arc": str(a), "codim": a.codim} for a in arcs]
    _emit(config, data, "\n".join(f"{a.codim} {a}" for a in arcs), args.out)
    return 0


def cmd_arcs_codim1(args: argparse.Namespace, config: RunConfig) -> int:
    strata = _arc_category(args).enumerate_codim1()
    data = [
        {
            "arc": str(s.arc),
            "kind": s.kind,
            "normal": s.normal_sign,
            "index": s.index,
            "through": None if s.through is None else f"{s.through[0]}:{s.through[1]}",
        }
        for s in strata
    ]
    text = "\n".join(f"{s.kind} {s.normal_sign} {s.arc}" for s in strata)
    _emit(config, data, text, args.out)
    return 0


def cmd_arcs_faces_check(args: argparse.Namespace, config: RunConfig) -> int:
    category = _arc_category(args)
    report = is_corner_model(arc_corner_category(category, config.max_codim))
    failures = [
        Violation.of(ErrorCode.ARC_FACE_IDENTITY, detail=failure)
        for failure in check_face_identities(category, config.max_codim)
    ]
    report = report.merged(ValidationReport.from_violations(failures))
    return _emit_report(config, report, args.out)


def cmd_lblock_facets(args: argparse.Namespace, config: RunConfig) -> int:
    facets = lblock_facets(args.d, args.flag)
    data = {
        "d": args.d,
        "flag": args.flag,
        "epsilon": format_rational(config.epsilon),
        "count": len(facets),
        "expected": expected_facet_count(args.d, args.flag),
        "facets": [
            {
                "facet": str(f),
                "target": None if f.target is None else list(f.target),
            }
            for f in facets
        ],
    }
    _emit(config, data, "\n".join(map(str, facets)) or "(empty)", args.out)
    return 0


def cmd_lblock_check(args: argparse.Namespace, config: RunConfig) -> int:
    report = cosimplicial_check(
        args.max_d, config.epsilon, config.grid_steps, config.threads
    )
    return _emit_report(config, report, args.out)


def cmd_conic_fiber(args: argparse.Namespace, config: RunConfig) -> int:
    t = [parse_rational(v) for v in args.t.split(",")] if args.t else []
    components = conic_fiber(len(t), t)
    data = {
        "t": [format_rational(v) for v in t],
        "components": [c.to_dict() for c in components],
    }
    text = f"{len(components)} components"
    _emit(config, data, text, args.out)
    return 0


def cmd_validate(args: argparse.Namespace, config: RunConfig) -> int:
    if args.category:
        report = validate_flow_category(
            load_category(args.category), config.ring, config.threads
        )
    elif args.simplex:
        report = validate_flow_simplex(
            load_simplex(args.simplex), config.ring, config.threads
        )
    else:
        report = is_corner_model(load_corner(args.corner))
    return _emit_report(config, report, args.out)


def cmd_homology(args: argparse.Namespace, config: RunConfig) -> int:
    if args.complex and args.matching:
        K = load_complex(args.complex)
        result = morse_homology(
            K, _matching(K, args.matching), config.ring, config.threads
        )
    elif args.complex:
        result = simplicial_homology(load_complex(args.complex), config.ring)
    else:
        result = homology(chain_complex(load_category(args.category), config.ring))

    if config.output_format == OutputFormat.CSV:
        write_text(homology_csv(result), args.out)
    else:
        text = "\n".join(f"H{k} = {g}" for k, g in result.as_strings().items())
        _emit(config, result, text, args.out)
    return 0


def cmd_compose(args: argparse.Namespace, config: RunConfig) -> int:
    composite = compose_bimodules(load_bimodule(args.first), load_bimodule(args.second))
    dump(composite, args.out)
    return 0


def cmd_cone(args: argparse.Namespace, config: RunConfig) -> int:
    data = cone(load_bimodule(args.bimodule))
    dump(data.category, args.out)
    return 0


def cmd_les(args: argparse.Namespace, config: RunConfig) -> int:
    report = les_check(load_bimodule(args.bimodule), config.ring, config.threads)
    text = "\n".join(
        f"{spot.name}: {'exact' if spot.exact else 'NOT exact'}"
        for spot in report.spots
    )
    _emit(config, report, text, args.out)
    return _status(report.ok)


def cmd_hornfill(args: argparse.Namespace, config: RunConfig) -> int:
    horn = load_simplex(args.horn)
    reports = fill_horn(horn, args.k, config.max_codim, config.epsilon)
    data: dict[str, Any] = {"reports": [r.to_dict() for r in reports]}
    if horn.dimension == 2 and args.k == 1 and args.filled:
        dump(fill_inner_2horn(horn), args.filled)
        data["filled"] = str(args.filled)

    ok = all(r.ok for r in reports)
    data["ok"] = ok
    text = "\n".join(
        f"{r.source} -> {r.target} @{format_rational(r.grade)}: "
        f"{'ok' if r.ok else 'FAILED'} ({len(r.cells)} cells)"
        for r in reports
    )
    _emit(config, data, text, args.out)
    return _status(ok)


def cmd_morse_build(args: argparse.Namespace, config: RunConfig) -> int:
    K = load_complex(args.complex)
    output = morse_flow_category(K, _matching(K, args.matching), config.threads)
    dump(output.category, args.out)
    return 0


def cmd_morse_continue(args: argparse.Namespace, config: RunConfig) -> int:
    K = load_complex(args.complex)
    bimodule = continuation_bimodule(
        K,
        _matching(K, args.source),
        _matching(K, args.target),
        threads=config.threads,
    )
    dump(bimodule, args.out)
    return 0


def cmd_morse_greedy(args: argparse.Namespace, config: RunConfig) -> int:
    dump(matching_document(greedy_matching(load_complex(args.complex))), args.out)
    return 0


def cmd_export_dot(args: argparse.Namespace, config: RunConfig) -> int:
    if args.category:
        text = category_dot(load_category(args.category))
    elif args.simplex:
        text = simplex_dot(load_simplex(args.simplex))
    else:
        text = corner_dot(load_corner(args.corner))
    write_text(text, args.out)
    return 0


# Parser


def _add_arc_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--sequence",
        required=True,
        help='Object sets separated by "|", elements by "," (e.g. "a,b|b|c").',
    )
    parser.add_argument("--source", help="Source edge as index:element.")
    parser.add_argument("--target", help="Target edge as index:element.")
    parser.add_argument(
        "--gamma",
        choices=[g.value for g in GammaKind],
        default=GammaKind.TRIVIAL.value,
        help="Energy monoid (default: trivial).",
    )
    parser.add_argument("--grade", default="0", help="Total energy (default: 0).")


def _add_one_of(parser: argparse.ArgumentParser, *names: str) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    for name in names:
        group.add_argument(f"--{name}", help=f"Path to a {name} document.")


def common_options() -> argparse.ArgumentParser:
    """Options every subcommand accepts; command line beats environment and file."""

    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", help="INI file with a [flowcat] section.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging.")
    parser.add_argument("--ring", choices=[r.value for r in Ring])
    parser.add_argument("--epsilon", help="L-block parameter in (0, 1).")
    parser.add_argument("--max-codim", type=int, dest="max_codim")
    parser.add_argument("--grid-steps", type=int, dest="grid_steps")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--threads", type=int)
    parser.add_argument(
        "--format",
        choices=[f.value for f in OutputFormat],
        dest="output_format",
    )
    return parser


COMMON = common_options()


def _command(
    subparsers: Any, name: str, handler: Handler, help_text: str
) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        name, help=help_text, description=help_text, parents=[COMMON]
    )
    parser.set_defaults(handler=handler)
    parser.add_argument("--out", help="Write the result here instead of stdout.")
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowcat",
        description="Check and build flow categories, bimodules and flow simplices.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    arcs = commands.add_parser("arcs", help="Arc categories.")
    arcs_commands = arcs.add_subparsers(dest="action", required=True)
    for name, handler, help_text in (
        ("enum", cmd_arcs_enum, "Enumerate arcs up to --max-codim."),
        ("codim1", cmd_arcs_codim1, "List codimension-1 arcs with their kind."),
        (
            "faces-check",
            cmd_arcs_faces_check,
            "Check the corner-model criterion and the face identities.",
        ),
    ):
        _add_arc_arguments(_command(arcs_commands, name, handler, help_text))

    lblock = commands.add_parser("lblock", help="L-blocks.")
    lblock_commands = lblock.add_subparsers(dest="action", required=True)
    facets = _command(lblock_commands, "facets", cmd_lblock_facets, "List facets.")
    facets.add_argument("--d", type=int, required=True)
    facets.add_argument("--flag", type=int, choices=(0, 1), default=0)
    check = _command(
        lblock_commands,
        "cosimplicial-check",
        cmd_lblock_check,
        "Check the cosimplicial identities of the L-block inclusions.",
    )
    check.add_argument("--max-d", type=int, default=5, dest="max_d")

    conic = commands.add_parser("conic", help="Conic degenerations.")
    conic_commands = conic.add_subparsers(dest="action", required=True)
    fiber = _command(conic_commands, "fiber", cmd_conic_fiber, "Fiber components.")
    fiber.add_argument("--t", default="", help="Comma-separated rationals.")

    validate = _command(commands, "validate", cmd_validate, "Validate a document.")
    _add_one_of(validate, "category", "simplex", "corner")

    homology_cmd = _command(commands, "homology", cmd_homology, "Compute homology.")
    _add_one_of(homology_cmd, "category", "complex")
    homology_cmd.add_argument(
        "--matching",
        help='With --complex: Morse homology of this matching, "greedy" or "empty".',
    )

    compose = _command(commands, "compose", cmd_compose, "Compose two bimodules.")
    compose.add_argument("--first", required=True)
    compose.add_argument("--second", required=True)

    cone_cmd = _command(commands, "cone", cmd_cone, "Cone of a bimodule.")
    cone_cmd.add_argument("--bimodule", required=True)

    les = _command(commands, "les", cmd_les, "Long exact sequence of a cone.")
    les.add_argument("--bimodule", required=True)

    hornfill = _command(commands, "hornfill", cmd_hornfill, "Fill an inner horn.")
    hornfill.add_argument("--horn", required=True)
    hornfill.add_argument("--k", type=int, required=True)
    hornfill.add_argument("--filled", help="Write the filled 2-simplex here.")

    morse = commands.add_parser("morse", help="Discrete Morse theory.")
    morse_commands = morse.add_subparsers(dest="action", required=True)
    build = _command(
        morse_commands, "build", cmd_morse_build, "Build a Morse flow category."
    )
    build.add_argument("--complex", required=True)
    build.add_argument(
        "--matching", default="greedy", help='Matching path, "greedy" or "empty".'
    )
    cont = _command(
        morse_commands, "continue", cmd_morse_continue, "Continuation bimodule."
    )
    cont.add_argument("--complex", required=True)
    cont.add_argument("--from", dest="source", required=True)
    cont.add_argument("--to", dest="target", required=True)
    greedy = _command(
        morse_commands, "greedy", cmd_morse_greedy, "Greedy acyclic matching."
    )
    greedy.add_argument("--complex", required=True)

    export = commands.add_parser("export", help="Graph exports.")
    export_commands = export.add_subparsers(dest="action", required=True)
    dot = _command(export_commands, "dot", cmd_export_dot, "Graphviz DOT source.")
    _add_one_of(dot, "category", "simplex", "corner")

    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    keys = (
        "ring",
        "epsilon",
        "max_codim",
        "grid_steps",
        "seed",
        "threads",
        "output_format",
    )
    return {key: getattr(args, key, None) for key in keys}


def main(argv: list[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    configure_logging(args.verbose)
    try:
        config = resolve_config(_overrides(args), args.config)
        return args.handler(args, config)
    except (InputError, ConfigError) as exc:
        logger.error("%s", exc.message)
        return 2
    except FlowcatError as exc:
        logger.error("%s", exc.message)
        error = {"code": exc.code, "message": exc.message}
        for attribute in ("location", "witness"):
            if getattr(exc, attribute, None):
                error[attribute] = [str(x) for x in getattr(exc, attribute)]
        print(dumps({"ok": False, "error": error}), end="")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
