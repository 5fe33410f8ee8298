#!/usr/bin/env python3
"""
booktor - torsion in H1 of finite regular covers of books of I-bundles.

Usage:
  python scripts/booktor.py validate --book data/running_example.json
  python scripts/booktor.py present --book data/running_example.json --text
  python scripts/booktor.py cover --book data/running_example.json --quotient data/mod2_quotient.json
  python scripts/booktor.py h1 --book data/running_example.json --quotient data/mod2_quotient.json --oracle
  python scripts/booktor.py bound --book data/running_example.json --quotient data/mod2_quotient.json
  python scripts/booktor.py tower run --book data/running_example.json --tower data/mod2_tower.json --cap 64
  python scripts/booktor.py tower mod --book data/running_example.json --prime 3 --depth 2
  python scripts/booktor.py metabelian --matrix 2,1,1,1 --max-n 30
  python scripts/booktor.py sample --book data/running_example.json --group dihedral:4 --seed 7
  python scripts/booktor.py sweep --count 200

Data goes to stdout (or --out); diagnostics go to stderr.
Exit codes: 0 ok, 1 failed check, 2 cap exceeded, 3 malformed input.
"""

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Optional

import pandas as pd

# Ensure project root is on the path
sys.path.insert(0, str(Path(__file__).parent.parent))

from scripts.utils.book_model import load_book, parse_book, validate
from scripts.utils.cover_lift import lift
from scripts.utils.errors import (
    EXIT_FAILED,
    EXIT_OK,
    BooktorError,
    MalformedInputError,
    OracleDisagreementError,
    exit_code_for,
)
from scripts.utils.finite_quotient import load_quotient
from scripts.utils.integer_homology import gcd_of_minors_torsion
from scripts.utils.paper_matrix import (
    bound_chain,
    build,
    column_norm_check,
    cover_homology,
    hadamard_bound,
    index_decomposition,
    torsion,
)
from scripts.utils.presentation import (
    GroupPresentation,
    format_presentation,
    format_word,
    parse_presentation,
    present,
)
from scripts.utils.quotient_search import parse_group, sample_quotient, sweep_cases
from scripts.utils.rs_oracle import coset_table_dump, oracle_homology, schreier_presentation
from scripts.utils.run_config import (
    Caps,
    RunConfig,
    default_workers,
    get_settings,
    load_json,
    metabelian_settings,
)
from scripts.utils.tower import (
    growth_series,
    growth_table,
    load_tower,
    metabelian_growth_check,
    metabelian_series,
    mod_m_tower,
    tower_to_json,
)

log = logging.getLogger("booktor")


def write_output(config: RunConfig, data=None, frame: Optional[pd.DataFrame] = None, text: str = None):
    """Render JSON (default), a pandas table or CSV, to --out or stdout."""
    if text is None:
        if config.output_format == "json" or frame is None:
            text = json.dumps(data, indent=2) + "\n"
        elif config.output_format == "csv":
            text = frame.to_csv(index=False)
        else:
            text = frame.to_string(index=False) + "\n"
    if config.output_path:
        Path(config.output_path).write_text(text, encoding="utf-8")
        log.info("Wrote %s", config.output_path)
    else:
        sys.stdout.write(text)


def _book_and_presentation(config: RunConfig):
    book = load_book(config.inputs["book"])
    return book, present(book)


def _pipeline(config: RunConfig, settings: dict, compress: Optional[bool] = None):
    book, p = _book_and_presentation(config)
    q = load_quotient(config.inputs["quotient"], p.generators, config.caps)
    cov = lift(book, p, q)
    if compress is None:
        compress = bool((settings.get("paper_matrix") or {}).get("compress_crosscaps", False))
    return book, p, q, cov, build(cov, compress)


def presentation_to_json(p: GroupPresentation) -> dict:
    return {
        "generators": list(p.generators),
        "roles": list(p.roles),
        "relators": [format_word(r, p.generators) for r in p.relators],
        "tree_edges": list(p.tree_edges),
        "stable_letters": {
            str(e): p.generators[g] for e, g in enumerate(p.edge_paths) if g is not None
        },
    }


# Subcommands

def cmd_validate(args, config: RunConfig, settings: dict) -> int:
    report = validate(parse_book(load_json(config.inputs["book"])))
    write_output(config, report.to_json())
    if not report.valid:
        for violation in report.violations:
            print(f"Error: {violation}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_present(args, config: RunConfig, settings: dict) -> int:
    source = Path(config.inputs["book"])
    if source.suffix == ".json":
        _, p = _book_and_presentation(config)
    else:
        p = parse_presentation(source.read_text(encoding="utf-8"))
    if args.text:
        write_output(config, text=format_presentation(p))
    else:
        write_output(config, presentation_to_json(p))
    return EXIT_OK


def cmd_cover(args, config: RunConfig, settings: dict) -> int:
    _, _, q, cov, _ = _pipeline(config, settings)
    out = {"group_order": q.group_order, **cov.to_json()}
    frame = pd.DataFrame(cov.attachments())
    write_output(config, out, frame)
    return EXIT_OK


def cmd_h1(args, config: RunConfig, settings: dict) -> int:
    _, p, q, cov, pm = _pipeline(config, settings, args.compress_crosscaps or None)
    result = cover_homology(cov, pm)
    out = result.to_json()
    out["index"] = index_decomposition(cov).to_json()

    if args.coset_table:
        Path(args.coset_table).write_text(coset_table_dump(schreier_presentation(p, q)), encoding="utf-8")

    if config.oracle:
        expected = oracle_homology(p, q)
        if (expected.invariant_factors, expected.betti) != (result.invariant_factors, result.betti):
            raise OracleDisagreementError(
                "graph-of-spaces and Reidemeister-Schreier homology differ",
                primary=out,
                oracle=expected.to_json(),
            )
        out["oracle"] = "agree"
    write_output(config, out)
    return EXIT_OK


def cmd_bound(args, config: RunConfig, settings: dict) -> int:
    _, _, _, cov, pm = _pipeline(config, settings, args.compress_crosscaps or None)
    chain = bound_chain(pm, cov)
    out = {
        "matrix": pm.to_json(),
        "homology": torsion(pm).to_json(),
        "column_norms": [n.to_json() for n in column_norm_check(pm, cov)],
        "bound_chain": chain.to_json(),
        "index": index_decomposition(cov).to_json(),
        "hadamard_bound": hadamard_bound(cov),
    }
    rows, cols = pm.shape
    if max(rows, cols) <= config.caps.max_minor_dimension:
        out["minors_torsion"] = gcd_of_minors_torsion(pm.matrix, cols, config.caps.max_minor_dimension)
    write_output(config, out)
    if not chain.ok:
        print("Error: bound chain violated", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def _growth_exit(rows) -> int:
    bad = [r.level for r in rows if not (r.ratio_ok and r.bound_ok)]
    if bad:
        print(f"Error: growth bound violated at levels {bad}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_tower_run(args, config: RunConfig, settings: dict) -> int:
    book, p = _book_and_presentation(config)
    t = load_tower(config.inputs["tower"], p, config.caps)
    if args.max_levels is not None and len(t.levels) > args.max_levels:
        raise MalformedInputError(f"tower has {len(t.levels)} levels, --max-levels is {args.max_levels}")
    rows = growth_series(book, p, t, config.workers, config.oracle, args.compress_crosscaps)
    out = {"declared_cofinal": t.declared_cofinal, "levels": [r.to_json() for r in rows]}
    write_output(config, out, growth_table(rows))
    return _growth_exit(rows)


def cmd_tower_mod(args, config: RunConfig, settings: dict) -> int:
    book, p = _book_and_presentation(config)
    t = mod_m_tower(book, p, args.prime, args.depth, config.caps)
    if not args.run:
        write_output(config, tower_to_json(t))
        return EXIT_OK
    rows = growth_series(book, p, t, config.workers, config.oracle)
    write_output(config, {"declared_cofinal": False, "levels": [r.to_json() for r in rows]}, growth_table(rows))
    return _growth_exit(rows)


def _parse_matrix(text: str) -> list:
    try:
        entries = [int(x) for x in text.replace(" ", "").split(",")]
    except ValueError:
        raise MalformedInputError(f"--matrix must be four comma-separated integers, got {text!r}")
    if len(entries) != 4:
        raise MalformedInputError(f"--matrix must be four comma-separated integers, got {text!r}")
    return [entries[:2], entries[2:]]


def cmd_metabelian(args, config: RunConfig, settings: dict) -> int:
    a = _parse_matrix(args.matrix)
    digits, tolerance = metabelian_settings(settings)
    rows = metabelian_series(a, args.max_n)
    out = {"matrix": a, "series": rows}
    if args.check_n:
        out["growth_check"] = metabelian_growth_check(a, args.check_n, digits, tolerance)
    frame = pd.DataFrame([
        {"n": r["n"], "torsion": str(r["torsion"]),
         "factors": " ".join(map(str, r["invariant_factors"])) or "-", "log_ratio": r["log_ratio"]}
        for r in rows
    ])
    write_output(config, out, frame)
    if args.check_n and not out["growth_check"]["ok"]:
        print("Error: log-ratio is outside the tolerance of log(lambda)", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_sample(args, config: RunConfig, settings: dict) -> int:
    book, p = _book_and_presentation(config)
    q = sample_quotient(book, p, parse_group(args.group), random.Random(args.seed), args.attempts, config.caps)
    if q is None:
        print(f"Error: no homomorphism into {args.group} found in {args.attempts} attempts", file=sys.stderr)
        return EXIT_FAILED
    write_output(config, q.to_json())
    return EXIT_OK


def sweep_record(book, p, q, kind: str) -> dict:
    """Primary pipeline against the oracle, plus the bound chain, for one sweep case."""
    cov = lift(book, p, q)
    pm = build(cov)
    primary = cover_homology(cov, pm)
    expected = oracle_homology(p, q)
    chain = bound_chain(pm, cov)
    return {
        "kind": kind,
        "book": book.to_json(),
        "group_order": q.group_order,
        "invariant_factors": list(primary.invariant_factors),
        "betti": primary.betti,
        "oracle_invariant_factors": list(expected.invariant_factors),
        "oracle_betti": expected.betti,
        "agree": (primary.invariant_factors, primary.betti) == (expected.invariant_factors, expected.betti),
        "bound_chain_ok": chain.ok,
    }


def cmd_sweep(args, config: RunConfig, settings: dict) -> int:
    seed = args.seed if args.seed is not None else (settings.get("sweep") or {}).get("seed", 0)
    records = [sweep_record(*case) for case in sweep_cases(seed, args.count, args.max_group_order)]
    out = {
        "seed": seed,
        "count": len(records),
        "all_agree": all(r["agree"] for r in records),
        "all_bounds_ok": all(r["bound_chain_ok"] for r in records),
        "cases": records,
    }
    frame = pd.DataFrame([
        {key: r[key] for key in ("kind", "group_order", "betti", "oracle_betti", "agree", "bound_chain_ok")}
        for r in records
    ])
    write_output(config, out, frame)
    if not (out["all_agree"] and out["all_bounds_ok"]):
        print("Error: sweep found disagreements or bound violations", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-order", "--cap", dest="max_order", type=int,
                        help="Cap on |G| (default from settings)")
    common.add_argument("--max-degree", type=int, help="Cap on permutation degree")
    common.add_argument("--max-minors", type=int, help="Cap on gcd-of-minors matrix dimension")
    common.add_argument("--out", "-o", help="Write data here instead of stdout")
    common.add_argument("--format", "-f", choices=["json", "table", "csv"],
                        help="Output format (default: json, csv for metabelian)")
    common.add_argument("--workers", "-w", type=int, help="Parallel tower level workers")
    common.add_argument("--log-level", help="Override logging level from settings")

    parser = argparse.ArgumentParser(description="Torsion in homology of covers of books of I-bundles")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="Check the standing hypotheses on a book")
    p.add_argument("--book", "-b", required=True)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("present", parents=[common], help="Presentation of pi1 of the book")
    p.add_argument("--book", "-b", required=True, help="Book JSON, or a presentation in the text grammar")
    p.add_argument("--text", action="store_true", help="Emit the gen:/rel: text grammar")
    p.set_defaults(handler=cmd_present)

    for name, handler, text in (
        ("cover", cmd_cover, "Lift the graph of spaces to a finite cover"),
        ("h1", cmd_h1, "First homology of a finite cover"),
        ("bound", cmd_bound, "Boundary-relation matrix and its bound chain"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--book", "-b", required=True)
        p.add_argument("--quotient", "-q", required=True)
        if name != "cover":
            p.add_argument("--compress-crosscaps", action="store_true",
                           help="One crosscap column per non-orientable lift")
        if name == "h1":
            p.add_argument("--oracle", action="store_true", help="Cross-check with Reidemeister-Schreier")
            p.add_argument("--coset-table", help="Write the oracle coset table dump to this file")
        p.set_defaults(handler=handler)

    tower = sub.add_parser("tower", help="Towers of covers")
    tower_sub = tower.add_subparsers(dest="tower_command", required=True)
    p = tower_sub.add_parser("run", parents=[common], help="Torsion growth along a tower file")
    p.add_argument("--book", "-b", required=True)
    p.add_argument("--tower", "-t", required=True)
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--compress-crosscaps", action="store_true")
    p.add_argument("--max-levels", type=int, help="Refuse towers with more levels")
    p.set_defaults(handler=cmd_tower_run)
    p = tower_sub.add_parser("mod", parents=[common], help="Tower of mod q^n homology covers")
    p.add_argument("--book", "-b", required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--run", action="store_true", help="Run the growth series instead of printing the tower")
    p.add_argument("--oracle", action="store_true")
    p.set_defaults(handler=cmd_tower_mod)

    p = sub.add_parser("metabelian", parents=[common], help="Torsion of cyclic covers of a torus bundle")
    p.add_argument("--matrix", required=True, help="Monodromy a,b,c,d for [[a,b],[c,d]]")
    p.add_argument("--max-n", type=int, default=30)
    p.add_argument("--check-n", type=int, default=30, help="Level of the exact growth check (0 = skip)")
    p.set_defaults(handler=cmd_metabelian, default_format="csv")

    p = sub.add_parser("sample", parents=[common], help="Random quotient onto a named permutation group")
    p.add_argument("--book", "-b", required=True)
    p.add_argument("--group", "-g", required=True, help="cyclic:n, dihedral:n or symmetric:n")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--attempts", type=int, default=50)
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("sweep", parents=[common], help="Oracle sweep over random books and quotients")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-group-order", type=int, default=24)
    p.set_defaults(handler=cmd_sweep)
    return parser


def _configure_logging(settings: dict, level: Optional[str]) -> None:
    section = settings.get("logging") or {}
    logging.basicConfig(
        level=(level or section.get("level", "WARNING")).upper(),
        format=section.get("format", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"),
        stream=sys.stderr,
    )


def main(argv=None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)

    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = get_settings()
        _configure_logging(settings, args.log_level)
        command = args.command if args.command != "tower" else f"tower {args.tower_command}"
        inputs = {
            name: getattr(args, name)
            for name in ("book", "quotient", "tower")
            if getattr(args, name, None) is not None
        }
        config = RunConfig(
            subcommand=command,
            inputs=inputs,
            caps=Caps.resolve(
                {
                    "max_group_order": args.max_order,
                    "max_degree": args.max_degree,
                    "max_minor_dimension": args.max_minors,
                },
                settings,
            ),
            oracle=bool(getattr(args, "oracle", False)) or (
                args.command == "tower" and bool((settings.get("tower") or {}).get("oracle", False))
            ),
            output_path=Path(args.out) if args.out else None,
            output_format=args.format or getattr(args, "default_format", "json"),
            workers=args.workers if args.workers is not None else default_workers(settings),
        )
        log.debug("Running %s with caps %s", command, config.caps)
        return args.handler(args, config, settings)

    except OracleDisagreementError as e:
        print(f"Error: {e}", file=sys.stderr)
        print(json.dumps({"primary": e.primary, "oracle": e.oracle}, indent=2))
        return exit_code_for(e)
    except (BooktorError, FileNotFoundError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
