"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error (bad file, mismatched
tables, invalid recipe, ...).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

ALGO_NAMES = {"ref": "reference", "lut3": "lut3", "lut5": "lut5", "hybrid": "hybrid"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def load_config(path) -> tuple:
    """(ToleranceParams, OracleConfig, DensityWeights) from a JSON file; missing sections keep defaults."""
    from .categorize import ToleranceParams
    from .edge_oracle import OracleConfig
    from .trapper import DensityWeights

    doc = json.loads(Path(path).read_text()) if path else {}
    if not isinstance(doc, dict):
        raise ValueError("config must be a JSON object")
    unknown = set(doc) - {"tolerance", "oracle", "density"}
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")
    tol = doc.get("tolerance", {})
    if "k_tol_curve" in tol:
        tol = dict(tol, k_tol_curve=tuple(tol["k_tol_curve"]))
    try:
        return ToleranceParams(**tol), OracleConfig(**doc.get("oracle", {})), DensityWeights(**doc.get("density", {}))
    except TypeError as e:
        raise ValueError(str(e)) from None


def _write_json(path, text):
    if path in (None, "-"):
        print(text)
    else:
        Path(path).write_text(text + "\n")


def cmd_gen_corpus(a):
    from .corpus_gen import default_recipes, load_recipes, write_corpus

    recipes = load_recipes(a.recipes) if a.recipes else default_recipes(seed=0)
    paths = write_corpus(recipes, a.out, seed_offset=a.seed)
    print(f"wrote {len(paths)} pages to {a.out}")


def cmd_build_luts(a):
    from .lut_engine import build_luts, save_luts_file

    tol, oracle, weights = load_config(a.config)
    luts = build_luts(tol, oracle, weights)
    save_luts_file(luts, a.out)
    print(json.dumps(luts.report["memory"]))


def cmd_trap(a):
    from .lut_engine import load_luts_file
    from .raster_io import load_page, save_page
    from .trapper import run_algorithm

    algo = ALGO_NAMES[a.algo]
    luts = load_luts_file(a.luts) if a.luts else None
    if luts is None and algo != "reference":
        raise UsageError(f"--luts is required for --algo {a.algo}")
    page = load_page(a.inp)
    kw = {}
    if a.config:
        tol, oracle, weights = load_config(a.config)
        kw = dict(tolerance=tol, oracle=oracle, weights=weights)
    out, report, _ = run_algorithm(page, algo, a.mode, luts, bands=a.bands, **kw)
    save_page(out, a.out)
    if a.report:
        _write_json(a.report, report.to_json(indent=1))


def cmd_misreg(a):
    from .misreg_sim import PlaneShift, shift_plane
    from .raster_io import load_page, save_page

    save_page(shift_plane(load_page(a.inp), PlaneShift(a.plane, a.dx, a.dy)), a.out)


def cmd_eval(a):
    from .misreg_sim import load_region_map, measure_artifacts
    from .raster_io import load_page

    m = measure_artifacts(load_page(a.inp), load_region_map(a.regions))
    _write_json(a.report, json.dumps({"gap_pixels": m.gap_pixels, "halo_pixels": m.halo_pixels,
                                      "metric": "operationalized gap/halo counts"}))


def cmd_bench(a):
    from .bench import format_table, load_corpus, report_json, run_bench
    from .lut_engine import load_luts_file

    luts = load_luts_file(a.luts)
    corpus = load_corpus(a.corpus)
    if not corpus:
        raise ValueError(f"no .cmyk pages in {a.corpus}")
    results = run_bench(corpus, luts, a.repeat)
    _write_json(a.report, report_json(results))
    print(format_table(results), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="colortrap", description="Raster CMYK color trapping.")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("gen-corpus", help="render synthetic pages and region maps")
    g.add_argument("--out", required=True)
    g.add_argument("--recipes", help="JSON list of page recipes (default: the mixed corpus)")
    g.add_argument("--seed", type=int, default=0, help="added to every recipe seed")
    g.set_defaults(fn=cmd_gen_corpus)

    b = sub.add_parser("build-luts", help="build and serialize the TRAPLUT1 container")
    b.add_argument("--out", required=True)
    b.add_argument("--config")
    b.set_defaults(fn=cmd_build_luts)

    t = sub.add_parser("trap", help="trap one page")
    t.add_argument("--algo", required=True, choices=sorted(ALGO_NAMES))
    t.add_argument("--mode", default="dep", choices=["dep", "indep"])
    t.add_argument("--luts")
    t.add_argument("--in", dest="inp", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--report")
    t.add_argument("--config", help="expected configuration; must match the LUTs")
    t.add_argument("--bands", type=int, default=1)
    t.set_defaults(fn=cmd_trap)

    m = sub.add_parser("misreg", help="shift one color plane")
    m.add_argument("--plane", required=True, choices=list("CMYK"))
    m.add_argument("--dx", type=int, default=0)
    m.add_argument("--dy", type=int, default=0)
    m.add_argument("--in", dest="inp", required=True)
    m.add_argument("--out", required=True)
    m.set_defaults(fn=cmd_misreg)

    e = sub.add_parser("eval", help="count gap and halo artifacts")
    e.add_argument("--in", dest="inp", required=True)
    e.add_argument("--regions", required=True)
    e.add_argument("--report")
    e.set_defaults(fn=cmd_eval)

    be = sub.add_parser("bench", help="time all algorithms and modes over a corpus")
    be.add_argument("--corpus", required=True)
    be.add_argument("--luts", required=True)
    be.add_argument("--repeat", type=int, default=10)
    be.add_argument("--report")
    be.set_defaults(fn=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "bands", 1) < 1 or getattr(args, "repeat", 1) < 1:
            raise UsageError("--bands and --repeat must be >= 1")
        args.fn(args)
    except UsageError as e:
        print(f"colortrap: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return EXIT_OK if not e.code else EXIT_USAGE
    except (ValueError, OSError) as e:
        print(f"colortrap: error: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
