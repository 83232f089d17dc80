"""Command-line interface.

    cutproject validate    --scheme FILE
    cutproject analyze     --scheme FILE [--nmax N] [--dioph]
    cutproject diophantine --scheme FILE [--check auto|D|DF|flags|all] [--schedule 2^4..2^16]
    cutproject generate    --scheme FILE --box L --out DIR
    cutproject empirics    --scheme FILE --radii a,b,c [--box L] --out DIR [--figures]
    cutproject fixtures    --out DIR

Exit codes: 0 ok, 1 invalid scheme, 2 I/O or parse error, 3 unsupported
dimension, 4 singular position met while generating.
"""
import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from .algebra import decimal_string
from .complexity import analyze, complexity_exponent, prepare
from .diophantine import (DEFAULT_SCHEDULE, ParameterError as DiophParameterError,
                          check_D, check_DF, check_flag_condition)
from .empirics import (ParameterError as EmpiricsParameterError, cut_region_census,
                       empirical_complexity, empirical_repetitivity)
from .fixtures import FIXTURES, write_fixtures
from .geometry import InvalidWindow, UnsupportedDimension
from .scheme import (InvalidScheme, SchemeFormatError, SingularityError, generate_pattern,
                     load_scheme, reduce_cyclic, validate_scheme)

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_DIMENSION, EXIT_SINGULAR = 0, 1, 2, 3, 4


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- argument helpers

def _number(text):
    text = text.strip()
    if "^" in text:
        base, exp = text.split("^")
        return Fraction(int(base)) ** int(exp)
    return Fraction(text)


def parse_list(text):
    """"a,b,c" or a doubling range "2^4..2^16"."""
    try:
        if ".." in text:
            lo, hi = (_number(t) for t in text.split(".."))
            out = []
            r = lo
            while r <= hi:
                out.append(r)
                r *= 2
        else:
            out = [_number(t) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError("cannot parse list %r: %s" % (text, exc))
    if not out or out[0] <= 0 or any(b <= a for a, b in zip(out, out[1:])):
        raise UsageError("values must be positive and increasing: %r" % text)
    return out


def _plain(x):
    return int(x) if isinstance(x, Fraction) and x.denominator == 1 else str(x)


def _g(x, precision):
    return "" if x is None else "%.*g" % (precision, x)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _emit(obj):
    sys.stdout.write(json.dumps(obj, indent=1) + "\n")


def _load(args):
    s = load_scheme(args.scheme)
    if s.cyclic is not None:
        s = reduce_cyclic(s)
    return s


def _require_valid(s):
    report = validate_scheme(s)
    if not report["valid"]:
        _emit({"error": "invalid scheme", "validation": report})
        return False
    return True


# ---------------------------------------------------------------- commands

def cmd_validate(args):
    s = load_scheme(args.scheme)
    reduced = s.cyclic is not None
    if reduced:
        s = reduce_cyclic(s)
    report = validate_scheme(s)
    report["cyclic_reduced"] = reduced
    _emit(report)
    return EXIT_OK if report["valid"] else EXIT_INVALID


def _lr_block(s, args, workers):
    """Dispatch on homogeneity and combine with C into the overall LR line."""
    p = prepare(s)
    rep = complexity_exponent(p)
    if not rep.C:
        return {"C": False, "LR": "LR: fails (C fails)", "runs": {}}, {}
    report = analyze(p, args.nmax)
    homog = report["homogeneity"]
    check = args.check
    if check == "auto":
        check = "D" if homog == "homogeneous" or homog.startswith("weakly") else "DF+flags"
    results = {}
    schedule = args.schedule
    if check in ("D", "all"):
        results["D"] = check_D(p, schedule, workers)
    if check in ("DF", "DF+flags", "all"):
        results["DF"] = check_DF(p, schedule, args.scale_n, workers)
    if check in ("flags", "DF+flags", "all"):
        results["flags"] = check_flag_condition(p, schedule, workers)
    if "D" in results and check != "all":
        v = results["D"]["verdict"]
        lr = {"certified": "LR: certified-consistent",
              "empirically-consistent": "LR: empirically-consistent",
              "empirically-failing": "LR: fails (D necessary)"}[v]
    elif "flags" in results:
        v = results["flags"]["verdict"]
        lr = "LR: fails (flag condition necessary)" if v == "empirically-failing" \
            else "LR: empirically-consistent"
    else:
        v = results["DF"]["verdict"] if "DF" in results else results["D"]["verdict"]
        lr = "LR: empirically-consistent (D_F sufficient)" if v != "empirically-failing" \
            else "LR: undecided (D_F failing is not a proof of failure)"
    block = {"C": True, "homogeneity": homog, "dispatch": check, "LR": lr,
             "runs": {name: _result_json(res) for name, res in results.items()}}
    return block, results


def _result_json(res):
    out = {"verdict": res["verdict"]}
    for key in ("note", "reason", "aggregate_min"):
        if res.get(key) is not None:
            out[key] = res[key]
    if "supporting_certificates" in res:
        out["supporting_certificates"] = res["supporting_certificates"]
    out["runs"] = []
    for run in res["runs"]:
        item = {k: v for k, v in run.items() if k != "estimate"}
        item["estimate"] = run["estimate"].to_json()
        out["runs"].append(item)
    return out


def cmd_analyze(args):
    s = _load(args)
    if not _require_valid(s):
        return EXIT_INVALID
    report = analyze(s, args.nmax)
    if args.dioph:
        report["diophantine"], _ = _lr_block(s, args, args.threads)
    _emit(report)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "analyze.json"), "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=1)
            fh.write("\n")
    return EXIT_OK


def cmd_diophantine(args):
    s = _load(args)
    if not _require_valid(s):
        return EXIT_INVALID
    block, results = _lr_block(s, args, args.threads)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for name, res in results.items():
            for i, run in enumerate(res["runs"]):
                est = run["estimate"]
                width = max([len(r) - 3 for r in est.csv_rows(args.precision)] + [0])
                header = ["R", "target_index", "c_R"] + ["w%d" % (j + 1) for j in range(width)]
                _write_csv(os.path.join(args.out, "diophantine_%s_%d.csv" % (name, i)),
                           header, est.csv_rows(args.precision))
        if args.figures:
            from .figures import diophantine_figure
            diophantine_figure(results, os.path.join(args.out, "diophantine.png"))
    _emit(block)
    return EXIT_OK


def _points_rows(pattern, precision):
    rows = []
    for i in range(len(pattern)):
        x = pattern.exact_physical(i)
        label = pattern.label(i)
        rows.append([decimal_string(v, precision) for v in x] + [label or ""]
                    + [str(int(c)) for c in pattern.coords[i]])
    return rows


def cmd_generate(args):
    s = _load(args)
    if not _require_valid(s):
        return EXIT_INVALID
    if args.box is None:
        raise UsageError("--box is required")
    pattern = generate_pattern(s, args.box, args.threads)
    os.makedirs(args.out, exist_ok=True)
    header = ["x%d" % (j + 1) for j in range(s.d)] + ["label"] + ["g%d" % (j + 1) for j in range(s.k)]
    path = os.path.join(args.out, "points.csv")
    _write_csv(path, header, _points_rows(pattern, args.precision))
    if args.figures:
        from .figures import points_figure
        points_figure(pattern, os.path.join(args.out, "points.png"))
    _emit({"points": len(pattern), "box": _plain(Fraction(args.box)), "file": path})
    return EXIT_OK


def cmd_empirics(args):
    s = _load(args)
    if not _require_valid(s):
        return EXIT_INVALID
    if args.radii is None:
        raise UsageError("--radii is required")
    if s.n > 2 and not args.skip_cut_regions:
        raise UnsupportedDimension("cut regions need internal dimension <= 2 "
                                   "(pass --skip-cut-regions)")
    radii = args.radii
    alpha = complexity_exponent(s).alpha
    box = args.box if args.box is not None else max(Fraction(50), 4 * radii[-1])
    os.makedirs(args.out, exist_ok=True)
    P = args.precision
    comp = empirical_complexity(s, radii, alpha, L_min=box, workers=args.threads)
    _write_csv(os.path.join(args.out, "complexity.csv"), ["r", "L", "p_hat", "p_hat_over_r_alpha"],
               [[_plain(r["r"]), _plain(r["L"]), r["p_hat"], _g(r["ratio"], P)] for r in comp["rows"]])
    rep = empirical_repetitivity(s, radii, box, seed=args.seed, workers=args.threads)
    _write_csv(os.path.join(args.out, "repetitivity.csv"), ["r", "rho_hat", "rho_hat_over_r"],
               [[_plain(r["r"]),
                 ">=%s" % _plain(rep["L"]) if r["insufficient_box"] else _g(r["rho_hat"], P),
                 "" if r["insufficient_box"] else _g(r["ratio"], P)] for r in rep["rows"]])
    cut_rows = []
    if not args.skip_cut_regions:
        for r in radii:
            c = cut_region_census(s, r, args.threads)
            vol = c.min_volume
            cut_rows.append({"r": r, "regions": c.count, "cutters": c.cutter_count,
                             "min_volume": vol, "product": float(vol) * float(r) ** s.d})
        _write_csv(os.path.join(args.out, "cutregions.csv"),
                   ["r", "regions", "cutters", "min_volume", "pw_product"],
                   [[_plain(c["r"]), c["regions"], c["cutters"], decimal_string(c["min_volume"], P),
                     _g(c["product"], P)] for c in cut_rows])
    if args.figures:
        from .figures import empirics_figures
        empirics_figures(comp, rep, cut_rows, args.out)
    _emit({"alpha": alpha, "box": _plain(box), "complexity_drift": comp["drift"],
           "complexity_spread": comp["spread"], "files": sorted(os.listdir(args.out))})
    return EXIT_OK


def cmd_fixtures(args):
    names = args.name or None
    if names:
        unknown = [n for n in names if n not in FIXTURES]
        if unknown:
            raise UsageError("unknown fixtures: %s" % ", ".join(unknown))
    paths = write_fixtures(args.out, names)
    _emit({"written": [paths[k] for k in sorted(paths)]})
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser():
    parser = argparse.ArgumentParser(prog="cutproject",
                                     description="Analyse polytopal cut-and-project schemes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=False):
        p.add_argument("--scheme", required=True, help="scheme file (JSON)")
        p.add_argument("--out", required=out_required, help="output directory")
        p.add_argument("--precision", type=int, default=12, help="digits in CSV outputs")
        p.add_argument("--threads", type=int, default=1, help="worker cap")
        p.add_argument("--figures", action="store_true",
                       help="also write PNG figures next to the CSVs (needs matplotlib)")

    p = sub.add_parser("validate", help="check the scheme assumptions")
    p.add_argument("--scheme", required=True)
    p.set_defaults(func=cmd_validate)

    for name, func, help_text in (("analyze", cmd_analyze, "complexity and homogeneity report"),
                                  ("diophantine", cmd_diophantine, "Diophantine diagnostics")):
        p = sub.add_parser(name, help=help_text)
        common(p)
        p.add_argument("--nmax", type=int, default=12, help="bound for weak homogeneity search")
        p.add_argument("--schedule", type=parse_list, default=list(DEFAULT_SCHEDULE),
                       help="radii R, e.g. 2^4..2^16 or 16,64,256")
        p.add_argument("--scale-n", dest="scale_n", type=int, default=1,
                       help="run D_F on (1/N) Gamma as well")
        p.add_argument("--check", choices=["auto", "D", "DF", "flags", "all"], default="auto")
        if name == "analyze":
            p.add_argument("--dioph", action="store_true", help="embed the Diophantine verdict")
        p.set_defaults(func=func)

    p = sub.add_parser("generate", help="write points.csv")
    common(p, out_required=True)
    p.add_argument("--box", type=_number, help="physical half-width L")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("empirics", help="write complexity, repetitivity and cut-region tables")
    common(p, out_required=True)
    p.add_argument("--radii", type=parse_list)
    p.add_argument("--box", type=_number, help="physical half-width L (default max(50, 4 r_max))")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--skip-cut-regions", action="store_true")
    p.set_defaults(func=cmd_empirics)

    p = sub.add_parser("fixtures", help="write the bundled example schemes")
    p.add_argument("--out", required=True)
    p.add_argument("--name", action="append", help="fixture name (repeatable)")
    p.set_defaults(func=cmd_fixtures)
    return parser


def _fail(code, payload):
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_IO
    if getattr(args, "precision", 1) < 1:
        return _fail(EXIT_IO, {"error": "precision must be at least 1"})
    try:
        return args.func(args)
    except SchemeFormatError as exc:
        return _fail(EXIT_IO, {"error": str(exc), "line": exc.line, "column": exc.column})
    except OSError as exc:
        return _fail(EXIT_IO, {"error": str(exc)})
    except (UsageError, DiophParameterError, EmpiricsParameterError) as exc:
        return _fail(EXIT_IO, {"error": str(exc)})
    except (InvalidScheme, InvalidWindow) as exc:
        return _fail(EXIT_INVALID, {"error": str(exc)})
    except UnsupportedDimension as exc:
        return _fail(EXIT_DIMENSION, {"error": str(exc)})
    except SingularityError as exc:
        return _fail(EXIT_SINGULAR, {"error": str(exc), "lattice_point": list(exc.coords)})


if __name__ == "__main__":
    sys.exit(main())
