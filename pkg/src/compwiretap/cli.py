"""Command-line front end.

Every subcommand is deterministic given its inputs and seed, and the
JSON output is byte-stable across runs.  Exit codes: 0 success, 1 input
or parse error, 2 precondition violation, 3 verdict failure (an
invariance check that did not pass).

Function sources given to ``--f``/``--g`` are either an inline
polynomial expression or ``@path`` to a file holding an expression or a
truth table (CSV or JSON; auto-detected).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import boolfn, channels, funcdsl, invariance
from .boolfn import PreconditionError


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; route them through
    # the input-error path (exit 1) instead.
    def error(self, message):
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# Input loading
# ---------------------------------------------------------------------------

def _looks_like_table(text: str) -> bool:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return True
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#") or line.lower().replace(" ", "") == "index,value":
            return True
        return "," in line
    return False


def _load_function(source: str, declared_n: int | None):
    """Resolve a --f/--g source to (poly, table) views."""
    if source.startswith("@"):
        with open(source[1:], "r", encoding="utf-8") as handle:
            text = handle.read()
        if _looks_like_table(text):
            table = funcdsl.parse_table(text)
            if declared_n is not None and table.n != declared_n:
                raise funcdsl.ParseError(
                    f"table has n={table.n}, --n says {declared_n}")
            return boolfn.wht(table), table
        poly = funcdsl.parse_poly(text, declared_n)
    else:
        poly = funcdsl.parse_poly(source, declared_n)
    return poly, boolfn.inverse_wht(poly)


def _load_pair(args) -> channels.WiretapSpec:
    f_poly, f_table = _load_function(args.f, args.n)
    g_poly, g_table = _load_function(args.g, args.n)
    n = max(f_poly.n, g_poly.n)
    if f_poly.n != n:
        f_poly = f_poly.with_n(n)
        f_table = boolfn.inverse_wht(f_poly)
    if g_poly.n != n:
        g_poly = g_poly.with_n(n)
        g_table = boolfn.inverse_wht(g_poly)
    return channels.WiretapSpec(f_table, g_table, f_poly, g_poly)


def _resolve_psi_c4(args):
    name = args.psi
    if name not in invariance.PSI_CATALOG:
        raise ValueError(
            f"unknown test function {name!r}; "
            f"choices: {sorted(invariance.PSI_CATALOG)}")
    tf = invariance.PSI_CATALOG[name]
    c4 = tf.c4 if args.C is None else args.C
    return tf, c4


# ---------------------------------------------------------------------------
# Subcommands; each returns (report dict, exit code)
# ---------------------------------------------------------------------------

def _cmd_analyze(args):
    poly, table = _load_function(args.f, args.n)
    profile = boolfn.influence_profile(poly)
    terms = []
    for mask in sorted(poly.coeffs, key=lambda m: (m.bit_count(), m)):
        value = poly.coeffs[mask]
        terms.append({
            "variables": [j + 1 for j in range(poly.n) if mask >> j & 1],
            "coefficient": float(value),
            "exact": funcdsl._coeff_string(value),
        })
    report = {
        "n": poly.n,
        "expression": funcdsl.serialize_poly(poly),
        "terms": terms,
        "mean": float(boolfn.mean(poly)),
        "variance": float(boolfn.variance(poly)),
        "degree": boolfn.degree(poly),
        "term_count": boolfn.term_count(poly),
        "influences": [float(v) for v in profile.influences],
        "max_influence": float(profile.max_influence),
        "boolean_valued": boolfn.is_boolean_valued(table),
    }
    return report, 0


def _cmd_channel(args):
    spec = _load_pair(args)
    joint = channels.joint_distribution(spec)
    forward = channels.classic_channel(spec)
    posterior = channels.posterior_channel(spec)
    estimator = channels.map_estimator(spec)
    additive = channels.additive_noise(spec)
    additive_dict = additive.to_dict()
    additive_dict["poly"] = funcdsl.serialize_poly(additive.poly)
    try:
        multiplicative = channels.multiplicative_noise(spec)
        mult_dict = multiplicative.to_dict()
        mult_dict["poly"] = funcdsl.serialize_poly(multiplicative.poly)
    except PreconditionError as exc:
        mult_dict = {"applicable": False, "reason": str(exc)}
    report = {
        "n": spec.n,
        "f": funcdsl.serialize_poly(spec.f_poly),
        "g": funcdsl.serialize_poly(spec.g_poly),
        "joint": joint.to_dict(),
        "classic": forward.to_dict(),
        "posterior": posterior.to_dict(),
        "map": [[v, estimator[v]] for v in sorted(estimator)],
        "success_probability": channels.eve_success_probability(spec),
        "additive": additive_dict,
        "multiplicative": mult_dict,
    }
    return report, 0


def _cmd_commute(args):
    spec = _load_pair(args)
    result = channels.commutes(spec)
    report = {
        "n": spec.n,
        "f": funcdsl.serialize_poly(spec.f_poly),
        "g": funcdsl.serialize_poly(spec.g_poly),
        **result.to_dict(),
        "success_probability": channels.eve_success_probability(spec),
    }
    return report, 0


def _cmd_invariance(args):
    tf, c4 = _resolve_psi_c4(args)
    f_poly, _ = _load_function(args.f, args.n)
    bounds_info = {"C": c4}

    if args.g is None:
        target = f_poly
        mode = "single"
        eps = boolfn.max_influence(f_poly)
        try:
            bound = invariance.corollary_bound(target, c4, eps)
            bounds_info["kind"] = "low-influence"
        except PreconditionError:
            bound = invariance.basic_bound(target, c4)
            bounds_info["kind"] = "basic"
        bounds_info["eps"] = float(eps)
    else:
        spec = _load_pair(args)
        f_poly, g_poly = spec.f_poly, spec.g_poly
        both_boolean = (boolfn.is_boolean_valued(spec.f_table)
                        and boolfn.is_boolean_valued(spec.g_table))
        if both_boolean:
            mode = "multiplicative"
            target = boolfn.mul(f_poly, g_poly)
            bound = invariance.multiplicative_bound(f_poly, g_poly, c4)
            variant = invariance.multiplicative_bound(
                f_poly, g_poly, c4, use_product_degree=True)
            k_factor = boolfn.degree(f_poly) * boolfn.degree(g_poly)
            k_product = boolfn.degree(target)
            bounds_info.update({
                "kind": "multiplicative",
                "k_factor_degrees": k_factor,
                "k_product_degree": k_product,
                "l": boolfn.term_count(f_poly) * boolfn.term_count(g_poly),
                "literal": bound,
                "degree_of_product_variant": variant,
                "literal_exceeds_variant": bound > variant,
            })
            if bound > variant:
                bounds_info["note"] = (
                    "the k = deg(f)*deg(g) exponent makes the literal bound "
                    f"{bound / variant:.6g}x larger than the deg(f*g) "
                    "variant; the variant is the tighter valid bound")
        else:
            mode = "additive"
            target = boolfn.sub(f_poly, g_poly)
            bound = invariance.additive_bound(f_poly, g_poly, c4)
            bounds_info["kind"] = "additive"
            bounds_info["k"] = boolfn.degree(f_poly) * boolfn.degree(g_poly)
        bounds_info["eps"] = float(
            max(boolfn.max_influence(f_poly), boolfn.max_influence(g_poly)))

    psi = invariance.TestFunction(tf.name, tf.fn, c4)
    result = invariance.verify_invariance(
        target, psi, bound, samples=args.samples, seed=args.seed, z=args.z)
    report = {
        "mode": mode,
        "n": target.n,
        "noise": funcdsl.serialize_poly(target),
        "bound_info": bounds_info,
        **result.to_dict(),
    }
    return report, 0 if result.passed else 3


def _cmd_lemmas(args):
    spec = _load_pair(args)
    report = {
        "n": spec.n,
        "f": funcdsl.serialize_poly(spec.f_poly),
        "g": funcdsl.serialize_poly(spec.g_poly),
        **invariance.lemma_suite(spec.f_poly, spec.g_poly).to_dict(),
    }
    return report, 0


def _cmd_moments(args):
    if args.dist not in invariance.DISTRIBUTIONS:
        raise ValueError(
            f"unknown distribution {args.dist!r}; "
            f"choices: {sorted(invariance.DISTRIBUTIONS)}")
    dist = invariance.DISTRIBUTIONS[args.dist]
    report = invariance.hypothesis_check(dist, args.samples, args.seed)
    return report.to_dict(), 0


# ---------------------------------------------------------------------------
# Output formatting
# ---------------------------------------------------------------------------

def _pretty_lines(obj, indent=0, out=None):
    pad = "  " * indent
    if isinstance(obj, dict):
        for key in obj:
            value = obj[key]
            if isinstance(value, (dict, list)):
                out.append(f"{pad}{key}:")
                _pretty_lines(value, indent + 1, out)
            else:
                out.append(f"{pad}{key}: {value}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, (dict, list)):
                _pretty_lines(item, indent + 1, out)
            else:
                out.append(f"{pad}- {item}")
    else:
        out.append(f"{pad}{obj}")
    return out


def _csv_rows(obj, prefix, rows):
    if isinstance(obj, dict):
        for key in sorted(obj):
            _csv_rows(obj[key], f"{prefix}.{key}" if prefix else key, rows)
    elif isinstance(obj, list):
        if obj and all(isinstance(r, list) for r in obj):
            # matrix: header row then one row per matrix row
            rows.append([prefix, "rows", len(obj), "cols",
                         len(obj[0]) if obj else 0])
            for i, row in enumerate(obj):
                rows.append([f"{prefix}[{i}]"] + list(row))
        else:
            rows.append([prefix] + list(obj))
    else:
        rows.append([prefix, obj])


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    if fmt == "pretty":
        return "\n".join(_pretty_lines(report, 0, [])) + "\n"
    if fmt == "csv":
        rows = []
        _csv_rows(report, "", rows)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(rows)
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="compwiretap",
        description="Fourier analysis of Boolean functions and "
                    "wiretap-channel constructions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_f=True, need_g=False, optional_g=False):
        if need_f:
            p.add_argument("--f", required=True,
                           help="polynomial expression or @file for f")
        if need_g:
            p.add_argument("--g", required=True,
                           help="polynomial expression or @file for g")
        elif optional_g:
            p.add_argument("--g", default=None,
                           help="optional second function g")
        p.add_argument("--n", type=int, default=None,
                       help="declared number of variables")
        p.add_argument("--format", choices=("json", "csv", "pretty"),
                       default="json")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    def sampling(p):
        p.add_argument("--samples", type=int, default=1_000_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--z", type=float, default=4.0)

    p = sub.add_parser("analyze", help="Fourier coefficients and influences")
    common(p)
    p.set_defaults(run=_cmd_analyze)

    p = sub.add_parser("channel", help="joint, forward/posterior channels, "
                                       "MAP rule and noise models")
    common(p, need_g=True)
    p.set_defaults(run=_cmd_channel)

    p = sub.add_parser("commute", help="can the estimate always be exact?")
    common(p, need_g=True)
    p.set_defaults(run=_cmd_commute)

    p = sub.add_parser("invariance", help="verify a noise bound by Monte Carlo")
    common(p, optional_g=True)
    p.add_argument("--psi", default="cos",
                   help="test function name (default cos)")
    p.add_argument("--C", type=float, default=None,
                   help="override the catalog bound on sup|psi''''|")
    sampling(p)
    p.set_defaults(run=_cmd_invariance)

    p = sub.add_parser("lemmas", help="check the pairwise inequalities")
    common(p, need_g=True)
    p.set_defaults(run=_cmd_lemmas)

    p = sub.add_parser("moments", help="moment-hypothesis check")
    p.add_argument("--dist", required=True,
                   help=f"distribution name: {sorted(invariance.DISTRIBUTIONS)}")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv", "pretty"),
                   default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(run=_cmd_moments)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        report, code = args.run(args)
        rendered = _render(report, args.format)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(rendered)
        else:
            sys.stdout.write(rendered)
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 2
    except (funcdsl.ParseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return code


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
