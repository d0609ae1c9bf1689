"""Command-line entry point: ``commonness <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage or format error,
3 budget exceeded.  Exact rationals print as ``num/den``.
"""

import argparse
import csv
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import coloropt, decomp, eigsearch, kernel, linear, quadrature, reproduce

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def fixture_path(name):
    return resources.files("commonness") / "fixtures" / name


def _read_json(path):
    p = Path(path)
    if not p.exists():
        # "fixtures/<name>" also resolves to the bundled copy when run outside the repo
        bundled = fixture_path(p.name)
        if p.parent.name == "fixtures" and bundled.is_file():
            return json.loads(bundled.read_text())
        raise FileNotFoundError(path)
    return json.loads(p.read_text())


def _load_phi(path):
    if path == "builtin":
        return quadrature.certificate_phi()
    return quadrature.StepFunction.from_json(_read_json(path))


def _weight(spec, n, mode="probability"):
    """``const:<q>``, ``indicator:<x1,x2,...>`` or a WeightFn JSON path."""
    if spec.startswith("const:"):
        return linear.WeightFn.constant(n, Fraction(spec[6:]), mode)
    if spec.startswith("indicator:"):
        members = [int(t) for t in spec[10:].split(",") if t]
        return linear.WeightFn.indicator(n, members)
    f = linear.WeightFn.from_json(_read_json(spec))
    if n is not None and f.n != n:
        raise ValueError(f"--n {n} does not match the file's n = {f.n}")
    return f


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def cmd_count(args):
    L = linear.LinearForm.parse(args.form)
    if args.f is None:
        print(linear.count_solutions(L, args.n))
        return EXIT_OK
    f = _weight(args.f, args.n, "signed")
    if args.method == "naive":
        print(linear.weighted_count(L, f))
    else:
        print(linear.count_via_convolution(linear.ConvolutionPlan.for_n(L, f.n, args.modulus), f))
    return EXIT_OK


def cmd_deficit(args):
    L = linear.LinearForm.parse(args.form)
    print(linear.deficit(L, _weight(args.f, args.n)))
    return EXIT_OK


def cmd_matrix(args):
    m = decomp.build_matrix(kernel.SymmetricPair.parse(args.pair), args.n)
    _emit(m.export_text(), args.out)
    return EXIT_OK


def _n_values(text):
    if ":" in text:
        lo, hi = (int(t) for t in text.split(":"))
        return list(range(lo, hi + 1))
    return [int(t) for t in text.split(",")]


def cmd_psd(args):
    pair = kernel.SymmetricPair.parse(args.pair)
    out = []
    for n, res in decomp.psd_scan(pair, _n_values(args.n)):
        row = {"n": n, "psd": res.psd}
        if not res.psd:
            row["certificate"] = [str(x) for x in res.certificate]
            row["value"] = str(res.value)
        out.append(row)
    _emit(_json({"a": pair.a, "b": pair.b, "verdicts": out}), args.out)
    return EXIT_OK


def cmd_kernel_eval(args):
    pair = kernel.SymmetricPair.parse(args.pair)
    g = args.grid
    rows = [["u", "v", "H"]]
    for i in range(g + 1):
        for j in range(g + 1):
            u, v = Fraction(i, g), Fraction(j, g)
            h = kernel.H(pair, u, v)
            val = str(h) if args.digits is None else f"{float(h):.{args.digits}f}"
            rows.append([str(u), str(v), val])
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        csv.writer(out, lineterminator="\n").writerows(rows)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_quad(args):
    pair = kernel.SymmetricPair.parse(args.pair)
    phi = _load_phi(args.phi)
    if args.psi:
        print(quadrature.integrate_bilinear(pair, phi, _load_phi(args.psi)))
    else:
        print(quadrature.integrate_quadratic(pair, phi))
    return EXIT_OK


def cmd_eig_search(args):
    pair = kernel.SymmetricPair.parse(args.pair)
    eig, cert = eigsearch.discover(pair, args.N, args.levels, args.denom, args.tol, args.method)
    if args.out:
        cert.phi.dump(args.out)
    print(_json({
        "a": pair.a, "b": pair.b, "N": args.N,
        "lambda_min": eig.lambda_min, "residual": eig.residual,
        "pieces": len(cert.phi), "value": str(cert.value), "verdict": cert.verdict,
    }), end="")
    return EXIT_OK


def cmd_scan(args):
    rows = eigsearch.scan_pairs(args.a_max, args.b_max, args.N, args.tol, args.levels,
                                args.denom, args.workers)
    _emit(eigsearch.scan_csv(rows), args.out)
    if args.certs_dir:
        d = Path(args.certs_dir)
        d.mkdir(parents=True, exist_ok=True)
        for row in rows:
            if row.phi is not None:
                row.phi.dump(d / f"phi_{row.pair.a}_{row.pair.b}.json")
    return EXIT_OK


def cmd_witness(args):
    pair = kernel.SymmetricPair.parse(args.pair)
    phi = _load_phi(args.phi)
    if args.n:
        reps = [decomp.witness_uncommon(decomp.WitnessParams(pair, phi, args.n, args.epsilon))]
    else:
        reps = decomp.scan_witness(pair, phi, args.n_max)
    _emit(_json([r.to_json() for r in reps]), args.out)
    return EXIT_OK if reps[-1].deficit < 0 else EXIT_FAIL


def _coloring_report(count, coloring):
    return _json({"count": count, "coloring": coloring.to_json()})


def cmd_color_brute(args):
    res = coloropt.brute_min(coloropt.LinearSystem.parse(args.form), args.n, args.r, args.budget)
    _emit(_coloring_report(res.min_count, res.argmin), args.out)
    return EXIT_OK


def cmd_color_local(args):
    res = coloropt.local_search(coloropt.LinearSystem.parse(args.form), args.n, args.r,
                                args.restarts, args.seed, args.budget, args.workers)
    _emit(_coloring_report(res.best_count, res.coloring), args.out)
    return EXIT_OK


def cmd_growth(args):
    table = coloropt.growth_table(coloropt.LinearSystem.parse(args.form),
                                  [int(t) for t in args.n_list.split(",")], args.r,
                                  args.restarts, args.seed, args.budget, workers=args.workers)
    text = table.to_csv()
    text += f"# slope,{'undefined' if table.slope is None else repr(table.slope)}\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_rado(args):
    cert = coloropt.rado_threshold(coloropt.LinearSystem.parse(args.system), args.r, args.n_max,
                                   args.budget)
    if cert is None:
        print(_json({"found": False, "n_max": args.n_max}), end="")
        return EXIT_FAIL
    print(_json({"found": True, "N0": cert.N0, "r": cert.r, "epsilon": str(cert.epsilon)}), end="")
    return EXIT_OK


def cmd_verify_paper(args):
    failed = 0
    for check in reproduce.run_headline():
        print(check.line(), flush=True)
        failed += not check.passed
    return EXIT_FAIL if failed else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="commonness", description=__doc__.splitlines()[0])
    p.add_argument("--workers", type=int, default=1, help="process cap for parallel steps")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("count", cmd_count, "solution count T_L(1), or T_L(f) with --f")
    sp.add_argument("--form", required=True, help="coefficients, e.g. 1,1,-1")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--f", help="const:<q> | indicator:<x,..> | WeightFn JSON")
    sp.add_argument("--method", choices=("convolution", "naive"), default="convolution")
    sp.add_argument("--modulus", type=int)

    sp = add("deficit", cmd_deficit, "t_L(f) + t_L(1-f) - 2^(1-k)")
    sp.add_argument("--form", required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--n", type=int)

    sp = add("matrix", cmd_matrix, "export m_n^(a,b) as text triples")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out")

    sp = add("psd", cmd_psd, "exact PSD verdicts for m_n^(a,b)")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--n", required=True, help="n, n1,n2,... or lo:hi")
    sp.add_argument("--out")

    sp = add("kernel-eval", cmd_kernel_eval, "CSV grid of H_(a,b)")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--grid", type=int, default=10, help="grid denominator")
    sp.add_argument("--digits", type=int, help="print decimals instead of exact rationals")
    sp.add_argument("--out")

    sp = add("quad", cmd_quad, "exact double integral of H against step functions")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--phi", required=True, help="StepFunction JSON or 'builtin'")
    sp.add_argument("--psi")

    sp = add("eig-search", cmd_eig_search, "discretize, least eigenvector, round, certify")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--N", type=int, default=200)
    sp.add_argument("--levels", type=int, default=19)
    sp.add_argument("--denom", type=int, default=200)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--method", choices=("dense", "power"), default="dense")
    sp.add_argument("--out", help="write the rounded step function here")

    sp = add("scan", cmd_scan, "eigen search over coprime pairs a < b")
    sp.add_argument("--a-max", type=int, default=4)
    sp.add_argument("--b-max", type=int, default=9)
    sp.add_argument("--N", type=int, default=200)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--levels", type=int, default=19)
    sp.add_argument("--denom", type=int)
    sp.add_argument("--certs-dir")
    sp.add_argument("--out")

    sp = add("witness", cmd_witness, "finite-n uncommonness witness from a step function")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--phi", default="builtin")
    sp.add_argument("--n", type=int)
    sp.add_argument("--n-max", type=int, default=20000)
    sp.add_argument("--epsilon", type=Fraction)
    sp.add_argument("--out")

    for name, fn, help_ in (("color-brute", cmd_color_brute, "exhaustive minimum"),
                            ("color-local", cmd_color_local, "local search upper bound")):
        sp = add(name, fn, help_)
        sp.add_argument("--form", required=True, help="row or rows 'a,b,c;d,e,f'")
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--r", type=int, default=2)
        sp.add_argument("--out")
        if name == "color-brute":
            sp.add_argument("--budget", type=int, default=coloropt.DEFAULT_COLORING_BUDGET)
        else:
            sp.add_argument("--restarts", type=int, default=8)
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--budget", type=int, help="max flips per restart")

    sp = add("growth", cmd_growth, "minimum monochromatic counts across n")
    sp.add_argument("--form", required=True)
    sp.add_argument("--n-list", required=True)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--restarts", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--out")

    sp = add("rado", cmd_rado, "least N0 forcing a monochromatic solution")
    sp.add_argument("--system", required=True)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--n-max", type=int, default=20)
    sp.add_argument("--budget", type=int, default=coloropt.DEFAULT_COLORING_BUDGET)

    add("verify-paper", cmd_verify_paper, "run the headline reproduction checks")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except coloropt.BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename or exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
