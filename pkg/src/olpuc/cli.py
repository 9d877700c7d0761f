"""Command-line front end.

    olpuc <command> -m measure.json -n 1,1 -l 16 [-o out.csv|out.json]

Exit status: 0 when every residual is under tolerance, 1 when some check
fails, 2 on bad input (message on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import cd_kernel, suites, toda
from .errors import OlpucError, ParseError
from .factorization import gauss_borel, phi_matrix, verblunsky
from .measure import FACTOR_KINDS, KINDS, DeformationTimes, Factor, MeasureSpec
from .moments import build
from .ordering import OrderingSpec, exponents

COMMANDS = ("moments", "factorize", "verblunsky", "cd-check", "second-kind", "evolve", "discrete-step",
            "tau-check", "bilinear-check", "verify-all")


def _complex(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(isinstance(x, (int, float)) for x in value):
        return complex(value[0], value[1])
    raise ParseError(f"{where}: expected a number or [re, im], got {value!r}")


def _times(obj, where: str) -> DeformationTimes:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object with t1/t2 lists")
    t1 = [_complex(x, f"{where}.t1[{i}]") for i, x in enumerate(obj.get("t1", []))]
    t2 = [_complex(x, f"{where}.t2[{i}]") for i, x in enumerate(obj.get("t2", []))]
    return DeformationTimes(tuple(t1), tuple(t2))


def _factor(obj, where: str) -> Factor:
    if not isinstance(obj, dict) or obj.get("kind") not in FACTOR_KINDS:
        raise ParseError(f"{where}.kind: expected one of {', '.join(FACTOR_KINDS)}")
    kind = obj["kind"]
    kw = {}
    if kind == "toda_exp":
        kw["times"] = _times(obj.get("times"), f"{where}.times")
    elif kind.startswith("miwa"):
        if "w" not in obj:
            raise ParseError(f"{where}.w: missing Miwa parameter")
        kw["w"] = _complex(obj["w"], f"{where}.w")
    else:
        if "lambda" not in obj and "lam" not in obj:
            raise ParseError(f"{where}.lambda: missing")
        kw["lam"] = _complex(obj.get("lambda", obj.get("lam")), f"{where}.lambda")
    return Factor(kind, **kw)


def parse_measure(obj, where: str = "$") -> MeasureSpec:
    """Build a spec from the decoded JSON object."""
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    kind = obj.get("kind")
    if kind not in KINDS:
        raise ParseError(f"{where}.kind: expected one of {', '.join(KINDS)}, got {kind!r}")
    coeffs = obj.get("coeffs", {})
    if not isinstance(coeffs, dict):
        raise ParseError(f"{where}.coeffs: expected an object")
    items = []
    for key, val in coeffs.items():
        try:
            n = int(key)
        except ValueError:
            raise ParseError(f"{where}.coeffs: key {key!r} is not an integer") from None
        c = _complex(val, f"{where}.coeffs[{key!r}]")
        if c != 0:
            items.append((n, c))
    params = obj.get("params", {})
    if not isinstance(params, dict) or not all(isinstance(v, (int, float)) for v in params.values()):
        raise ParseError(f"{where}.params: expected a map of names to reals")
    decs = obj.get("decorations", [])
    if not isinstance(decs, list):
        raise ParseError(f"{where}.decorations: expected a list")
    factors = tuple(_factor(d, f"{where}.decorations[{i}]") for i, d in enumerate(decs))
    if kind == "fourier_table" and not items:
        raise ParseError(f"{where}.coeffs: fourier_table needs at least one coefficient")
    try:
        if kind == "decorated":
            if "base" not in obj:
                raise ParseError(f"{where}.base: decorated spec needs a base")
            base = parse_measure(obj["base"], f"{where}.base")
            return base.decorate(*factors) if factors else base
        spec = MeasureSpec(kind, coeff_items=tuple(sorted(items)),
                           param_items=tuple(sorted((k, float(v)) for k, v in params.items())))
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None
    return spec.decorate(*factors) if factors else spec


def load_measure(path) -> MeasureSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_measure(obj, str(path))


def _parse_ordering(text: str) -> OrderingSpec:
    try:
        return OrderingSpec.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ordering must be 'n+,n-' with positive integers, got {text!r}") from None


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="olpuc", description="Orthogonal Laurent polynomials on the unit circle.")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-m", "--measure", required=True, help="measure spec JSON file")
    common.add_argument("-n", "--ordering", type=_parse_ordering, default=OrderingSpec(1, 1), help="n+,n- (default 1,1)")
    common.add_argument("-l", "--size", type=int, default=16, help="truncation size l (default 16)")
    common.add_argument("-o", "--output", help="output file; format from --format or the extension")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--points", type=int, default=20, help="random test points per check")
    common.add_argument("--seed", type=int, default=42, help="seed for random test points")
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("evolve", "tau-check"):
            p.add_argument("--t11", type=_parse_complex, default=0.1 if name == "evolve" else 0.05)
            p.add_argument("--t21", type=_parse_complex, default=0.0 if name == "evolve" else 0.02)
        if name == "evolve":
            p.add_argument("--steps", type=int, default=100, help="RK4 steps")
            p.add_argument("--samples", type=int, default=11, help="trajectory samples written")
        if name == "discrete-step":
            p.add_argument("--lam", type=_parse_complex, default=0.3 + 0.1j)
            p.add_argument("--kind", choices=("D1", "D2", "conj_pair"), default="D1")
            p.add_argument("--direction", choices=("T1", "T2"), help="conj_pair only; D1 moves along T1, D2 along T2")
    return ap


def _fmt(x) -> str:
    return f"{x + 0.0:.15g}"  # + 0.0 turns -0.0 into 0.0


class _Out:
    """Collects the artifact; written once at the end."""

    def __init__(self, args):
        self.path = args.output
        fmt = args.format
        if fmt is None and self.path:
            fmt = "csv" if self.path.endswith(".csv") else "json"
        self.fmt = fmt or "json"

    def write(self, text: str) -> None:
        if self.path:
            Path(self.path).write_text(text)
        else:
            sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _report(out: _Out, checks: list[suites.Check]) -> int:
    if out.fmt == "csv":
        rows = [[c.check, _fmt(c.residual), _fmt(c.tolerance), c.passed, json.dumps(c.params, sort_keys=True)]
                for c in checks]
        out.write(_csv_text(["check", "residual", "tolerance", "pass", "params"], rows))
    else:
        out.write(json.dumps([c.to_json() for c in checks], indent=2) + "\n")
    for c in checks:
        if not c.passed:
            print(f"FAIL {c.check} residual={_fmt(c.residual)} tolerance={c.tolerance:g} {c.params}",
                  file=sys.stderr)
    return 0 if all(c.passed for c in checks) else 1


def _matrix_rows(mat: np.ndarray, exps, label=None):
    for j in range(mat.shape[0]):
        for k in range(mat.shape[1]):
            if mat[j, k] != 0:
                head = [label] if label is not None else []
                yield head + [j, int(exps[k]), _fmt(mat[j, k].real), _fmt(mat[j, k].imag)]


def _cmd_moments(spec, ord, args, out) -> int:
    g = build(spec, ord, args.size)
    e = exponents(ord, args.size)
    if out.fmt == "csv":
        rows = [[j, k, int(e[j]), int(e[k]), _fmt(g.entries[j, k].real), _fmt(g.entries[j, k].imag)]
                for j in range(args.size) for k in range(args.size)]
        out.write(_csv_text(["j", "k", "exp_j", "exp_k", "re", "im"], rows))
    else:
        out.write(json.dumps({"ordering": str(ord), "size": args.size, "exponents": e.tolist(),
                              "re": [[float(_fmt(x)) for x in r] for r in g.entries.real],
                              "im": [[float(_fmt(x)) for x in r] for r in g.entries.imag]}) + "\n")
    return 0


def _cmd_factorize(spec, ord, args, out) -> int:
    gb = gauss_borel(build(spec, ord, args.size))
    e = exponents(ord, args.size)
    if out.fmt == "csv":
        rows = list(_matrix_rows(phi_matrix(gb, 1), e, 1)) + list(_matrix_rows(phi_matrix(gb, 2), e, 2))
        out.write(_csv_text(["family", "l", "exponent", "re", "im"], rows))
    else:
        out.write(json.dumps({"ordering": str(ord), "size": args.size, "exponents": e.tolist(),
                              "h": [[float(_fmt(x.real)), float(_fmt(x.imag))] for x in gb.h],
                              "phi1": [[[float(_fmt(x.real)), float(_fmt(x.imag))] for x in r]
                                       for r in phi_matrix(gb, 1)]}) + "\n")
    return 0


def _cmd_verblunsky(spec, ord, args, out) -> int:
    v = verblunsky(gauss_borel(build(spec, ord, args.size)), ord)
    if out.fmt == "csv":
        if out.path:
            v.write_csv(out.path)
        else:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["l", "re_alpha1", "im_alpha1", "re_alpha2", "im_alpha2", "re_rho2", "im_rho2", "re_h", "im_h"])
            for l in range(len(v)):
                row = [l]
                for x in (v.alpha1[l], v.alpha2[l], v.rho2[l], v.h[l]):
                    row += [_fmt(x.real), _fmt(x.imag)]
                w.writerow(row)
            out.write(buf.getvalue())
    else:
        pairs = lambda a: [[float(_fmt(x.real)), float(_fmt(x.imag))] for x in a]
        out.write(json.dumps({"alpha1": pairs(v.alpha1), "alpha2": pairs(v.alpha2),
                              "rho2": pairs(v.rho2), "h": pairs(v.h)}) + "\n")
    return 0


def _cmd_cd_check(spec, ord, args, out) -> int:
    l_max = min(12, args.size)
    g = build(spec, ord, l_max + 2 * ord.period + 2)
    gb = gauss_borel(g)
    pairs = suites.random_pairs(np.random.default_rng(args.seed), args.points)
    tol = suites.TOL["cd_triple"]
    rows, ok = [], True
    for l in range(ord.n_plus + 1, l_max + 1):
        assoc = cd_kernel.associated(g, ord, l)
        for z, zp in pairs:
            s = cd_kernel.kernel_sum(gb, ord, l, z, zp)
            a = cd_kernel.kernel_abc(g, ord, l, z, zp)
            c = cd_kernel.cd_formula(assoc, l, z, zp)
            scale = max(abs(s), 1e-300)
            ra, rc = abs(s - a) / scale, abs(s - c) / scale
            ok &= max(ra, rc) < tol
            rows.append([l, _fmt(z.real), _fmt(z.imag), _fmt(zp.real), _fmt(zp.imag),
                         _fmt(s.real), _fmt(s.imag), _fmt(ra), _fmt(rc), max(ra, rc) < tol])
    rep = suites.reproducing(spec, ord, l_max, args.points, args.seed)
    if out.fmt == "csv":
        out.write(_csv_text(["l", "re_z", "im_z", "re_zp", "im_zp", "re_kernel", "im_kernel",
                             "rel_abc", "rel_cd_formula", "pass"], rows))
    else:
        worst = max(max(float(r[7]), float(r[8])) for r in rows)
        triple = suites.Check("cd_triple", {"measure": spec.kind, "ordering": str(ord), "l_max": l_max,
                                            "points": args.points, "seed": args.seed}, worst, tol)
        out.write(json.dumps([triple.to_json(), rep.to_json()], indent=2) + "\n")
    if not rep.passed:
        print(f"FAIL reproducing residual={_fmt(rep.residual)}", file=sys.stderr)
    if not ok:
        print("FAIL cd_triple: some points exceed the tolerance", file=sys.stderr)
    return 0 if ok and rep.passed else 1


def _cmd_second_kind(spec, ord, args, out) -> int:
    checks = suites.second_kind_methods(spec, ord, min(6, args.size), args.points, args.seed)
    checks.append(suites.summation_rule(spec, ord))
    return _report(out, checks)


def _cmd_evolve(spec, ord, args, out) -> int:
    t11, t21 = complex(args.t11), complex(args.t21)
    n = args.size + 16  # headroom for the trusted-length cut
    v0 = toda.refactorize_at_time(spec, ord, DeformationTimes(), n)
    fracs = np.linspace(0, 1, max(args.samples, 2))
    traj = []
    for s in fracs:
        steps = max(1, int(round(args.steps * s)))
        v = toda.integrate_flow(v0, s * t11, s * t21, steps) if s > 0 else v0.truncated(n)
        traj.append((float(s), v.truncated(args.size)))
    check = suites.toeplitz(spec, ord, t11, t21, args.steps, n, min(8, args.size - 1))
    if out.fmt == "csv":
        if out.path:
            toda.write_trajectory_csv(out.path, traj)
        else:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["t", "k", "re_alpha1", "im_alpha1", "re_alpha2", "im_alpha2"])
            for s, v in traj:
                for k in range(len(v)):
                    a, b = v.alpha1[k], v.alpha2[k]
                    w.writerow([_fmt(s), k, _fmt(a.real), _fmt(a.imag), _fmt(b.real), _fmt(b.imag)])
            out.write(buf.getvalue())
        if not check.passed:
            print(f"FAIL toeplitz residual={_fmt(check.residual)}", file=sys.stderr)
        return 0 if check.passed else 1
    return _report(out, [check])


def _cmd_discrete(spec, ord, args, out) -> int:
    direction = {"D1": "T1", "D2": "T2"}.get(args.kind, args.direction or "T1")
    if args.direction and args.direction != direction:
        raise ValueError(f"{args.kind} moves along {direction}, not {args.direction}")
    r = toda.discrete_residuals(spec, ord, max(args.size, 24), args.lam, direction, args.kind)
    p = {"measure": spec.kind, "ordering": str(ord), "lam": str(args.lam), "kind": args.kind,
         "direction": direction}
    tol = suites.TOL["discrete"]
    checks = [suites.Check("discrete_two_path", p, max(r["lower"], r["upper"]), tol),
              suites.Check("discrete_darboux_flip", p, r["darboux"], tol)]
    return _report(out, checks)


def _cmd_tau(spec, ord, args, out) -> int:
    t = DeformationTimes.first(args.t11, args.t21)
    checks = [suites.tau_pivots(spec, ord, t, min(8, args.size)),
              suites.tau_poly(spec, ord, t, min(8, args.size), args.points, args.seed),
              suites.tau_second_kind(spec, ord, t, min(6, args.size), args.points, args.seed)]
    return _report(out, checks)


def _cmd_bilinear(spec, ord, args, out) -> int:
    return _report(out, [suites.bilinear(spec, ord), suites.wave_bilinear(spec, ord)])


def _cmd_verify_all(spec, ord, args, out) -> int:
    return _report(out, suites.verify_all(spec, ord, args.size, args.points, args.seed))


_HANDLERS = {
    "moments": _cmd_moments,
    "factorize": _cmd_factorize,
    "verblunsky": _cmd_verblunsky,
    "cd-check": _cmd_cd_check,
    "second-kind": _cmd_second_kind,
    "evolve": _cmd_evolve,
    "discrete-step": _cmd_discrete,
    "tau-check": _cmd_tau,
    "bilinear-check": _cmd_bilinear,
    "verify-all": _cmd_verify_all,
}


def run(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:  # argparse already printed the usage message
        return 0 if exc.code == 0 else 2
    ord = args.ordering
    if args.size < ord.n_plus + ord.n_minus + 4:
        print(f"olpuc: size {args.size} too small for ordering {ord}; need at least "
              f"{ord.n_plus + ord.n_minus + 4}", file=sys.stderr)
        return 2
    if args.points < 1:
        print("olpuc: --points must be positive", file=sys.stderr)
        return 2
    try:
        spec = load_measure(args.measure)
        return _HANDLERS[args.command](spec, ord, args, _Out(args))
    except OlpucError as exc:
        print(f"olpuc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"olpuc: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
