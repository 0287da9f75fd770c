"""Command-line interface.

Every verdict command prints one JSON object (``"schema": 1``) on stdout.
Exit status: 0 when a verdict was computed (whatever it is), 2 for usage and
input errors, 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import circulants as circ
from . import karpelevic as karp
from . import perron, region4
from .exceptions import InputError, NumericalFailure, ParseError
from .numerics import Tolerance, format_complex, matrix_from_json, matrix_to_json, parse_complex

SCHEMA = 1
DEFAULT_SEED = 0xC0FFEE


# ---------------------------------------------------------------------------
# parsing


def parse_spectrum(text: str) -> perron.SpectrumVector:
    """Parse a comma-separated list of complex literals.

    >>> parse_spectrum("1,0.5").x
    array([1. +0.j, 0.5+0.j])
    """
    values = []
    column = 1
    for k, token in enumerate(text.split(","), start=1):
        if not token.strip():
            raise ParseError(f"empty token {k} (column {column})", position=k)
        try:
            values.append(parse_complex(token))
        except ParseError:
            raise ParseError(f"bad complex literal {token.strip()!r} in token {k} (column {column})",
                             position=k) from None
        column += len(token) + 1
    return perron.SpectrumVector.from_values(values)


def format_spectrum(x) -> str:
    return ",".join(format_complex(z) for z in np.asarray(x))


def _typeI_arc(s: int, q: int):
    for arc in karp.karpelevic_arcs(s):
        if arc.arc_type == "I" and arc.q == q and arc.s == s:
            return arc
    raise InputError(f"no Type I arc with denominators q={q}, s={s}")


def parse_similarity(spec: str, tol: Tolerance) -> perron.PerronSimilarity:
    """Build a similarity from ``dft:n``, ``walsh:k``, ``kron:A,B,...``,
    ``vandermonde:typeI:s,q,alpha``, ``box3`` or ``file:path``."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "dft":
            n = int(arg)
            return perron.PerronSimilarity(circ.dft(n), circ.dft_inverse(n), tol)
        if kind == "walsh":
            H = circ.walsh(int(arg))
            return perron.PerronSimilarity(H, H / len(H), tol)
        if kind == "kron":
            return circ.kron_similarity([parse_similarity(part, tol) for part in arg.split(",")], tol)
        if kind == "vandermonde":
            family, _, params = arg.partition(":")
            if family != "typeI":
                raise InputError(f"unknown Vandermonde family {family!r}")
            s, q, alpha = params.split(",")
            return karp.type1_similarity(_typeI_arc(int(s), int(q)), float(alpha), tol)[1]
        if kind == "box3" and not arg:
            return region4.box_similarity(tol)
        if kind == "file":
            path = Path(arg)
            M = np.load(path) if path.suffix == ".npy" else matrix_from_json(path.read_text())
            return perron.PerronSimilarity(M, tol=tol)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad similarity specifier {spec!r}: {exc}") from None
    raise InputError(f"unknown similarity specifier {spec!r}")


def _pair(text: str):
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError:
        raise InputError(f"expected 'm,n', got {text!r}") from None
    return a, b


# ---------------------------------------------------------------------------
# output


def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return "null" if obj is None else ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return f"{float(obj):.17g}" if math.isfinite(obj) else "null"
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps(format_complex(obj))
    if isinstance(obj, str):
        import json
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    return dumps(str(obj))


def _emit(out, command, **fields):
    out.write(dumps({"schema": SCHEMA, "command": command, **fields}) + "\n")


def _complex_list(x):
    return [format_complex(z) for z in np.asarray(x).ravel()]


# ---------------------------------------------------------------------------
# commands


def _spectrum_arg(args):
    if args.spectrum_file is not None:
        return parse_spectrum(Path(args.spectrum_file).read_text().strip())
    return parse_spectrum(args.spectrum)


def cmd_check_circulant(args, tol, out):
    x = _spectrum_arg(args).x
    if args.block:
        return cmd_block(x, *_pair(args.block), tol, out)
    if args.klein is not None:
        return cmd_klein(x, args.klein, tol, out)
    cert = circ.circulant_realizable(x, tol, args.convention)
    _emit(out, "check-circulant", **cert.to_dict())


def cmd_block(x, m, n, tol, out):
    cert = circ.block_circulant_realizable(x, m, n, tol)
    _emit(out, "check-block", verdict=cert.verdict,
          certificate_transformed_vector=_complex_list(cert.transformed),
          realizer_matrix=matrix_to_json(cert.realizer))


def cmd_klein(x, k, tol, out):
    H = circ.walsh(k)
    if len(x) != len(H):
        raise InputError(f"spectrum must have length {len(H)}")
    reference = H @ x / len(H)
    M = circ.klein_matrix(reference, k)
    from .numerics import is_nonneg
    _emit(out, "check-klein", verdict=is_nonneg(reference, tol),
          certificate_reference_vector=_complex_list(reference), realizer_matrix=matrix_to_json(M))


def cmd_membership(args, tol, out):
    S = parse_similarity(args.similarity, tol)
    x = _spectrum_arg(args).x
    cone = perron.in_spectracone(S, x, tol)
    tope = perron.in_spectratope(S, x, tol)
    verdict = tope if args.polytope else cone
    _emit(out, "membership", verdict=verdict, in_spectracone=cone, in_spectratope=tope,
          in_row_cone=perron.in_row_cone(S, x, tol), in_row_polytope=perron.in_row_polytope(S, x, tol),
          witness_matrix=matrix_to_json(perron.realizing_matrix(S, x)))


def cmd_realize(args, tol, out):
    S = parse_similarity(args.similarity, tol)
    x = _spectrum_arg(args).x
    M = perron.realizing_matrix(S, x)
    from .numerics import is_nonneg, is_stochastic
    _emit(out, "realize", verdict=is_nonneg(M, tol), stochastic=is_stochastic(M, tol),
          witness_matrix=matrix_to_json(M))


def cmd_ideal(args, tol, out):
    S = parse_similarity(args.similarity, tol)
    k = perron.is_perron_similarity(S, tol)
    _emit(out, "ideal", verdict=perron.is_ideal(S, tol), perron_column=k, normalized=S.normalized)


def cmd_normalize(args, tol, out):
    S = parse_similarity(args.similarity, tol)
    res = perron.normalize(S, tol)
    t = res.transform
    _emit(out, "normalize", verdict=True, perron_index=res.perron_index,
          normalized_matrix=matrix_to_json(res.similarity.S),
          transform={"sigma": t.sigma.tolist(), "v": _complex_list(t.v), "w": _complex_list(t.w),
                     "gamma": t.gamma.tolist()})


def cmd_conditions(args, tol, out):
    report = perron.check_necessary_conditions(_spectrum_arg(args).x, args.horizon, tol)
    _emit(out, "conditions", verdict=report.ok, **report.to_dict())


def cmd_karc(args, tol, out):
    arc = karp.classify_arc(args.n, args.pq, args.rs)
    fields = {"n": arc.n, "endpoint_pq": str(arc.endpoint_pq), "endpoint_rs": str(arc.endpoint_rs),
              "arc_type": arc.arc_type, "floor_nq": arc.floor_nq}
    if args.alpha is not None:
        p = karp.ito_polynomial(arc, args.alpha)
        rs = karp.roots(p, tol)
        fields.update(alpha=p.alpha, coefficients=p.coeffs.tolist(), roots=_complex_list(rs.roots),
                      clustered=rs.clustered.tolist(), multiple_root=karp.has_multiple_root(p))
        if arc.arc_type == "I":
            fields["realizer_matrix"] = matrix_to_json(karp.type1_companion(arc, args.alpha))
        elif arc.arc_type == "0":
            fields["realizer_matrix"] = matrix_to_json(karp.type0_circulant(arc.n, args.alpha))
    _emit(out, "karc", verdict=True, **fields)


def boundary_csv(boundary) -> str:
    lines = ["re,im,arc_p,arc_q,arc_r,arc_s,alpha"]
    for z, a, k in zip(boundary.points, boundary.alphas, boundary.arc_index):
        arc = boundary.arcs[k]
        pq, rs = arc.endpoint_pq, arc.endpoint_rs
        lines.append(f"{z.real:.17g},{z.imag:.17g},{pq.numerator},{pq.denominator},"
                     f"{rs.numerator},{rs.denominator},{a:.17g}")
    return "\n".join(lines) + "\n"


def boundary_svg(boundary) -> str:
    x, y = (boundary.points.real + 1.1) * 200, (1.1 - boundary.points.imag) * 200
    pts = " ".join(f"{a:.4f},{b:.4f}" for a, b in zip(x, y))
    return ('<svg xmlns="http://www.w3.org/2000/svg" width="440" height="440" viewBox="0 0 440 440">\n'
            '<circle cx="220" cy="220" r="200" fill="none" stroke="#bbbbbb"/>\n'
            f'<polygon points="{pts}" fill="none" stroke="black" stroke-width="1"/>\n</svg>\n')


def cmd_theta_boundary(args, tol, out):
    boundary = karp.theta_boundary(args.n, args.samples, tol)
    text = boundary_csv(boundary)
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    if args.svg:
        Path(args.svg).write_text(boundary_svg(boundary))


def cmd_extremal(args, tol, out):
    lam = parse_complex(args.value)
    boundary = karp.theta_boundary(args.n, args.samples, tol)
    inside = karp.theta_contains(lam, boundary, args.tol)
    verdict = karp.is_extremal_in_theta(lam, boundary, args.tol) if inside else False
    _emit(out, "extremal", verdict=verdict, in_region=inside, value=format_complex(lam), n=args.n)


def cmd_region4(args, tol, out):
    sample = region4.sample_region(args.alpha_samples, args.simplex_res, args.x1_samples, tol)
    text = region4.export_points(sample, args.format, args.out)
    if args.svg:
        region4.export_points(sample, args.view, args.svg)
    if not args.out:
        out.write(text)


def cmd_walsh(args, tol, out):
    _emit(out, "walsh", verdict=True, k=args.k, matrix=matrix_to_json(circ.walsh(args.k)))


def cmd_selftest(args, tol, out):
    """Run the unit and property suites; the seed reaches them through
    ``SPECTRATOPE_SEED``."""
    tests = Path(__file__).resolve().parents[2] / "tests"
    if not tests.is_dir():
        raise InputError(f"test suite not found at {tests}")
    import os
    import subprocess
    env = dict(os.environ, SPECTRATOPE_SEED=str(args.seed))
    cmd = [sys.executable, "-m", "pytest", "-q", str(tests), "-m", "not acceptance"]
    return subprocess.call(cmd, env=env)


# ---------------------------------------------------------------------------
# argument parser


def _add_spectrum(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--spectrum", help='comma-separated complex values, e.g. "1,-0.2+0.3i,-0.2-0.3i"')
    g.add_argument("--spectrum-file", help="file holding the spectrum text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectratope", description=__doc__.splitlines()[0])
    parser.add_argument("--eps-nonneg", type=float, default=1e-9)
    parser.add_argument("--eps-eq", type=float, default=1e-9)
    parser.add_argument("--eps-root", type=float, default=1e-12)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-circulant", help="nonnegative circulant realizability")
    _add_spectrum(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--block", metavar="M,N", help="block-circulant with M-by-M blocks of order N")
    group.add_argument("--klein", type=int, metavar="K", help="Klein matrix of order 2^K")
    p.add_argument("--convention", choices=("forward", "inverse"), default="forward")
    p.add_argument("--json", action="store_true", help="accepted for compatibility; output is always JSON")
    p.set_defaults(func=cmd_check_circulant)

    p = sub.add_parser("check-block", help="block-circulant realizability")
    _add_spectrum(p)
    p.add_argument("--shape", required=True, metavar="M,N")
    p.set_defaults(func=lambda a, t, o: cmd_block(_spectrum_arg(a).x, *_pair(a.shape), t, o))

    p = sub.add_parser("check-klein", help="Klein matrix realizability")
    _add_spectrum(p)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=lambda a, t, o: cmd_klein(_spectrum_arg(a).x, a.k, t, o))

    for name, func, text in (("membership", cmd_membership, "spectracone/spectratope membership"),
                             ("realize", cmd_realize, "realizing matrix S D_x S^-1")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--similarity", required=True)
        _add_spectrum(p)
        if name == "membership":
            p.add_argument("--polytope", action="store_true", help="verdict is spectratope membership")
        p.set_defaults(func=func)

    for name, func in (("ideal", cmd_ideal), ("normalize", cmd_normalize)):
        p = sub.add_parser(name)
        p.add_argument("--similarity", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("conditions", help="necessary conditions for realizability")
    _add_spectrum(p)
    p.add_argument("--horizon", type=int, default=8)
    p.set_defaults(func=cmd_conditions)

    p = sub.add_parser("karc", help="classify an arc and inspect its Ito polynomial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pq", required=True)
    p.add_argument("--rs", required=True)
    p.add_argument("--alpha", type=float)
    p.set_defaults(func=cmd_karc)

    p = sub.add_parser("theta-boundary", help="boundary polyline of the stochastic eigenvalue region")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=karp.MIN_ARC_STEPS)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_theta_boundary)

    p = sub.add_parser("extremal", help="extremality of a point in the stochastic eigenvalue region")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--value", "--lambda", dest="value", required=True)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("region4", help="sample 4-by-4 stochastic spectra")
    p.add_argument("--alpha-samples", type=int, default=region4.DEFAULT_ALPHA_SAMPLES)
    p.add_argument("--simplex-res", type=int, default=region4.DEFAULT_SIMPLEX_RES)
    p.add_argument("--x1-samples", type=int, default=region4.DEFAULT_X1_SAMPLES)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.add_argument("--svg")
    p.add_argument("--view", choices=("svg-aw", "svg-la", "svg-lw"), default="svg-aw")
    p.set_defaults(func=cmd_region4)

    p = sub.add_parser("walsh", help="Sylvester Hadamard matrix")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_walsh)

    p = sub.add_parser("selftest", help="run the property test suite")
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        tol = Tolerance(args.eps_nonneg, args.eps_eq, args.eps_root)
        code = args.func(args, tol, out)
    except NumericalFailure as exc:
        err.write(f"spectratope: numerical failure: {exc}\n")
        return 3
    except (InputError, ValueError, OSError) as exc:
        err.write(f"spectratope: error: {exc}\n")
        return 2
    return int(code or 0)


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
