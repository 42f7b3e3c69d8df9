"""Command-line front end.

Commands: analyze (fixed spectrum of a system file), grank (generic rank of
a family file by one or all routes), gen (random or embedded-fixed-mode
system files), verify (cross-validation campaigns).

Exit codes: 0 success / no fixed spectrum / all campaigns pass, 1 fixed
spectrum exists, 2 usage or input error, 3 internal consistency failure.
All output is deterministic for fixed inputs, flags, and seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io as fio
from .fixed_modes import analyze_system, fixed_spectrum
from .generate import embedded_fixed_mode_system, random_system, spawn_rng
from .grank import (
    MatrixFamily,
    VectorPairFamily,
    expand_matrix_family,
    grank_matrix_minformula,
    grank_pairs_matroid,
    grank_pairs_minformula,
    grank_sampled,
    sampled_rank_with_constant,
)
from .linalg import CapacityError, ConsistencyError, RankTolerance, rank_factorize
from .verify import run_all_campaigns

EXIT_OK = 0
EXIT_FIXED = 1
EXIT_INPUT = 2
EXIT_INCONSISTENT = 3

DEFAULT_TOL = 1e-9


def _fmt_real(x: float) -> str:
    x = float(x) + 0.0  # normalize -0.0
    return f"{x:.10g}"


def _fmt_complex(z: complex) -> str:
    z = complex(z)
    re, im = z.real + 0.0, z.imag + 0.0
    # display-level snap of roundoff dust; JSON reports keep full precision
    scale = max(abs(re), abs(im), 1.0)
    if abs(im) < 1e-12 * scale:
        im = 0.0
    if abs(re) < 1e-12 * scale:
        re = 0.0
    if im == 0.0:
        return _fmt_real(re)
    return f"{_fmt_real(re)}{'+' if im >= 0 else '-'}{_fmt_real(abs(im))}j"


def _fmt_subset(subset) -> str:
    return "{" + ", ".join(str(i) for i in subset) + "}"


def _effective(cli_value, file_value, default):
    if cli_value is not None:
        return cli_value
    if file_value is not None:
        return file_value
    return default


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=None,
                   help="relative rank tolerance (default 1e-9)")
    p.add_argument("--seed", type=int, default=None,
                   help="root seed for all randomness (default 0)")
    p.add_argument("--json", action="store_true",
                   help="emit a machine-readable JSON report")


def cmd_analyze(args) -> int:
    parsed = fio.parse_system_file(Path(args.path).read_text(), args.path)
    tol = RankTolerance(_effective(args.tol, parsed.tolerance, DEFAULT_TOL))
    seed = int(_effective(args.seed, parsed.seed, 0))
    sys_ = parsed.system
    report = analyze_system(sys_, tol, trials=args.trials, rng_seed=seed)

    if args.json:
        print(fio.emit_json(fio.report_to_jsonable(report)), end="")
    else:
        print(f"system: {sys_.n} states, {sys_.k} channels")
        print(f"tolerance: {_fmt_real(tol.relative)}  seed: {seed}  "
              f"trials: {args.trials}")
        print("eigenvalues:")
        for rec in report.records:
            agree = "agree" if rec.oracle_agrees else "DISAGREE"
            if rec.is_fixed:
                cert = rec.certificate
                print(f"  lambda = {_fmt_complex(rec.lam):<28} mult {rec.multiplicity}"
                      f"  FIXED  S = {_fmt_subset(cert.subset)}"
                      f"  deficiency {cert.deficiency}  oracle: {agree}")
            else:
                print(f"  lambda = {_fmt_complex(rec.lam):<28} mult {rec.multiplicity}"
                      f"  free   oracle: {agree}")
        if report.has_fixed_spectrum:
            body = ", ".join(_fmt_complex(lam) for lam in report.fixed)
            print(f"fixed spectrum: {{ {body} }}")
        else:
            print("fixed spectrum: empty")

    if not report.oracle_consistent:
        return EXIT_INCONSISTENT
    return EXIT_FIXED if report.has_fixed_spectrum else EXIT_OK


def _grank_methods(parsed: fio.ParsedFamily, methods, tol: RankTolerance,
                   trials: int, seed: int) -> dict:
    fam = parsed.family
    M = parsed.constant
    out = {}
    if M is not None:
        matrix_fam = fam.to_matrix_family() if isinstance(fam, VectorPairFamily) else fam
        fact = rank_factorize(M, tol)
        prepended = expand_matrix_family(matrix_fam).prepend(fact.W, fact.R)
        for method in methods:
            if method == "matroid":
                value, witness = grank_pairs_matroid(prepended, tol)
                out[method] = {"value": value,
                               "witness": list(witness.indices),
                               "note": "indices into the prepended expanded family"}
            elif method == "minformula":
                value, cert = grank_pairs_minformula(prepended, tol)
                out[method] = {"value": value, "subset": list(cert.subset),
                               "note": "indices into the prepended expanded family"}
            else:
                value = sampled_rank_with_constant(M, matrix_fam, trials, seed, tol)
                out[method] = {"value": value, "trials": trials, "seed": seed}
        return out

    for method in methods:
        if method == "matroid":
            if isinstance(fam, MatrixFamily):
                value, witness = grank_pairs_matroid(expand_matrix_family(fam), tol)
                triples = [list(fam.expanded_triple(i)) for i in witness.indices]
                out[method] = {"value": value, "witness": list(witness.indices),
                               "witness_triples": triples}
            else:
                value, witness = grank_pairs_matroid(fam, tol)
                out[method] = {"value": value, "witness": list(witness.indices)}
        elif method == "minformula":
            if isinstance(fam, MatrixFamily):
                value, cert = grank_matrix_minformula(fam, tol)
            else:
                value, cert = grank_pairs_minformula(fam, tol)
            out[method] = {"value": value, "subset": list(cert.subset)}
        else:
            value = grank_sampled(fam, trials, seed, tol)
            out[method] = {"value": value, "trials": trials, "seed": seed}
    return out


def cmd_grank(args) -> int:
    parsed = fio.parse_family_file(Path(args.path).read_text(), args.path)
    tol = RankTolerance(_effective(args.tol, None, DEFAULT_TOL))
    seed = int(_effective(args.seed, None, 0))
    methods = ["matroid", "minformula", "sampled"] if args.method == "all" \
        else [args.method]
    results = _grank_methods(parsed, methods, tol, args.trials, seed)
    values = {info["value"] for info in results.values()}
    consistent = len(values) == 1

    fam = parsed.family
    kind = "pairs" if isinstance(fam, VectorPairFamily) else "members"
    if args.json:
        doc = {
            "family": {"kind": kind, "d": fam.d, "n1": fam.n1, "n2": fam.n2,
                       "has_constant": parsed.constant is not None},
            "methods": results,
            "consistent": consistent,
        }
        print(fio.emit_json(doc), end="")
    else:
        extra = " + constant M" if parsed.constant is not None else ""
        print(f"family: {fam.d} {kind} in C^{fam.n1} x C^{fam.n2}{extra}")
        for method in methods:
            info = results[method]
            line = f"method {method:<10} grank {info['value']}"
            if "witness" in info:
                line += f"   witness I = {_fmt_subset(info['witness'])}"
            if "subset" in info:
                line += f"   certificate S = {_fmt_subset(info['subset'])}"
            if "trials" in info:
                line += f"   (trials {info['trials']}, seed {info['seed']})"
            print(line)
        if len(methods) > 1:
            print(f"consistency: {'OK' if consistent else 'FAILED'}")

    if len(methods) > 1 and not consistent:
        return EXIT_INCONSISTENT
    return EXIT_OK


def _parse_dims(spec: str, k: int):
    parts = spec.split(",")
    if len(parts) != k:
        raise ValueError(f"--dims needs {k} entries, got {len(parts)}")
    dims = []
    for part in parts:
        fields = part.lower().split("x")
        if len(fields) != 2:
            raise ValueError(f"bad --dims entry {part!r}, expected MxL")
        m, l = int(fields[0]), int(fields[1])
        if m < 0 or l < 0:
            raise ValueError(f"bad --dims entry {part!r}, dimensions must be >= 0")
        dims.append((m, l))
    return dims


def cmd_gen(args) -> int:
    if args.n < 1 or args.k < 1:
        raise ValueError("--n and --k must be >= 1")
    seed = args.seed if args.seed is not None else 0
    rng = spawn_rng(seed, 0)
    if args.dims:
        dims = _parse_dims(args.dims, args.k)
    else:
        # nonzero defaults; channels with empty blocks are available via --dims
        dims = [(int(rng.integers(1, 3)), int(rng.integers(1, 3)))
                for _ in range(args.k)]
    if args.embed_fixed_mode is not None:
        lam = complex(args.embed_fixed_mode)
        sys_, _subset = embedded_fixed_mode_system(rng, args.n, args.k, dims, lam)
        report = fixed_spectrum(sys_, RankTolerance(DEFAULT_TOL))
        embedded = any(rec.is_fixed and abs(rec.lam - lam) <= 1e-6
                       for rec in report.records)
        if not embedded:
            raise ConsistencyError(
                f"embedded mode {_fmt_complex(lam)} did not verify as fixed")
    else:
        sys_ = random_system(rng, args.n, args.k, dims)
    print(fio.emit_json(fio.system_to_jsonable(sys_, seed=seed)), end="")
    return EXIT_OK


def cmd_verify(args) -> int:
    tol = RankTolerance(_effective(args.tol, None, DEFAULT_TOL))
    seed = int(_effective(args.seed, None, 0))
    results = run_all_campaigns(args.instances, seed, args.max_n, args.max_k, tol)
    all_pass = all(r.passed for r in results)
    if args.json:
        doc = {
            "campaigns": [{"name": r.name, "instances": r.instances,
                           "failures": r.failures, "details": r.details}
                          for r in results],
            "all_passed": all_pass,
        }
        print(fio.emit_json(doc), end="")
    else:
        width = max(len(r.name) for r in results)
        print(f"{'campaign':<{width}}  instances  failures  time")
        for r in results:
            print(f"{r.name:<{width}}  {r.instances:>9}  {r.failures:>8}  "
                  f"{r.seconds:6.2f}s")
            for detail in r.details:
                print(f"    {detail}")
        print("all campaigns passed" if all_pass else "CAMPAIGN FAILURES DETECTED")
    return EXIT_OK if all_pass else EXIT_INCONSISTENT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fixedspec",
        description="Fixed spectrum of multi-channel LTI systems and generic "
                    "rank of parameterized matrix families.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="fixed-mode verdicts for a system file")
    p.add_argument("path", help="system JSON file")
    p.add_argument("--trials", type=int, default=8,
                   help="random feedback draws for the sampling oracle")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("grank", help="generic rank of a family file")
    p.add_argument("path", help="family JSON file")
    p.add_argument("--method", choices=["matroid", "minformula", "sampled", "all"],
                   default="all")
    p.add_argument("--trials", type=int, default=3,
                   help="parameter draws for the sampled route")
    _add_common(p)
    p.set_defaults(func=cmd_grank)

    p = sub.add_parser("gen", help="emit a random system file on stdout")
    p.add_argument("--n", type=int, required=True, help="state dimension")
    p.add_argument("--k", type=int, required=True, help="number of channels")
    p.add_argument("--dims", default=None,
                   help="per-channel dimensions MxL, comma separated "
                        "(default: random in 0..2)")
    p.add_argument("--embed-fixed-mode", default=None, metavar="LAMBDA",
                   help="guarantee LAMBDA (python complex syntax) is a fixed mode")
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="run the cross-validation campaigns")
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--max-k", type=int, default=3)
    _add_common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except fio.FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (CapacityError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
