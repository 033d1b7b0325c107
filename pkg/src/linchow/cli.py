"""Command-line interface.

  linchow enumerate3 --p P [--out FILE]
  linchow enumerate4 --p P [--out FILE] [--keep-empty-boundary]
  linchow boundaries --p P [--degree 3|4] [--out FILE]
  linchow kernel --p P --scheme {product|quotient}
  linchow homology --p P [--threads N] [--rewrite on|off] [--checkpoint-dir D]
                   [--out F] [--format json|text] [--stage-limit S]
  linchow snf --matrix FILE
  linchow verify --p P [--samples N]

Exit codes: 0 success, 1 computational error, 2 usage error.
Environment: LINCHOW_THREADS and LINCHOW_CHECKPOINT_DIR supply defaults for
--threads and --checkpoint-dir.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys

from .gf import MAX_PRIME, is_prime

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if not is_prime(p) or p > MAX_PRIME:
        raise argparse.ArgumentTypeError(f"{p} is not a prime in 2..{MAX_PRIME}")
    return p


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _env_threads() -> int:
    raw = os.environ.get("LINCHOW_THREADS")
    if raw is None:
        return 1
    try:
        return _positive(raw)
    except argparse.ArgumentTypeError as e:
        raise SystemExit(f"LINCHOW_THREADS: {e}")


@contextlib.contextmanager
def _sink(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _header(p, degree, extra=""):
    from .pipeline import CODE_VERSION

    return f"# p={p} degree={degree} code={CODE_VERSION}{extra}\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="linchow",
        description="Fractional linear cycles in the cubical higher Chow complex over F_p.",
        epilog="Exit codes: 0 success, 1 computational error, 2 usage error. "
        "LINCHOW_THREADS and LINCHOW_CHECKPOINT_DIR set defaults for --threads and --checkpoint-dir.",
    )
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add_p(sp):
        sp.add_argument("--p", type=_prime, required=True, help=f"prime field size, 2..{MAX_PRIME}")

    sp = sub.add_parser("enumerate3", help="list admissible non-degenerate degree-3 cycles")
    add_p(sp)
    sp.add_argument("--threads", type=_positive, default=None, help="worker threads (default LINCHOW_THREADS or 1)")
    sp.add_argument("--out", default=None, help="output file (default stdout)")

    sp = sub.add_parser("enumerate4", help="stream admissible non-degenerate degree-4 cycles")
    add_p(sp)
    sp.add_argument("--threads", type=_positive, default=None)
    sp.add_argument("--out", default=None)
    sp.add_argument("--keep-empty-boundary", action="store_true",
                    help="also list cycles whose boundary cancels completely (skipped by default)")

    sp = sub.add_parser("boundaries", help="dump boundary chains")
    add_p(sp)
    sp.add_argument("--degree", type=int, choices=(3, 4), default=4,
                    help="4: degree-4 cycle -> degree-3 chain; 3: degree-3 cycle -> point chain")
    sp.add_argument("--threads", type=_positive, default=None)
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("kernel", help="Grassmannian kernel of the degree-3 boundary")
    add_p(sp)
    sp.add_argument("--scheme", choices=("product", "quotient"), default="quotient",
                    help="point classes: product a*b, or the full quotient by [a,b]+[a,c]-[a,bc] (default)")

    sp = sub.add_parser("homology", help="full run: enumerate, kernel, relations, quotient, image")
    add_p(sp)
    sp.add_argument("--threads", type=_positive, default=None)
    sp.add_argument("--scheme", choices=("product", "quotient"), default="quotient")
    sp.add_argument("--rewrite", choices=("on", "off"), default="on",
                    help="apply invert-last, torsion and split-product rewrites (default on)")
    sp.add_argument("--swap-policy", choices=("vanishing-only",), default=None,
                    help="also apply the swap rule where its corrections vanish")
    sp.add_argument("--checkpoint-dir", default=None, help="shard checkpoints (default LINCHOW_CHECKPOINT_DIR)")
    sp.add_argument("--out", default=None, help="report file (default stdout)")
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.add_argument("--stage-limit", choices=("enumerate3", "kernel", "enumerate4", "quotient", "image"),
                    default=None, help="stop after this stage")
    sp.add_argument("--keep-empty-boundary", action="store_true",
                    help="count degree-4 cycles with cancelling boundary too")

    sp = sub.add_parser("snf", help="elementary divisors of a triplet-format matrix")
    sp.add_argument("--matrix", required=True, help="file with header 'rows cols nnz' and 'row col value' lines")
    sp.add_argument("--bit-bound", type=_positive, default=None, help="abort if entries exceed this many bits")

    sp = sub.add_parser("verify", help="run the property checks for one prime")
    add_p(sp)
    sp.add_argument("--samples", type=_positive, default=2000, help="sampled degree-4 cycles for d o d = 0")
    return ap


def _cmd_enumerate3(a):
    from .cycles import enumerate3

    cycles = enumerate3(a.p, threads=a.threads)
    with _sink(a.out) as fh:
        fh.write(_header(a.p, 3, f" count={len(cycles)}"))
        for c in cycles:
            fh.write(c.encode() + "\n")
    if a.out:
        print(f"{len(cycles)} cycles written to {a.out}")


def _cmd_enumerate4(a):
    from .cycles import enumerate4

    n = 0
    with _sink(a.out) as fh:
        fh.write(_header(a.p, 4, f" keep_empty_boundary={a.keep_empty_boundary}"))
        for c in enumerate4(a.p, threads=a.threads, keep_empty_boundary=a.keep_empty_boundary):
            fh.write(c.encode() + "\n")
            n += 1
    if a.out:
        print(f"{n} cycles written to {a.out}")


def _cmd_boundaries(a):
    if a.degree == 3:
        from .boundary import PointClassScheme, boundary3, point_class
        from .cycles import enumerate3

        with _sink(a.out) as fh:
            fh.write(_header(a.p, 3, " columns=point,product_class,quotient_index"))
            for c in enumerate3(a.p):
                terms = " ".join(
                    f"{v:+d}*({pt.encode()};{point_class(pt, PointClassScheme.PRODUCT, a.p)};"
                    f"{point_class(pt, PointClassScheme.FULLQUOTIENT, a.p)})"
                    for pt, v in sorted(boundary3(c).items())
                )
                fh.write(f"{c.encode()}\t{terms}\n")
        return
    from . import _fast4

    T = _fast4.get_tables(a.p)
    with _sink(a.out) as fh:
        fh.write(_header(a.p, 4))
        for res in _fast4.iter_shards(T, threads=a.threads):
            off = res.offsets.tolist()
            for k, (x, y, z) in enumerate(res.triples.tolist()):
                enc = "|".join(T.coords[i].encode() for i in (x, y, z))
                terms = " ".join(
                    f"{int(res.coefs[t]):+d}*{T.cycle3_of_id(int(res.ids[t])).encode()}" for t in range(off[k], off[k + 1])
                )
                fh.write(f"{enc}\t{terms}\n")


def _cmd_kernel(a):
    from .boundary import PointClassScheme, grassmannian_kernel
    from .cycles import enumerate3

    cycles = enumerate3(a.p)
    K = grassmannian_kernel(cycles, PointClassScheme(a.scheme), a.p)
    print(f"# p={a.p} scheme={a.scheme} cycles={len(cycles)} kernel_rank={len(K)}")
    for v in K:
        print(" ".join(map(str, v)))


def _cmd_homology(a):
    from .pipeline import RunConfig, emit_report, run_homology
    from .rewrite import DEFAULT_RULES, RewriteConfig, Rule

    rules = set(DEFAULT_RULES)
    if a.swap_policy:
        rules.add(Rule.SWAP_WITH_CORRECTION)
    cfg = RunConfig(
        p=a.p,
        threads=a.threads,
        scheme=a.scheme,
        rewrite=RewriteConfig(enabled=a.rewrite == "on", rules=frozenset(rules), correction_policy=a.swap_policy),
        checkpoint_dir=a.checkpoint_dir,
        stage_limit=a.stage_limit,
        keep_empty_boundary=a.keep_empty_boundary,
    )
    rep = run_homology(cfg)
    text = emit_report(rep, a.format, a.out)
    if a.out:
        print(f"report written to {a.out}: {rep.conclusion}")
    else:
        sys.stdout.write(text)


def _cmd_snf(a):
    from .exactla import SparseIntMatrix, smith_normal_form

    with open(a.matrix) as fh:
        M = SparseIntMatrix.read_triplets(fh)
    print(json.dumps(smith_normal_form(M, bit_bound=a.bit_bound)))


def _cmd_verify(a):
    from .properties import run_all

    results = run_all(a.p, a.samples)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.ok for r in results) else EXIT_COMPUTE


COMMANDS = {
    "enumerate3": _cmd_enumerate3,
    "enumerate4": _cmd_enumerate4,
    "boundaries": _cmd_boundaries,
    "kernel": _cmd_kernel,
    "homology": _cmd_homology,
    "snf": _cmd_snf,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
        if hasattr(a, "threads") and a.threads is None:
            a.threads = _env_threads()
        if hasattr(a, "checkpoint_dir") and a.checkpoint_dir is None:
            a.checkpoint_dir = os.environ.get("LINCHOW_CHECKPOINT_DIR") or None
    except SystemExit as e:
        if e.code in (0, None):
            return EXIT_OK
        if isinstance(e.code, str):
            print(e.code, file=sys.stderr)
        return EXIT_USAGE
    try:
        rc = COMMANDS[a.command](a)
    except (OSError, ValueError, RuntimeError, ArithmeticError) as e:
        msg = f"linchow {a.command}: error: {e}"
        ck = getattr(a, "checkpoint_dir", None)
        if ck:
            msg += f"\ncheckpoint state is kept in {ck}; rerun the same command to resume"
        print(msg, file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK if rc is None else rc


if __name__ == "__main__":
    sys.exit(main())
