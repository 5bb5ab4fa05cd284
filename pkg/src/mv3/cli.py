"""Command-line front end: cipher operations and lab experiments.

Keys and IVs may be given as hex on the command line (handy for tests),
as raw binary files, or via environment variables holding hex. Prefer the
file or environment forms for real keys: command lines leak into shell
history and process listings.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

CHUNK = 1 << 20

GRAPH_CSV = "n,r,max_residual_abs,c_n  (per row); final line: fitted_c"
CAYLEY_CSV = "n,generators,degree,lambda2_normalized,gap"
MIXING_CSV = "step,tv_distance"
VISITS_CSV = "x,empirical_tail,bound"
STATS_CSV = "test,statistic,z,passed"


class CliError(Exception):
    pass


def _add_key_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("key material (one source each; file or env recommended)")
    g.add_argument("--key", metavar="HEX", help="key as hex (little-endian per 4-byte word)")
    g.add_argument("--key-file", metavar="PATH", help="raw binary key file")
    g.add_argument("--key-env", metavar="NAME", help="environment variable holding the key as hex")
    g.add_argument("--iv", metavar="HEX", help="IV as hex")
    g.add_argument("--iv-file", metavar="PATH", help="raw binary IV file")
    g.add_argument("--iv-env", metavar="NAME", help="environment variable holding the IV as hex")
    g.add_argument("--cube", action="store_true", help="use the c <- c^3 multiplier variant")


def _material(args, which: str) -> np.ndarray | None:
    from .keyschedule import parse_hex_words, read_key_file

    sources = {
        "hex": getattr(args, which),
        "file": getattr(args, f"{which}_file"),
        "env": getattr(args, f"{which}_env"),
    }
    given = [k for k, v in sources.items() if v is not None]
    if len(given) > 1:
        raise CliError(f"give exactly one {which} source, got {', '.join(given)}")
    if not given:
        return None
    kind = given[0]
    if kind == "hex":
        return parse_hex_words(sources["hex"])
    if kind == "file":
        return read_key_file(sources["file"])
    name = sources["env"]
    if name not in os.environ:
        raise CliError(f"environment variable {name} is not set")
    return parse_hex_words(os.environ[name])


def _session(args):
    from .stream import StreamSession

    key = _material(args, "key")
    iv = _material(args, "iv")
    if key is None:
        raise CliError("a key is required (--key, --key-file or --key-env)")
    if iv is None:
        raise CliError("an IV is required (--iv, --iv-file or --iv-env)")
    return StreamSession.from_key(key, iv, cube=args.cube)


def _open_in(path):
    return sys.stdin.buffer if path in (None, "-") else open(path, "rb")


def _open_out(path):
    return sys.stdout.buffer if path in (None, "-") else open(path, "wb")


def _emit_csv(header: str, rows) -> None:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header.split(","))
    w.writerows(rows)


# --- cipher commands -------------------------------------------------------


def cmd_keystream(args) -> None:
    s = _session(args)
    out = _open_out(args.out)
    remaining = args.bytes
    try:
        while remaining:
            n = min(CHUNK, remaining)
            ks = s.keystream_bytes(n)
            out.write(ks.hex().encode() + b"\n" if args.hex else ks)
            remaining -= n
        out.flush()
    finally:
        if out is not sys.stdout.buffer:
            out.close()


def cmd_xcrypt(args) -> None:
    s = _session(args)
    src, dst = _open_in(args.input), _open_out(args.out)
    try:
        while True:
            block = src.read(CHUNK)
            if not block:
                break
            dst.write(s.encrypt(block))
        dst.flush()
    finally:
        if src is not sys.stdin.buffer:
            src.close()
        if dst is not sys.stdout.buffer:
            dst.close()


# --- walk lab --------------------------------------------------------------


def cmd_analyze_graph(args) -> None:
    from .walklab import build_nonlinear_graph, gap_constant, spectrum

    rows = []
    for r in args.r:
        for n in args.n:
            g = build_nonlinear_graph(n, r)
            spec = spectrum(g, args.cap)
            rows.append((n, r, spec.max_residual(), gap_constant(spec, n), g.explicit))
    fitted = min(row[3] for row in rows)
    if args.csv:
        _emit_csv("n,r,max_residual_abs,c_n", [(n, r, f"{m:.12g}", f"{c:.12g}") for n, r, m, c, _ in rows])
        print(f"fitted_c,{fitted:.12g}")
        return
    print(f"{'n':>6} {'r':>3} {'max|lambda| (non-explicit)':>27} {'c_n':>10}  explicit eigenvalues")
    for n, r, m, c, expl in rows:
        shown = ", ".join(f"{e:+.4f}" for e in expl)
        print(f"{n:>6} {r:>3} {m:>27.9f} {c:>10.4f}  {{{shown}}}")
    print(f"fitted c (largest constant valid across the sweep): {fitted:.6f}")
    if args.c is not None:
        verdict = "holds" if fitted >= args.c else "fails"
        print(f"bound |lambda| <= 4 - {args.c}/(ln n)^2 {verdict} for every row")


def cmd_analyze_cayley(args) -> None:
    from .walklab import build_cayley_graph, spectrum

    if args.gens:
        gens = args.gens
    else:
        size = args.random if args.random else 4 * max(1, int(math.log2(args.n)))
        gens = np.random.default_rng(args.seed).choice(args.n, size=size, replace=False).tolist()
    g = build_cayley_graph(args.n, gens)
    spec = spectrum(g, args.cap)
    lam2 = spec.signed_second() / g.degree
    if args.csv:
        _emit_csv(CAYLEY_CSV, [(args.n, " ".join(map(str, gens)), g.degree, f"{lam2:.12g}", f"{1 - lam2:.12g}")])
        return
    print(f"Cayley graph on Z/{args.n}Z, |S|={len(gens)}, degree {g.degree}")
    print(f"normalized second eigenvalue: {lam2:.6f}   gap delta = {1 - lam2:.6f}")
    print(f"largest nontrivial |lambda|/k: {spec.max_residual() / g.degree:.6f}")


def cmd_mixing(args) -> None:
    from .walklab import build_nonlinear_graph, hitting_bound, mixing_time, spectrum, tv_curve

    g = build_nonlinear_graph(args.n, args.r)
    eps = args.eps if args.eps is not None else 1.0 / args.n
    t = mixing_time(g, args.start, eps, lazy=args.lazy, max_steps=args.max_steps)
    if args.csv:
        _emit_csv(MIXING_CSV, [(i, f"{d:.12g}") for i, d in enumerate(tv_curve(g, args.start, t, args.lazy))])
        return
    print(f"{g.name}: {'lazy ' if args.lazy else ''}walk from {args.start} reaches TV < {eps:.3g} after {t} steps")
    print(f"(ln n)^3 = {math.log(args.n) ** 3:.1f}")
    if args.n <= args.cap:
        spec = spectrum(g, args.cap)
        if args.lazy:
            # lazy operator (I + A/k)/2 maps lambda to (1 + lambda/k)/2
            k, sigma = 1.0, 0.5 * (1 + spec.residual().max() / g.degree)
        else:
            k, sigma = g.degree, spec.max_residual()
        if sigma < k:
            s = max(1, args.n // 4)
            print(f"hitting-time bound for |S|={s}: {hitting_bound(args.n, k, sigma, s):.1f} steps")


def cmd_visits(args) -> None:
    from .walklab import WalkExperiment, build_nonlinear_graph, visit_count_experiment

    g = build_nonlinear_graph(args.n, args.r)
    target = np.random.default_rng(args.seed).choice(args.n, size=args.set_size, replace=False)
    exp = WalkExperiment(g, target, args.steps, args.trials, seed=args.seed)
    rep = visit_count_experiment(exp, args.x)
    if args.csv:
        _emit_csv(VISITS_CSV, [(f"{x:g}", f"{e:.12g}", f"{b:.12g}") for x, e, b in rep.rows])
        return
    print(f"{g.name}, |S|={args.set_size}, {args.steps} steps, {args.trials} trials, eps={rep.eps:.6f}")
    print(f"{'x':>8} {'empirical':>12} {'bound':>12}")
    for x, e, b in rep.rows:
        print(f"{x:>8g} {e:>12.6f} {b:>12.6f}")
    print("bound holds" if rep.holds else "BOUND VIOLATED")
    if not rep.holds:
        raise SystemExit(1)


# --- crypt lab -------------------------------------------------------------


def cmd_sequencing(args) -> None:
    from .sequencing import cipher_output_scheme, load_scheme, min_pair_weight, regular_family

    if args.scheme_file:
        scheme = load_scheme(args.scheme_file)
    elif args.scheme == "cipher":
        scheme = cipher_output_scheme()
    else:
        scheme = regular_family(args.period)
    res = min_pair_weight(scheme, args.max_b, args.horizon, args.max_nodes)
    print(f"period {scheme.period}, window {scheme.window}, max_b {res.max_b}, horizon {res.horizon}")
    if res.a_min is None:
        print("no relation found")
        return
    w = res.witness
    print(f"a_min = {res.a_min} ({res.kind}; {res.nodes} nodes searched)")
    print(f"outputs: {list(w.y_indices)}")
    print(f"pairs starting at: {list(w.pair_indices)}")
    print(f"witness verifies over GF(2): {w.verify(scheme)}")


def cmd_relkey(args) -> None:
    from .attacks import related_key_complexity

    r = related_key_complexity(args.t, args.loops, args.insertion)
    print(f"t={args.t:g} loops={args.loops}{' insertion' if args.insertion else ''}")
    print(f"log2 M = {r.log2_m:.3f}")
    print(f"log2 data/time = {r.log2_total:.3f}")


def _parse_counts(items) -> dict[int, float]:
    out = {}
    for item in items:
        try:
            a, n = item.split(":")
            out[int(a)] = float(n)
        except ValueError:
            raise CliError(f"bad count {item!r}; expected A:N, e.g. 12:1e6") from None
    return out


def cmd_bound(args) -> None:
    from .attacks import distinguisher_bound

    v = distinguisher_bound(args.eps, _parse_counts(args.count))
    print(f"bound = {v:.6g}" + (f"  (2^{math.log2(v):.3f})" if v > 0 else ""))


def cmd_stats(args) -> None:
    from .stats import stat_tests

    if args.input:
        with _open_in(args.input) as f:
            data = f.read()
    else:
        data = _session(args).keystream_bytes(args.bytes)
    rep = stat_tests(data, sigma=args.sigma)
    if args.csv:
        _emit_csv(STATS_CSV, [(r.name, f"{r.statistic:.12g}", f"{r.z:.6f}", int(r.passed)) for r in rep.results])
    else:
        for r in rep.results:
            print(f"{r.name:<14} z={r.z:+8.3f}  {'pass' if r.passed else 'FAIL'}")
        print(f"{rep.nbytes} bytes: {'all tests pass' if rep.passed else f'{len(rep.failures())} failures'}"
              f" at {rep.sigma:g} sigma")
    if not rep.passed:
        raise SystemExit(1)


def cmd_tmdto(args) -> None:
    from .attacks import tmdto_margin

    m = tmdto_margin(args.key_bits)
    print(f"state size: {m.state_bits} bits; key {m.key_bits} bits needs >= {m.required_bits}")
    print(f"margin {'satisfied' if m.holds else 'violated'} (holds for keys up to {m.max_key_bits} bits)")


def cmd_bench(args) -> None:
    from .bench import bench_keystream

    r = bench_keystream(args.mib, cube=args.cube)
    print(f"{r.nbytes / 2**20:.0f} MiB in {r.seconds:.3f} s: {r.bytes_per_second / 1e6:.1f} MB/s")
    cpb = r.cycles_per_byte
    print(f"~{cpb:.2f} cycles/byte at nominal clock" if cpb else "cycles/byte: clock rate unavailable")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mv3", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("keystream", help="write raw keystream bytes")
    _add_key_args(s)
    s.add_argument("--bytes", type=int, required=True)
    s.add_argument("--hex", action="store_true", help="write hex text instead of raw bytes")
    s.add_argument("-o", "--out", help="output file (default stdout)")
    s.set_defaults(func=cmd_keystream)

    for name in ("encrypt", "decrypt"):
        s = sub.add_parser(name, help=f"{name} a byte stream (XOR with keystream)")
        _add_key_args(s)
        s.add_argument("-i", "--in", dest="input", help="input file (default stdin)")
        s.add_argument("-o", "--out", help="output file (default stdout)")
        s.set_defaults(func=cmd_xcrypt)

    s = sub.add_parser("analyze-graph", help="exact spectra of the nonlinear 4-valent graphs",
                       description=f"CSV columns: {GRAPH_CSV}")
    s.add_argument("--n", type=int, nargs="+", default=[64, 256, 1024, 4096])
    s.add_argument("--r", type=int, nargs="+", default=[3])
    s.add_argument("--c", type=float, help="check a given gap constant against the sweep")
    s.add_argument("--cap", type=int, default=4096)
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_analyze_graph)

    s = sub.add_parser("analyze-cayley", help="second eigenvalue of a Cayley graph on Z/nZ",
                       description=f"CSV columns: {CAYLEY_CSV}")
    s.add_argument("--n", type=int, default=1024)
    s.add_argument("--gens", type=int, nargs="+", help="explicit generators")
    s.add_argument("--random", type=int, help="number of random generators (default 4 log2 n)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cap", type=int, default=4096)
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_analyze_cayley)

    s = sub.add_parser("mixing", help="mixing time on the nonlinear graph",
                       description=f"CSV columns: {MIXING_CSV}")
    s.add_argument("--n", type=int, default=1024)
    s.add_argument("--r", type=int, default=3)
    s.add_argument("--eps", type=float, help="TV threshold (default 1/n)")
    s.add_argument("--start", type=int, default=0)
    s.add_argument("--lazy", action="store_true")
    s.add_argument("--max-steps", type=int, default=100_000)
    s.add_argument("--cap", type=int, default=4096)
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_mixing)

    s = sub.add_parser("visits", help="visit-count tails vs the Chernoff-type walk bound",
                       description=f"CSV columns: {VISITS_CSV}")
    s.add_argument("--n", type=int, default=512)
    s.add_argument("--r", type=int, default=3)
    s.add_argument("--set-size", type=int, default=128)
    s.add_argument("--steps", type=int, default=2000)
    s.add_argument("--trials", type=int, default=5000)
    s.add_argument("--x", type=float, nargs="+", default=[50, 100, 200])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_visits)

    s = sub.add_parser("sequencing", help="minimal pair-relation weight of a sequencing scheme",
                       description="Scheme files list one residue per line: the offsets i - n_ij.")
    s.add_argument("--scheme", choices=["family", "cipher"], default="family")
    s.add_argument("--scheme-file")
    s.add_argument("--period", type=int, default=32, help="period of the regular family")
    s.add_argument("--max-b", type=int, default=6)
    s.add_argument("--horizon", type=int)
    s.add_argument("--max-nodes", type=int, default=50_000_000)
    s.set_defaults(func=cmd_sequencing)

    s = sub.add_parser("relkey", help="related-IV distinguisher complexity")
    s.add_argument("--t", type=float, required=True, help="table words touched per key word (256/key words)")
    s.add_argument("--loops", type=int, choices=[8, 4, 2], default=8)
    s.add_argument("--insertion", action="store_true", help="cost the insert-instead-of-XOR setup variant")
    s.set_defaults(func=cmd_relkey)

    s = sub.add_parser("bound", help="linear distinguisher statistical-distance bound")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--count", nargs="+", required=True, metavar="A:N", help="relation counts, e.g. 12:1e6")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("stats", help="monobit / serial / bit-lane tests",
                       description=f"CSV columns: {STATS_CSV}")
    _add_key_args(s)
    s.add_argument("-i", "--in", dest="input", help="test this file instead of generated keystream")
    s.add_argument("--bytes", type=int, default=10_000_000)
    s.add_argument("--sigma", type=float, default=4.0)
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("tmdto", help="state-size margin against tradeoff attacks")
    s.add_argument("--key-bits", type=int, required=True)
    s.set_defaults(func=cmd_tmdto)

    s = sub.add_parser("bench", help="keystream throughput")
    s.add_argument("--mib", type=int, default=256)
    s.add_argument("--cube", action="store_true")
    s.set_defaults(func=cmd_bench)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CliError, ValueError, OSError, RuntimeError) as exc:
        print(f"mv3 {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
