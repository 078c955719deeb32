"""Command-line driver: reduce, decide, count, verify and generate instances.

Exit codes: 0 yes/verified, 1 no, 2 usage or parse error, 3 scale refusal,
4 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from shortpa import apcover, encode, geometry, gip, kpt, optimize, presburger, satred
from shortpa.exactmath import ScaleError

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_SCALE, EXIT_MISMATCH = 0, 1, 2, 3, 4
TARGETS = ("apcover", "sentence", "gip1", "gip2", "bilevel", "pareto")
STAGES = ("sat", "apcover", "sentence", "gip1", "gip2", "bilevel", "pareto")


class UsageError(Exception):
    pass


# input detection


def detect_kind(text: str) -> str:
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head = line.split()[0]
        if line.startswith("c") and head == "c":
            continue
        if head == "p":
            return "qbf" if any(l.split()[:1] in (["a"], ["e"]) for l in text.splitlines()) else "cnf"
        return {
            "J": "apcover",
            "PREFIX": "mapcover",
            "SENTENCE": "sentence",
            "GIP": "gip",
            "BILEVEL": "bilevel",
            "PARETO": "pareto",
            "PIP": "pip",
        }.get(head, "unknown")
    return "unknown"


def load(text: str):
    kind = detect_kind(text)
    loaders = {
        "cnf": satred.loads_dimacs,
        "qbf": satred.loads_qdimacs,
        "apcover": apcover.loads_apcover,
        "mapcover": apcover.loads_mapcover,
        "sentence": presburger.loads_sentence,
        "gip": geometry.loads_gip,
        "bilevel": optimize.loads_bilevel,
        "pareto": optimize.loads_pareto,
        "pip": kpt.loads_pip,
    }
    if kind not in loaders:
        raise UsageError("cannot recognise the input format")
    return kind, loaders[kind](text)


# reduction


def to_apcover(kind, obj, parity_trick=False):
    if kind == "cnf":
        return satred.reduce_3sat_to_apcover(obj, parity_trick).instance
    if kind == "apcover":
        return obj
    raise UsageError(f"cannot reduce a {kind} input to AP-COVER")


def reduce_to(kind, obj, target: str, parity_trick: bool = False) -> str:
    if kind in ("qbf", "mapcover"):
        inst = satred.reduce_qbf_to_mapcover(obj) if kind == "qbf" else obj
        if target == "apcover":
            return apcover.dumps_mapcover(inst)
        if target == "sentence":
            return presburger.dumps_sentence(encode.build_sentence_m(inst))
        raise UsageError(f"target {target} needs a CNF or AP-COVER input")
    inst = to_apcover(kind, obj, parity_trick)
    if target == "apcover":
        return apcover.dumps_apcover(inst)
    enc = encode.encode_instance(inst)
    if target == "sentence":
        return presburger.dumps_sentence(encode.build_sentence3(enc))
    if target == "gip1":
        return geometry.dumps_gip(geometry.build_system1(enc))
    if target == "gip2":
        return geometry.dumps_gip(geometry.build_system2(enc))
    if target == "bilevel":
        return optimize.dumps_bilevel(optimize.build_bilevel(enc))
    if target == "pareto":
        return optimize.dumps_pareto(optimize.build_pareto(enc, parity_trick))
    raise UsageError(f"unknown target {target}")


# decide / count


def decide(kind, obj, max_scale: int) -> bool:
    if kind == "cnf":
        return satred.count_sat(obj) > 0
    if kind == "qbf":
        return satred.decide_qbf(obj)
    if kind == "apcover":
        return apcover.decide_apcover(obj, max_scale)
    if kind == "mapcover":
        return apcover.decide_mapcover(obj, max_scale)
    if kind == "sentence":
        return presburger.decide_certified(obj)
    if kind == "gip":
        return gip.decide_gip(obj, max_scale=max_scale)
    if kind == "bilevel":
        return optimize.solve_bilevel_brute(obj, max_scale) > 0
    if kind == "pareto":
        return optimize.solve_pareto_brute(obj, max_scale)[0] < 0
    raise UsageError(f"no decision procedure for {kind}")


def count(kind, obj, max_scale: int) -> int:
    if kind == "cnf":
        return satred.count_sat(obj)
    if kind == "apcover":
        return apcover.count_apcover(obj, max_scale)
    if kind == "mapcover":
        return apcover.count_mapcover_witnesses(obj)
    if kind == "sentence":
        return presburger.count_certified(obj)
    if kind == "gip":
        return gip.count_gip(obj, max_scale=max_scale)
    if kind == "bilevel":
        return optimize.solve_bilevel_brute(obj, max_scale)
    if kind == "pareto":
        return -optimize.solve_pareto_brute(obj, max_scale)[0]
    raise UsageError(f"no counting procedure for {kind}")


# verification


@dataclass
class PipelineReport:
    status: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    reasons: dict = field(default_factory=dict)
    mismatch: tuple | None = None

    @property
    def passed(self) -> bool:
        return self.mismatch is None

    def lines(self, timings: bool = False) -> list[str]:
        out = []
        for st in self.status:
            line = f"{st:9s} {self.status[st]:8s} count={self.counts.get(st, '-')}"
            if timings:
                line += f" time={self.timings.get(st, 0):.3f}s"
            out.append(line)
        if self.mismatch:
            a, ca, b, cb = self.mismatch
            out.append(f"FAIL: {a}={ca} but {b}={cb}")
        else:
            out.append("PASS")
        return out


def corrupt_instance(inst: apcover.APCoverInstance) -> apcover.APCoverInstance:
    """An instance whose uncovered count differs from inst's by at least one."""
    free = apcover.uncovered(inst)
    if free:
        return apcover.APCoverInstance(
            inst.mu, inst.nu, inst.triples + (apcover.APTriple(free[0], 0, 1),)
        )
    kept = tuple(t for t in inst.triples if not apcover.ap_member(inst.mu, t))
    return apcover.APCoverInstance(inst.mu, inst.nu, kept)


def verify_pipeline(
    kind, obj, stages=STAGES, max_scale: int = 10**7, corrupt: bool = False, parity_trick=False
) -> PipelineReport:
    rep = PipelineReport()
    stages = [s for s in STAGES if s in stages]
    if kind == "cnf":
        red = satred.reduce_3sat_to_apcover(obj, parity_trick)
        inst = red.instance
    elif kind == "apcover":
        inst = obj
        stages = [s for s in stages if s != "sat"]
    else:
        raise UsageError("verify-pipeline takes a CNF or AP-COVER input")
    enc = encode.encode_instance(corrupt_instance(inst) if corrupt else inst)

    def run(stage):
        if stage == "sat":
            return satred.count_sat(obj)
        if stage == "apcover":
            return apcover.count_apcover(inst, max_scale)
        if stage == "sentence":
            return presburger.count_certified(encode.build_sentence3(enc))
        if stage == "gip1":
            return gip.count_gip(geometry.build_system1(enc), max_scale=max_scale)
        if stage == "gip2":
            return gip.count_gip(geometry.build_system2(enc), max_scale=max_scale)
        if stage == "bilevel":
            return int(optimize.solve_bilevel_brute(optimize.build_bilevel(enc), max_scale) > 0)
        if stage == "pareto":
            best, _ = optimize.solve_pareto_brute(optimize.build_pareto(enc), max_scale)
            return int(best < 0)

    ref = None
    for st in stages:
        t0 = time.perf_counter()
        try:
            c = run(st)
        except ScaleError as exc:
            rep.status[st] = "SKIPPED"
            rep.timings[st] = time.perf_counter() - t0
            rep.counts[st] = "- (over --max-scale)"
            rep.reasons[st] = str(exc)
            continue
        rep.timings[st] = time.perf_counter() - t0
        rep.counts[st] = c
        rep.status[st] = "ok"
        # bilevel and Pareto carry only the yes/no bit of the count
        want = ref[1] if ref is not None else None
        if ref is not None and st in ("bilevel", "pareto"):
            want = int(want > 0)
        if ref is not None and c != want and rep.mismatch is None:
            rep.mismatch = (ref[0], ref[1], st, c)
            rep.status[st] = "MISMATCH"
        if ref is None:
            ref = (st, c)
    return rep


# property suites


def _suite_lemma(seed):
    from shortpa.contfrac import chain_points, convergents, to_odd_cfrac
    from fractions import Fraction

    rng = random.Random(seed)
    for _ in range(20):
        q = rng.randint(1, 60)
        p = rng.randint(2 * q + 1, 4 * q + 2)
        cf = to_odd_cfrac(Fraction(p, q))
        if cf.a[0] < 2 or Fraction(p, q).denominator != q:
            continue
        ch = convergents(cf)
        pts = {tuple(x) for x in chain_points(ch, skip_prefix=cf.a[0])}
        for y in geometry.lattice_points(geometry.triangle_Q(ch.p, ch.q, cf.a[0])):
            if geometry.parallelogram_lattice_free(y, ch.p, ch.q) != (tuple(y) in pts):
                return False
    return True


def _suite_parsimony(seed):
    rng = random.Random(seed)
    for _ in range(10):
        f = satred.random_cnf(rng, rng.randint(1, 3), rng.randint(1, 5))
        red = satred.reduce_3sat_to_apcover(f)
        s = encode.build_sentence3(encode.encode_instance(red.instance))
        if not satred.count_sat(f) == apcover.count_apcover(red.instance) == presburger.count_certified(s):
            return False
    return True


def _suite_conditions(seed):
    rng = random.Random(seed)
    for _ in range(30):
        k = rng.randint(1, 3)
        triples = [
            apcover.APTriple(rng.randint(2, 9), rng.randint(1, 9), rng.randint(1, 9)) for _ in range(k)
        ]
        mu = rng.randint(1, 9)
        inst = apcover.APCoverInstance(mu, mu + rng.randint(0, 9), tuple(triples))
        inst, shift = apcover.normalize(inst)
        enc = encode.build_encoding(inst, shift)
        if not all(encode.check_conditions(enc).values()):
            return False
    return True


def _suite_geometry(seed):
    from fractions import Fraction

    rng = random.Random(seed)
    for _ in range(20):
        d = rng.randint(2, 4)
        pts = {tuple(Fraction(rng.randint(-4, 4)) for _ in range(d)) for _ in range(rng.randint(d + 1, 9))}
        if geometry.affine_dim(sorted(pts)) < d:
            continue
        V = geometry.VPolytope(d, tuple(sorted(pts)))
        H = geometry.facets_of(V)
        if H != geometry.facets_brute(V):
            return False
        if not set(geometry.vertices_of(H).vertices) <= pts:
            return False
    return True


SUITES = {
    "lemma-easy": _suite_lemma,
    "parsimony": _suite_parsimony,
    "conditions": _suite_conditions,
    "geometry": _suite_geometry,
}


def _run_suite(args):
    name, seed = args
    return name, SUITES[name](seed)


def run_props(names, seed: int, jobs: int):
    work = [(n, seed) for n in names]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_suite, work))
    else:
        results = [_run_suite(w) for w in work]
    return results


# argument handling


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shortpa", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-scale", type=int, default=10**7, help="brute-force size limit")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--seed", type=int, default=0, help="seed for random suites")
    sub = ap.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("reduce", parents=[common], help="reduce an instance to a target format")
    r.add_argument("input")
    r.add_argument("--target", choices=TARGETS, required=True)
    r.add_argument("--parity-trick", action="store_true")
    r.add_argument("-o", "--output")

    for name in ("decide", "count"):
        p = sub.add_parser(name, parents=[common], help=f"{name} any supported instance file")
        p.add_argument("input")

    v = sub.add_parser("verify-pipeline", parents=[common], help="run stages and compare counts")
    v.add_argument("input")
    v.add_argument("--stages", default=",".join(STAGES))
    v.add_argument("--parity-trick", action="store_true")
    v.add_argument("--corrupt", action="store_true", help="debug: perturb the encoding")
    v.add_argument("--json", action="store_true")
    v.add_argument("--timings", action="store_true", help="append wall-clock times (not deterministic)")

    k = sub.add_parser("gen-kpt", parents=[common], help="Fibonacci PIP family report")
    k.add_argument("s", type=int)
    k.add_argument("-o", "--output")

    for name in ("gen-bilevel", "gen-pareto"):
        g = sub.add_parser(name, parents=[common], help=f"write a {name[4:]} instance")
        g.add_argument("input")
        g.add_argument("--parity-trick", action="store_true")
        g.add_argument("--solve", action="store_true", help="also print the brute-force value")
        g.add_argument("-o", "--output")

    pr = sub.add_parser("props", parents=[common], help="run invariant suites")
    pr.add_argument("--suite", action="append", choices=sorted(SUITES))
    return ap


def _main(args) -> int:
    if args.cmd == "reduce":
        kind, obj = load(_read(args.input))
        _write(reduce_to(kind, obj, args.target, args.parity_trick), args.output)
        return EXIT_YES
    if args.cmd == "decide":
        kind, obj = load(_read(args.input))
        ans = decide(kind, obj, args.max_scale)
        print("yes" if ans else "no")
        return EXIT_YES if ans else EXIT_NO
    if args.cmd == "count":
        kind, obj = load(_read(args.input))
        print(count(kind, obj, args.max_scale))
        return EXIT_YES
    if args.cmd == "verify-pipeline":
        kind, obj = load(_read(args.input))
        stages = [s.strip() for s in args.stages.split(",") if s.strip()]
        bad = set(stages) - set(STAGES)
        if bad:
            raise UsageError(f"unknown stages: {sorted(bad)}")
        rep = verify_pipeline(kind, obj, stages, args.max_scale, args.corrupt, args.parity_trick)
        if args.json:
            print(json.dumps({"status": rep.status, "counts": {k: str(v) for k, v in rep.counts.items()}, "passed": rep.passed}, sort_keys=True))
        else:
            print("\n".join(rep.lines(args.timings)))
        return EXIT_YES if rep.passed else EXIT_MISMATCH
    if args.cmd == "gen-kpt":
        if args.s > kpt.KPT_MAX_S:
            raise ScaleError(f"s = {args.s} exceeds the limit {kpt.KPT_MAX_S}")
        fam = kpt.fibonacci_family(args.s)
        pts = kpt.infeasible_set(fam)
        convex = kpt.strictly_convex(pts)
        mfree = kpt.midpoint_free(pts)
        text = kpt.dumps_pip(fam.pip)
        text += f"# cfrac {fam.cfrac}\n# p {fam.p} q {fam.q}\n"
        text += "# infeasible " + " ".join(f"({a},{b})" for a, b in pts) + "\n"
        text += f"# points {len(pts)} convex {'yes' if convex else 'no'} midpoint-free {'yes' if mfree else 'no'}\n"
        _write(text, args.output)
        return EXIT_YES if convex and mfree else EXIT_MISMATCH
    if args.cmd in ("gen-bilevel", "gen-pareto"):
        kind, obj = load(_read(args.input))
        target = args.cmd[4:]
        _write(reduce_to(kind, obj, target, args.parity_trick), args.output)
        if args.solve:
            inst = to_apcover(kind, obj, args.parity_trick)
            enc = encode.encode_instance(inst)
            if target == "bilevel":
                val = optimize.solve_bilevel_brute(optimize.build_bilevel(enc), args.max_scale)
            else:
                val = optimize.solve_pareto_brute(optimize.build_pareto(enc), args.max_scale)[0]
            print(f"# value {val}", file=sys.stderr)
        return EXIT_YES
    if args.cmd == "props":
        names = args.suite or sorted(SUITES)
        ok = True
        for name, passed in run_props(names, args.seed, args.jobs):
            print(f"{name:12s} {'PASS' if passed else 'FAIL'}")
            ok &= passed
        return EXIT_YES if ok else EXIT_MISMATCH
    raise UsageError(f"unknown command {args.cmd}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _main(args)
    except ScaleError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_SCALE
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
