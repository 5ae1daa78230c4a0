"""Command-line front end.

    pgiso isom {group,space,tensor} A B [--mode M] [--hint FILE] [--verify FILE]
    pgiso gen {tensor,group,pair} --p P --n N --m M --seed S -o OUT

Exit status: 0 isomorphic/isometric, 1 not, 2 inconclusive, 3 input or
precondition error, 64 usage error.
"""
import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__, fp
from .errors import BudgetExceeded, ParseError, PgisoError
from .group import (GroupConfig, build_group, construction_hint, format_cayley, group_decision,
                    parse_cayley, verify_class2_exp_p)
from .oracle import group_isom_bruteforce, space_isometry_bruteforce
from .space import format_space, parse_space
from .tensor import (IsometryConfig, SkewTensor, format_tensor, is_nondegenerate, parse_tensor,
                     rank_profile, space_isometry, tensor_from_space, tensor_isometry, transform)

EXIT = {"isometric": 0, "not_isometric": 1, "inconclusive": 2}
EXIT_ERROR, EXIT_USAGE = 3, 64


class _Parser(argparse.ArgumentParser):
    # argparse would exit with 2, which means "inconclusive" here
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        sys.exit(EXIT_USAGE)


def _bounds(text):
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("bounds must be four integers l1,l2,l3,l4")
    if len(vals) != 4 or min(vals) < 0 or vals[3] < 1:
        raise argparse.ArgumentTypeError("bounds must be four non-negative integers, l4 >= 1")
    return vals


# matrix lists (hint and witness files)

def format_matrices(mats, p):
    return "".join(fp.format_matrix(A, p) for A in mats)


def parse_matrices(text):
    """Consecutive 'p rows cols' blocks; returns (list of matrices, p)."""
    lines = fp.content_lines(text)
    out, p, i = [], None, 0
    while i < len(lines):
        head = fp._ints(lines[i])
        if len(head) != 3:
            raise ParseError("matrix header must be 'p rows cols'")
        q, rows, cols = head
        if p is not None and q != p:
            raise ParseError("matrices over different primes")
        p = q
        out.append(fp.parse_body(lines[i + 1:i + 1 + rows], rows, cols, p))
        i += 1 + rows
    return out, p


def _read(path):
    try:
        with open(path) as f:
            return f.read()
    except OSError as e:
        raise ParseError("cannot read %s: %s" % (path, e.strerror))


def _digest(text):
    return hashlib.sha256(text.encode()).hexdigest()


def _load(kind, text):
    if kind == "group":
        return parse_cayley(text)
    if kind == "space":
        return parse_space(text)
    return parse_tensor(text)


def _tensors_for(kind, obj):
    """The tensor a witness (N, M) refers to."""
    if kind == "group":
        return verify_class2_exp_p(obj).tensor
    if kind == "space":
        return tensor_from_space(obj)
    return obj


def _check_witness(kind, a, b, N, M):
    G, H = _tensors_for(kind, a), _tensors_for(kind, b)
    p = G.p
    if N.shape != (G.n, G.n) or M.shape != (G.m, G.m) or G.shape() != H.shape():
        return False
    if not (fp.is_invertible(N, p) and fp.is_invertible(M, p)):
        return False
    return transform(G, N, M) == H


def _decide(kind, a, b, args):
    cfg = IsometryConfig(mode=args.mode, seed=args.seed, bounds=args.bounds, budget=args.budget,
                         strict=args.strict)
    hint = None
    if args.hint:
        mats, _ = parse_matrices(_read(args.hint))
        if len(mats) != 2:
            raise ParseError("hint file must hold two matrices N and M")
        hint = tuple(mats)
    if kind == "tensor":
        d = tensor_isometry(a, b, cfg, hint=hint)
        return d.status, d.witness, d.reason, d.counters
    if kind == "space":
        d = space_isometry(a, b, cfg, hint=hint)
        return d.status, d.witness, d.reason, d.counters
    # groups
    if args.mode == "oracle":
        ok = group_isom_bruteforce(a, b, budget=args.budget * 100)
        return ("isometric" if ok else "not_isometric"), None, "generating-set search", {}
    d = group_decision(a, b, GroupConfig(branch="baer", tensor=cfg), hint=hint)
    return d.status, d.witness, d.reason, d.counters


def cmd_isom(args):
    texts = [_read(args.a), _read(args.b)]
    a, b = (_load(args.kind, t) for t in texts)
    t0 = time.perf_counter()
    if args.verify:
        mats, _ = parse_matrices(_read(args.verify))
        if len(mats) != 2:
            raise ParseError("witness file must hold two matrices N and M")
        ok = _check_witness(args.kind, a, b, *mats)
        status, witness, reason, counters = (
            ("isometric", tuple(mats), "witness verified", {}) if ok
            else ("not_isometric", None, "witness does not verify", {}))
    else:
        status, witness, reason, counters = _decide(args.kind, a, b, args)
        if witness is not None:
            assert _check_witness(args.kind, a, b, *witness)
    elapsed = time.perf_counter() - t0
    report = {
        "decision": status,
        "reason": reason,
        "counters": {k: int(v) for k, v in counters.items()},
        "witness": None if witness is None else {"N": np.asarray(witness[0]).tolist(),
                                                 "M": np.asarray(witness[1]).tolist()},
        "provenance": {"inputs": [_digest(t) for t in texts], "kind": args.kind,
                       "mode": args.mode, "seed": args.seed, "version": __version__},
    }
    if args.timings:
        report["timings"] = {"seconds": round(elapsed, 6)}
    if args.witness_out and witness is not None:
        with open(args.witness_out, "w") as f:
            f.write(format_matrices(witness, _tensors_for(args.kind, a).p))
    if args.format == "structured":
        sys.stdout.write(json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n")
    else:
        print("decision: %s" % status)
        print("reason: %s" % reason)
        for k in sorted(report["counters"]):
            print("counter %s: %d" % (k, report["counters"][k]))
        if witness is not None:
            print("witness N:\n" + fp.format_body(witness[0]))
            print("witness M:\n" + fp.format_body(witness[1]))
        if args.timings:
            print("seconds: %.3f" % elapsed)
    return EXIT[status]


# generation

def random_tensor(p, n, m, seed, nondegenerate=True, tries=1000):
    rng = fp.make_rng(seed, 1)
    for _ in range(tries):
        data = np.array([fp.random_skew(n, p, rng) for _ in range(m)], dtype=np.int64)
        try:
            G = SkewTensor(data, p)
        except PgisoError:
            continue
        if not nondegenerate or is_nondegenerate(G):
            return G
    raise BudgetExceeded("no suitable tensor with p=%d n=%d m=%d in %d draws" % (p, n, m, tries))


def _certified_different(G, H, budget):
    """True only when G, H are provably not isometric."""
    a, b = rank_profile(G), rank_profile(H)
    if a is not None and b is not None and a != b:
        return True
    try:
        return space_isometry_bruteforce(G.space(), H.space(), budget=budget) is None
    except BudgetExceeded:
        return False


def gen_pair(p, n, m, seed, isometric=True, attempts=50, budget=10 ** 7):
    """(A, B, hint). Isometric pairs are (G, transform(G, N, M), (N, M)).

    Non-isometric pairs keep the shape when a certified pair turns up;
    otherwise B is a space of dimension m - 1 (or m + 1) and the pair is
    returned as spaces. hint is None then.
    """
    G = random_tensor(p, n, m, seed)
    if isometric:
        rng = fp.make_rng(seed, 2)
        N, M = fp.random_invertible(n, p, rng), fp.random_invertible(m, p, rng)
        return G, transform(G, N, M), (N, M)
    for i in range(attempts):
        H = random_tensor(p, n, m, (seed, i + 1))
        if _certified_different(G, H, budget):
            return G, H, None
    m2 = m - 1 if m > 1 else m + 1
    H = random_tensor(p, n, m2, (seed, 0), nondegenerate=False)
    return G.space(), H.space(), None


def _write(path, text):
    with open(path, "w") as f:
        f.write(text)


def cmd_gen(args):
    p = args.p
    try:
        fp.check_prime(p)
    except ValueError as e:
        raise ParseError(str(e))
    if p == 2:
        raise ParseError("p must be odd")
    if args.kind == "tensor":
        G = random_tensor(p, args.n, args.m, args.seed)
        _write(args.out, format_tensor(G))
        print(args.out)
        return 0
    if args.kind == "group":
        G = random_tensor(p, args.n, args.m, args.seed)
        g, _ = build_group(G, fp.eye(G.n), fp.eye(G.m), seed=args.seed)
        _write(args.out, format_cayley(g))
        print(args.out)
        return 0
    os.makedirs(args.out, exist_ok=True)
    A, B, hint = gen_pair(p, args.n, args.m, args.seed, isometric=not args.non_isometric)
    if args.groups:
        if not args.non_isometric:
            ga, pa = build_group(A, fp.eye(A.n), fp.eye(A.m), seed=args.seed)
            gb, pb = build_group(A, hint[0], hint[1], seed=(args.seed, 1))
            hint = construction_hint(verify_class2_exp_p(ga), pa, verify_class2_exp_p(gb), pb)
        else:
            if not isinstance(A, SkewTensor):
                A, B = tensor_from_space(A), tensor_from_space(B)
            ga, _ = build_group(A, fp.eye(A.n), fp.eye(A.m), seed=args.seed)
            gb, _ = build_group(B, fp.eye(B.n), fp.eye(B.m), seed=(args.seed, 1),
                                allow_degenerate=True)
        files = {"a.cayley": format_cayley(ga), "b.cayley": format_cayley(gb)}
    elif isinstance(A, SkewTensor):
        files = {"a.tensor": format_tensor(A), "b.tensor": format_tensor(B)}
    else:
        files = {"a.space": format_space(A), "b.space": format_space(B)}
    if hint is not None:
        files["hint.txt"] = format_matrices(hint, p)
    for name, text in sorted(files.items()):
        path = os.path.join(args.out, name)
        _write(path, text)
        print(path)
    return 0


def build_parser():
    ap = _Parser(prog="pgiso", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    iso = sub.add_parser("isom", help="decide isomorphism or isometry of two inputs")
    iso.add_argument("kind", choices=["group", "space", "tensor"])
    iso.add_argument("a")
    iso.add_argument("b")
    iso.add_argument("--mode", choices=["guided", "enumerate", "oracle"], default="guided")
    iso.add_argument("--seed", type=int, default=0)
    iso.add_argument("--bounds", type=_bounds, default=(1, 1, 1, 3))
    iso.add_argument("--budget", type=int, default=20000,
                     help="enumerate mode: max semi-canonical builds; oracle: candidate cap / 100")
    iso.add_argument("--strict", action="store_true",
                     help="error instead of inconclusive when no tuple fits the bounds")
    iso.add_argument("--hint", help="file with N and M guiding the image tuple")
    iso.add_argument("--verify", help="check a witness file instead of searching")
    iso.add_argument("--witness-out", help="write the witness (N, M) here")
    iso.add_argument("--format", choices=["text", "structured"], default="text")
    iso.add_argument("--timings", action="store_true", help="include wall-clock time in the report")
    iso.set_defaults(func=cmd_isom)

    gen = sub.add_parser("gen", help="generate test instances")
    gen.add_argument("kind", choices=["tensor", "group", "pair"])
    gen.add_argument("--p", type=int, default=3)
    gen.add_argument("--n", type=int, default=2)
    gen.add_argument("--m", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--non-isometric", action="store_true")
    gen.add_argument("--groups", action="store_true", help="pair: emit Cayley tables")
    gen.add_argument("-o", "--out", required=True, help="output file, or directory for pairs")
    gen.set_defaults(func=cmd_gen)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PgisoError as e:
        sys.stderr.write("error: %s: %s\n" % (type(e).__name__, e))
    return EXIT_ERROR
