"""Command-line front end.

Every command prints one JSON object {"query", "verdict", "witness", "ms"}
(or a tab-separated line with ``--format tsv``). Exit codes: 0 decided,
1 usage error, 2 budget exceeded, 3 input outside the supported range,
4 table1-verify found a mismatch with the shipped list.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from . import fqf
from .codes import kummer_check, lemma52_search
from .k3 import (K3Error, emb_complex, emb_supersingular, load_table1, nk, nk0,
                 residue_set, lift_residues, ss_reduction_possible)
from .local import LocalError
from .overlattices import BudgetExceeded, enumerate_overlattices
from .roots import RootsError, children, enumerate_dynkin_types, parse_dynkin, sigma_fqf

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_SCOPE, EXIT_MISMATCH = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


class ResultCache:
    """JSON-lines file of nk0 verdicts keyed by canonical type string."""

    def __init__(self, path: str | None):
        self.path = Path(path) if path else None
        self.records = {}
        if self.path and self.path.exists():
            for line in self.path.read_text().splitlines():
                if line.strip():
                    self._merge(json.loads(line))

    def _merge(self, rec):
        old = self.records.get(rec["type"])
        if old is not None and old["nk0"] != rec["nk0"]:
            raise RuntimeError(f"conflicting cached verdicts for {rec['type']}")
        self.records[rec["type"]] = rec

    def get(self, key):
        return self.records.get(key)

    def put(self, t, verdict, witness, ms):
        rec = {"type": str(t), "rank": t.rank, "nk0": verdict, "witness": witness,
               "ms": round(ms, 3), "version": __version__,
               "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}
        if rec["type"] in self.records and self.records[rec["type"]]["nk0"] == verdict:
            return self.records[rec["type"]]
        self._merge(rec)
        if self.path:
            with self.path.open("a") as fh:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
        return rec


def _emit(args, query, verdict, witness, ms):
    if args.format == "tsv":
        print("\t".join([json.dumps(query, sort_keys=True), json.dumps(verdict),
                         json.dumps(witness, sort_keys=True), f"{ms:.1f}"]))
    else:
        print(json.dumps({"query": query, "verdict": verdict, "witness": witness,
                          "ms": round(ms, 1)}, sort_keys=True))


def _nk0_cached(t, cache, budget):
    rec = cache.get(str(t))
    if rec is not None:
        return rec["nk0"], rec["witness"]
    res = nk0(t, budget_seconds=budget)
    cache.put(t, res.verdict, res.witness, res.elapsed_ms)
    return res.verdict, res.witness


def cmd_nk0(args, cache):
    t = parse_dynkin(args.type)
    v, w = _nk0_cached(t, cache, args.budget_seconds)
    return {"cmd": "nk0", "type": str(t)}, v, w


def cmd_nk(args, cache):
    t = parse_dynkin(args.type)
    res = nk(args.p, args.sigma, t, verify_direct=args.verify_direct)
    w = {"nk0_witness": res.witness, **res.extra} if res.witness or res.extra else None
    return {"cmd": "nk", "p": args.p, "sigma": args.sigma, "type": str(t)}, res.verdict, w


def _read_gram(path):
    text = Path(path).read_text().strip()
    if text.startswith("["):
        return json.loads(text)
    return [[int(x) for x in line.split()] for line in text.splitlines() if line.strip()]


def cmd_emb(args, cache):
    if bool(args.gram) == bool(args.type):
        raise UsageError("give exactly one of --gram or --type")
    if args.gram:
        lat = fqf.gram_lattice(_read_gram(args.gram))
        form = fqf.discriminant_form_of_gram(lat)
        t_plus, t_minus = lat.signature
        label = {"gram": str(args.gram)}
    else:
        t = parse_dynkin(args.type)
        form, t_plus, t_minus = sigma_fqf(t), 0, t.rank
        label = {"type": str(t)}
    if args.target == "complex":
        ok, local = emb_complex(form, t_plus, t_minus, with_witness=True)
        w = {str(l): str(x) for l, x in sorted(local.items())} if ok else None
        return {"cmd": "emb", "target": "complex", **label}, ok, w
    try:
        p, sigma = (int(x) for x in args.target.split(":"))
    except ValueError:
        raise UsageError("target must be 'complex' or 'P:SIGMA'")
    ok = emb_supersingular(form, t_plus, t_minus, p, sigma)
    return {"cmd": "emb", "target": args.target, **label}, ok, None


def cmd_residues(args, cache):
    t = parse_dynkin(args.type)
    mod, res = residue_set(t, args.sigma)
    out_mod = args.modulus or mod
    if out_mod % mod == 0:
        shown = sorted(lift_residues(mod, res, out_mod))
    else:
        shown = sorted({x % out_mod for x in res})
        rest = {x % out_mod for x in range(1, mod) if x not in res and _unit(x, mod)}
        if set(shown) & rest:
            raise UsageError(f"residue set is not determined modulo {out_mod}")
    return ({"cmd": "residues", "type": str(t), "sigma": args.sigma},
            bool(res), {"modulus": out_mod, "residues": shown})


def _unit(x, m):
    from math import gcd
    return gcd(x, m) == 1


def _worker(key, budget):
    res = nk0(key, budget_seconds=budget)
    return key, res.verdict, res.witness, res.elapsed_ms


def run_scan(max_rank, cache, jobs=1, budget=None, log=None):
    """Rank-by-rank scan; returns the list of minimal false types."""
    verdict = {"0": True}
    minimal = []
    by_rank = {}
    for t in enumerate_dynkin_types(max_rank):
        by_rank.setdefault(t.rank, []).append(t)
    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        for rank in sorted(by_rank):
            todo = []
            for t in by_rank[rank]:
                key = str(t)
                if any(not verdict[str(k)] for k in children(t)):
                    verdict[key] = False
                    continue
                rec = cache.get(key)
                if rec is not None:
                    verdict[key] = rec["nk0"]
                else:
                    todo.append(key)
            if pool:
                results = list(pool.map(_worker, todo, [budget] * len(todo)))
            else:
                results = [_worker(k, budget) for k in todo]
            for key, v, w, ms in results:
                t = parse_dynkin(key)
                cache.put(t, v, w, ms)
                verdict[key] = v
            for t in by_rank[rank]:
                if not verdict[str(t)] and all(verdict[str(k)] for k in children(t)):
                    minimal.append(t)
            if log:
                log(f"rank {rank}: {len(by_rank[rank])} types, {len(todo)} evaluated, "
                    f"{sum(1 for t in minimal if t.rank == rank)} minimal")
    finally:
        if pool:
            pool.shutdown()
    return minimal


def cmd_scan(args, cache):
    if args.max_rank > 19:
        raise K3Error("the scan covers rank <= 19 only")
    log = (lambda s: print(s, file=sys.stderr)) if args.verbose else None
    minimal = run_scan(args.max_rank, cache, args.jobs, args.budget_seconds, log)
    return ({"cmd": "scan", "max_rank": args.max_rank}, [str(t) for t in minimal],
            {"count": len(minimal)})


def cmd_table1_verify(args, cache):
    log = (lambda s: print(s, file=sys.stderr)) if args.verbose else None
    minimal = run_scan(19, cache, args.jobs, args.budget_seconds, log)
    expected = {str(t) for t in load_table1()}
    got = {str(t) for t in minimal}
    return ({"cmd": "table1-verify"}, got == expected,
            {"computed": len(got), "expected": len(expected),
             "missing": sorted(expected - got), "extra": sorted(got - expected)})


def cmd_lemma52(args, cache):
    rep = lemma52_search()
    dims = {str(k): v for k, v in rep["classes_per_dim"].items()}
    ok = not rep["counterexamples"] and rep["classes_per_dim"].get(5) == 1
    codes5 = [{"rows": c.hex_rows(), "weights": c.weight_enumerator()}
              for c in rep["codes"].get(5, [])]
    return ({"cmd": "lemma52"}, ok,
            {"classes_per_dim": dims, "counterexamples": len(rep["counterexamples"]),
             "dim5_codes": codes5})


def cmd_kummer(args, cache):
    checked, failures = 0, []
    for ov in enumerate_overlattices("16A1"):
        if ov.form.leng <= 6:
            checked += 1
            if not kummer_check(ov):
                failures.append([list(g) for g in ov.generators])
    return ({"cmd": "kummer"}, not failures and checked > 0,
            {"checked": checked, "failures": failures})


def cmd_ssred(args, cache):
    return ({"cmd": "ssred", "discT": args.discT, "p": args.p},
            ss_reduction_possible(args.discT, args.p), None)


COMMANDS = {
    "nk0": cmd_nk0, "nk": cmd_nk, "emb": cmd_emb, "residues": cmd_residues,
    "scan": cmd_scan, "table1-verify": cmd_table1_verify, "lemma52": cmd_lemma52,
    "kummer": cmd_kummer, "ssred": cmd_ssred,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache", help="JSON-lines result cache")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--budget-seconds", type=float, default=900.0)
    common.add_argument("--verify-direct", action="store_true")
    common.add_argument("--format", choices=("json", "tsv"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")
    p = _Parser(prog="k3rdp", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    s = sub.add_parser("nk0", parents=[common])
    s.add_argument("type")
    s = sub.add_parser("nk", parents=[common])
    s.add_argument("p", type=int)
    s.add_argument("sigma", type=int)
    s.add_argument("type")
    s = sub.add_parser("emb", parents=[common])
    s.add_argument("--gram")
    s.add_argument("--type")
    s.add_argument("--target", default="complex", help="'complex' or 'P:SIGMA'")
    s = sub.add_parser("residues", parents=[common])
    s.add_argument("type")
    s.add_argument("sigma", type=int)
    s.add_argument("--modulus", type=int)
    s = sub.add_parser("scan", parents=[common])
    s.add_argument("max_rank", type=int)
    sub.add_parser("table1-verify", parents=[common])
    sub.add_parser("lemma52", parents=[common])
    sub.add_parser("kummer", parents=[common])
    s = sub.add_parser("ssred", parents=[common])
    s.add_argument("discT", type=int)
    s.add_argument("p", type=int)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.monotonic()
    try:
        cache = ResultCache(args.cache)
        query, verdict, witness = COMMANDS[args.cmd](args, cache)
    except (UsageError, RootsError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (K3Error, LocalError, fqf.FqfError) as e:
        print(f"out of scope: {e}", file=sys.stderr)
        return EXIT_SCOPE
    _emit(args, query, verdict, witness, (time.monotonic() - start) * 1000)
    if args.cmd == "table1-verify" and verdict is not True:
        return EXIT_MISMATCH
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
