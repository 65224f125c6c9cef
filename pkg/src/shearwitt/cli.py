"""Command-line entry point.

    shearwitt verify [SUITE] [--suite S] [--ring K ...] [--p P] ... [--out PATH]
    shearwitt eval "add (teich 1) (teich 1)" --ring zmod:2:2 --level 2
    shearwitt catalog
    shearwitt cache build|verify|show --p P [--cache DIR]

Exit codes: 0 all checks pass, 1 some check fails, 2 configuration or cache
error.  Reports are JSON with sorted keys and records sorted by check id, so
two runs with the same configuration and seed are byte-identical.
"""
import argparse
import json
import os
import re
import sys
from pathlib import Path

from . import __version__
from .errors import (CacheMissing, ConfigError, CorruptCache, LevelMismatch, LevelTooLarge,
                     ParseError, ShearWittError)
from .finring import catalog_keys, get_ring
from .suites import RUNNERS, SUITES, SuiteConfig, jsonable, validate
from .witt import WittVec, arith, special_units, tilde_V_tuple
from .wittpoly import PolyCache, cache_io, install_cache, shared_cache

REPORT_VERSION = "1"
CACHE_ENV = "SHEARWITT_CACHE_DIR"

REPORT_SCHEMA = {
    "type": "object",
    "required": ["version", "tool_version", "config", "checks", "summary"],
    "properties": {
        "version": {"const": REPORT_VERSION},
        "tool_version": {"type": "string"},
        "config": {"type": "object"},
        "checks": {"type": "array", "items": {
            "type": "object",
            "required": ["id", "label", "status", "counts", "witnesses"],
            "properties": {
                "id": {"type": "string"},
                "label": {"type": "string"},
                "status": {"enum": ["pass", "fail", "skip"]},
                "counts": {"type": "object"},
                "witnesses": {"type": "array"},
            },
            "if": {"properties": {"status": {"const": "fail"}}},
            "then": {"properties": {"witnesses": {"minItems": 1}}},
        }},
        "summary": {"type": "object", "required": ["pass", "fail", "skip"]},
    },
}


# -- suites and reports ----------------------------------------------------------

def run_suite(cfg):
    """Run one named suite (or all of them) and return the report dict."""
    validate(cfg)
    names = SUITES if cfg.suite == "all" else (cfg.suite,)
    checks = []
    for name in names:
        checks += RUNNERS[name](cfg)
    checks.sort(key=lambda r: r["id"])
    ids = [r["id"] for r in checks]
    if len(set(ids)) != len(ids):
        raise ConfigError("duplicate check ids in suite")
    summary = {s: sum(r["status"] == s for r in checks) for s in ("pass", "fail", "skip")}
    return {"version": REPORT_VERSION, "tool_version": __version__, "config": cfg.echo(),
            "checks": checks, "summary": summary}


def dumps_report(report):
    return json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n"


def format_text(report):
    lines = []
    for r in report["checks"]:
        lines.append(f"{r['status'].upper():4}  {r['id']}  ({r['label']})")
        for w in r["witnesses"]:
            lines.append(f"      witness: {json.dumps(w, sort_keys=True)}")
    s = report["summary"]
    lines.append(f"{s['pass']} passed, {s['fail']} failed, {s['skip']} skipped")
    return "\n".join(lines) + "\n"


# -- polynomial cache files --------------------------------------------------------

def cache_dir(arg):
    d = arg or os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def cache_file(d, p):
    return d / f"witt-poly-p{p}.json"


def load_caches(d):
    if d is None or not d.is_dir():
        return []
    loaded = []
    for p in (2, 3, 5):
        f = cache_file(d, p)
        if f.exists():
            install_cache(PolyCache.load(f))
            loaded.append(p)
    return loaded


def save_caches(d):
    if d is None:
        return
    d.mkdir(parents=True, exist_ok=True)
    for p in (2, 3, 5):
        c = shared_cache(p)
        if c.entries:
            c.save(cache_file(d, p))


# -- eval ----------------------------------------------------------------------------

# operator -> arity; literals are integers (ring element codes) and [c0,c1,...]
OPS = {"add": 2, "sub": 2, "mul": 2, "neg": 1, "F": 1, "V": 1, "Vt": 1, "delta": 1,
       "ghost": 1, "teich": 1, "int": 1, "u": 0, "bp": 0, "one": 0, "zero": 0}

TOKEN = re.compile(r"\s*(?:(\[[^\]]*\])|(-?\d+)|([A-Za-z_]\w*)|(\()|(\)))")


def tokenize(text):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at {pos}: {text[pos:pos + 10]!r}")
        vec, num, name, lp, rp = m.groups()
        if vec is not None:
            body = vec[1:-1].strip()
            try:
                out.append(("vec", tuple(int(c) for c in body.split(",")) if body else ()))
            except ValueError:
                raise ParseError(f"bad vector literal {vec}")
        elif num is not None:
            out.append(("lit", int(num)))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("(", None) if lp else (")", None))
        pos = m.end()
    return out


def parse(text):
    """Prefix expressions with fixed arities, e.g. ``add (teich 1) (V (u))``."""
    toks = tokenize(text)
    pos = 0

    def expr():
        nonlocal pos
        if pos >= len(toks):
            raise ParseError("unexpected end of expression")
        kind, val = toks[pos]
        pos += 1
        if kind == "(":
            e = expr()
            if pos >= len(toks) or toks[pos][0] != ")":
                raise ParseError("missing ')'")
            pos += 1
            return e
        if kind in ("lit", "vec"):
            return (kind, val)
        if kind == "name":
            if val not in OPS:
                raise ParseError(f"unknown operator {val!r}")
            return (val,) + tuple(expr() for _ in range(OPS[val]))
        raise ParseError("unexpected ')'")

    tree = expr()
    if pos != len(toks):
        raise ParseError(f"trailing input after position {pos}")
    return tree


def evaluate_expr(tree, R, N):
    """Evaluate a parsed expression; Witt vectors are WittVec, scalars are ints."""
    A = arith(R)
    op = tree[0]

    def vec(t):
        v = evaluate_expr(t, R, N)
        if not isinstance(v, WittVec):
            raise ParseError(f"expected a Witt vector, got {v!r}")
        return v

    def code(t):
        v = evaluate_expr(t, R, N)
        if not isinstance(v, int):
            raise ParseError(f"expected a ring element code, got {v!r}")
        return v

    if op == "lit":
        return tree[1]
    if op == "vec":
        if any(not 0 <= c < R.size for c in tree[1]):
            raise ParseError(f"component out of range for {R.name}")
        return WittVec(R, tree[1])
    if op in ("add", "sub", "mul"):
        x, y = vec(tree[1]), vec(tree[2])
        if x.level != y.level:
            raise LevelMismatch(f"levels {x.level} and {y.level}")
        fn = {"add": A.add, "sub": A.sub, "mul": A.mul}[op]
        return WittVec(R, fn(x.comps, y.comps))
    if op == "neg":
        return WittVec(R, A.neg(vec(tree[1]).comps))
    if op == "F":
        x = vec(tree[1])
        return WittVec(R, A.frob_charp(x.comps) if R.char_p else A.frob(x.comps))
    if op == "V":
        return WittVec(R, A.ver(vec(tree[1]).comps))
    if op == "Vt":
        return WittVec(R, tilde_V_tuple(R, vec(tree[1]).comps))
    if op == "delta":
        return WittVec(R, A.delta(vec(tree[1]).comps))
    if op == "ghost":
        return tuple(A.ghost(vec(tree[1]).comps))
    if op == "teich":
        return WittVec(R, A.teich(code(tree[1]) % R.size, N))
    if op == "int":
        return WittVec(R, A.from_int(code(tree[1]), N))
    if op == "u":
        return special_units(R, N).u
    if op == "bp":
        return special_units(R, N).bp
    if op == "one":
        return WittVec(R, A.from_int(1, N))
    if op == "zero":
        return WittVec(R, (0,) * N)
    raise ParseError(f"unknown operator {op!r}")


def eval_string(text, ring_key, N):
    R = get_ring(ring_key)
    v = evaluate_expr(parse(text), R, N)
    if isinstance(v, WittVec):
        return repr(v), v.serialize()
    if isinstance(v, tuple):
        return "(" + ",".join(R.fmt(c) for c in v) + ")", \
            {"ring_key": ring_key, "ghost": [list(R.coords(c)) for c in v]}
    return str(v), {"ring_key": ring_key, "code": v}


# -- argument parsing --------------------------------------------------------------------

def add_suite_flags(p):
    p.add_argument("--ring", action="append", default=[],
                   help="ring key, repeatable or comma separated")
    p.add_argument("--p", type=int)
    p.add_argument("--m", type=int, help="exponent of Z/p^m")
    p.add_argument("--n", type=int)
    p.add_argument("--mparam", type=int, help="m parameter of I_(n,m)")
    p.add_argument("--level", type=int, help="truncation level N")
    p.add_argument("--depth", type=int, help="depth L")
    p.add_argument("--window", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int)
    p.add_argument("--cache", help=f"polynomial cache directory (default ${CACHE_ENV})")


def build_parser():
    ap = argparse.ArgumentParser(prog="shearwitt", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("verify", help="run a named verification suite")
    v.add_argument("suite_pos", nargs="?", metavar="SUITE")
    v.add_argument("--suite", choices=SUITES + ("all",))
    add_suite_flags(v)
    v.add_argument("--out", help="write the report here instead of stdout")
    v.add_argument("--format", choices=("json", "text"), default="json")

    e = sub.add_parser("eval", help="evaluate a Witt vector expression")
    e.add_argument("expr")
    e.add_argument("--ring", default="zmod:2:2")
    e.add_argument("--level", type=int, default=1)
    e.add_argument("--cache")

    sub.add_parser("catalog", help="list the built-in rings")

    c = sub.add_parser("cache", help="build, verify or show polynomial cache files")
    c.add_argument("action", choices=("build", "verify", "show"))
    c.add_argument("--p", type=int, default=2)
    c.add_argument("--cache")
    return ap


def config_from_args(a):
    if a.suite and a.suite_pos and a.suite != a.suite_pos:
        raise ConfigError(f"conflicting suites {a.suite_pos!r} and {a.suite!r}")
    rings = [k for r in a.ring for k in r.split(",") if k]
    return SuiteConfig(suite=a.suite or a.suite_pos or "all", rings=rings, p=a.p, m=a.m,
                       n=a.n, mparam=a.mparam, level=a.level, depth=a.depth, window=a.window,
                       budget=a.budget, seed=a.seed, samples=a.samples)


def cmd_verify(a):
    cfg = config_from_args(a)
    d = cache_dir(a.cache)
    load_caches(d)
    report = run_suite(cfg)
    save_caches(d)
    text = dumps_report(report) if a.format == "json" else format_text(report)
    if a.out:
        Path(a.out).write_text(text, encoding="utf-8")
        s = report["summary"]
        print(f"{s['pass']} passed, {s['fail']} failed, {s['skip']} skipped -> {a.out}")
    else:
        sys.stdout.write(text)
    return 1 if report["summary"]["fail"] else 0


def cmd_eval(a):
    load_caches(cache_dir(a.cache))
    shown, ser = eval_string(a.expr, a.ring, a.level)
    print(shown)
    print(json.dumps(ser, sort_keys=True))
    return 0


def cmd_catalog(a):
    for key in catalog_keys():
        R = get_ring(key)
        print(f"{key:24} {R.name:28} size={R.size} char_p={R.char_p}")
    return 0


def cmd_cache(a):
    d = cache_dir(a.cache)
    if d is None:
        raise ConfigError(f"no cache directory: pass --cache or set {CACHE_ENV}")
    f = cache_file(d, a.p)
    if a.action == "build":
        d.mkdir(parents=True, exist_ok=True)
        c = cache_io(f, "save", a.p)
        print(f"wrote {len(c.entries)} polynomials for p={a.p} to {f}")
        return 0
    if not f.exists():
        raise CacheMissing(f"no cache file {f}")
    if a.action == "verify":
        c = cache_io(f, "verify")
        print(f"{f}: {len(c.entries)} polynomials verified")
        return 0
    c = PolyCache.load(f)
    for fam, i in sorted(c.entries):
        print(f"{fam:6} {i}  terms={len(c.entries[(fam, i)])}")
    return 0


def main(argv=None):
    ap = build_parser()
    a = ap.parse_args(argv)
    handlers = {"verify": cmd_verify, "eval": cmd_eval, "catalog": cmd_catalog,
                "cache": cmd_cache}
    try:
        return handlers[a.cmd](a)
    except (ConfigError, CacheMissing, CorruptCache, LevelTooLarge) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except (ParseError, LevelMismatch, KeyError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except ShearWittError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
