"""Named verification suites.

Each suite is a function ``cfg -> list of records``; a record is a plain dict
``{id, label, status, counts, witnesses}``.  Randomness is drawn from a
``random.Random`` seeded by the config seed and the check id, so a run is
reproducible check by check.
"""
import random
from dataclasses import dataclass, field
from itertools import product as iproduct

from .errors import AxiomViolation, ConfigError, ShearWittError
from .finring import catalog_keys, fp_algebra_keys, get_ring, perfstage, semiperfect_class
from .ghostlift import oracle_op
from .sheared import (check_mu_shadow, check_one_minus_tildeV, check_q_structure,
                      check_q_towers, check_splitting, check_sw_sequences,
                      check_zpn_decomposition, sw_semiperfect_stage)
from .witt import (U, WittVec, arith, fcomps, in_hatW, special_units, tilde_V_tuple,
                   zp_in_hatW)
from .wittpoly import shared_cache

SUITES = ("witt-core", "units", "q-ops", "sheared", "quasideal", "models", "duality", "lau")


@dataclass
class SuiteConfig:
    suite: str = "all"
    rings: list = field(default_factory=list)
    p: int = None
    m: int = None
    n: int = None
    mparam: int = None
    level: int = None
    depth: int = None
    window: int = None
    budget: int = None
    seed: int = 0
    samples: int = None

    def echo(self):
        return {"suite": self.suite, "rings": list(self.rings), "p": self.p, "m": self.m,
                "n": self.n, "mparam": self.mparam, "level": self.level, "depth": self.depth,
                "window": self.window, "budget": self.budget, "seed": self.seed,
                "samples": self.samples}

    def rng(self, cid):
        return random.Random(f"{self.seed}:{cid}")

    def pick(self, name, default):
        v = getattr(self, name)
        return default if v is None else v


def max_level(p):
    """Largest truncation level with full polynomial arithmetic for p."""
    return shared_cache(p).max_index + 1


def validate(cfg):
    if cfg.suite != "all" and cfg.suite not in SUITES:
        raise ConfigError(f"unknown suite {cfg.suite!r}; expected one of {SUITES + ('all',)}")
    for key in cfg.rings:
        try:
            get_ring(key)
        except (KeyError, ValueError, TypeError, ShearWittError) as e:
            raise ConfigError(f"bad ring key {key!r}: {e}")
    if cfg.p is not None and cfg.p not in (2, 3, 5):
        raise ConfigError(f"p must be 2, 3 or 5, got {cfg.p}")
    for name in ("m", "n", "level", "depth", "window", "samples"):
        v = getattr(cfg, name)
        if v is not None and v < 1:
            raise ConfigError(f"--{name} must be positive, got {v}")
    if cfg.mparam is not None and cfg.mparam < 0:
        raise ConfigError(f"--mparam must be >= 0, got {cfg.mparam}")
    if cfg.level is not None:
        primes = {get_ring(k).p for k in cfg.rings} or ({cfg.p} if cfg.p else {2, 3, 5})
        for p in sorted(primes):
            if cfg.level > max_level(p):
                raise ConfigError(f"LevelTooLarge: level {cfg.level} exceeds {max_level(p)} "
                                  f"for p={p}")


# -- records ---------------------------------------------------------------------

def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted((jsonable(v) for v in x), key=repr)
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        return repr(x)
    if hasattr(x, "serialize"):
        return x.serialize()
    return repr(x)


def scalars(rep):
    """The scalar entries of a report dict (used as counts)."""
    return {k: v for k, v in rep.items() if v is None or isinstance(v, (bool, int, str))}


def record(cid, label, ok, counts=None, witness=None):
    status = "skip" if ok is None else ("pass" if ok else "fail")
    counts = counts or {}
    if status == "fail" and witness is None:
        witness = {"report": counts}
    return {"id": cid, "label": label, "status": status, "counts": jsonable(counts),
            "witnesses": [] if witness is None else [jsonable(witness)]}


def guarded(cid, label, fn):
    """Run fn() -> (ok, counts, witness); errors from the library become failures."""
    try:
        ok, counts, witness = fn()
    except ShearWittError as e:
        return record(cid, label, False, {"error": type(e).__name__},
                      {"error": type(e).__name__, "message": str(e),
                       "witness": getattr(e, "witness", None)})
    return record(cid, label, ok, counts, witness)


def first_failure(items, test):
    n = 0
    for item in items:
        n += 1
        if not test(item):
            return n, item
    return n, None


def _vec(rng, R, N):
    return tuple(rng.randrange(R.size) for _ in range(N))


# -- witt-core -----------------------------------------------------------------

def _ghost_checks(cfg, key, N, samples):
    R = get_ring(key)
    A = arith(R)
    out = []
    for op in ("add", "mul"):
        cid = f"witt-core.{key}.N{N}.ghost-{op}"

        def run(op=op, cid=cid):
            rng = cfg.rng(cid)
            comb = R.add if op == "add" else R.mul
            fn = A.add if op == "add" else A.mul
            pairs = ((_vec(rng, R, N), _vec(rng, R, N)) for _ in range(samples))

            def good(xy):
                x, y = xy
                z = fn(x, y)
                gz = A.ghost(z)
                return (gz == tuple(comb(a, b) for a, b in zip(A.ghost(x), A.ghost(y)))
                        and z == oracle_op(R, op, x, y))

            n, bad = first_failure(pairs, good)
            wit = None if bad is None else {"x": bad[0], "y": bad[1], "op": op}
            return bad is None, {"pairs": n}, wit

        out.append(guarded(cid, f"ghost map is {'additive' if op == 'add' else 'multiplicative'}"
                           " and agrees with the integer ghost lift", run))
    return out


def _fv_and_projection(cfg, key, N, samples):
    R = get_ring(key)
    A = arith(R)
    p = R.p
    out = []
    cid = f"witt-core.{key}.N{N}.FV-is-p"

    def fv():
        els = iproduct(range(R.size), repeat=N)
        n, bad = first_failure(els, lambda x: A.frob(A.ver(x)) == A.scalar(p, x))
        return bad is None, {"elements": n, "exhaustive": True}, \
            None if bad is None else {"x": bad}

    out.append(guarded(cid, "F V = p on truncated Witt vectors", fv))
    cid = f"witt-core.{key}.N{N}.projection-formula"

    def proj():
        # both sides are biadditive, so additive generators V^i[a] suffice;
        # random pairs are checked on top of that
        gens_x = [_ver_n(A, A.teich(a, N - i), i) for i in range(N) for a in range(R.size)]
        gens_y = [_ver_n(A, A.teich(a, N + 1 - i), i)
                  for i in range(N + 1) for a in range(R.size)]

        def good(xy):
            x, y = xy
            return A.ver(A.mul(x, A.frob(y))) == A.mul(A.ver(x), y)

        n1, bad = first_failure(iproduct(gens_x, gens_y), good)
        rng = cfg.rng(cid)
        n2 = 0
        if bad is None:
            n2, bad = first_failure(((_vec(rng, R, N), _vec(rng, R, N + 1))
                                     for _ in range(samples)), good)
        return bad is None, {"generator_pairs": n1, "random_pairs": n2}, \
            None if bad is None else {"x": bad[0], "y": bad[1]}

    out.append(guarded(cid, "V(x F(y)) = V(x) y", proj))
    return out


def _ver_n(A, x, n):
    for _ in range(n):
        x = A.ver(x)
    return x


def _delta_checks(cfg, key, N, samples):
    R = get_ring(key)
    A = arith(R)
    p = R.p
    cid = f"witt-core.delta.{key}.N{N}"

    def run():
        rng = cfg.rng(cid)
        one = A.from_int(1, N)
        vt1 = tilde_V_tuple(R, one)
        vt1p = vt1[:N]
        for _ in range(p - 2):
            vt1p = A.mul(vt1p, vt1[:N])
        dvt1 = A.delta(vt1)

        def good(x):
            d = A.delta(x)
            # second route: delta through integer ghost data
            if d != oracle_op(R, "delta", x):
                return False
            # F(x) = x^p + p delta(x)
            xp = x[:N - 1]
            for _ in range(p - 1):
                xp = A.mul(xp, x[:N - 1])
            if A.frob(x) != A.add(xp, A.scalar(p, d)):
                return False
            lhs = A.delta(tilde_V_tuple(R, x))
            rhs = A.add(A.mul(vt1p, tilde_V_tuple(R, d)), A.mul(x, dvt1))
            return lhs == rhs

        n, bad = first_failure((_vec(rng, R, N) for _ in range(samples)), good)
        return bad is None, {"samples": n}, None if bad is None else {"x": bad}

    return [guarded(cid, "delta(V~ x) = V~(1)^(p-1) V~(delta x) + x delta(V~ 1), "
                         "delta agrees with (F(x) - x^p)/p on ghost lifts", run)]


def suite_witt_core(cfg):
    samples = cfg.pick("samples", 5000)
    if cfg.rings:
        pairs = [(k, cfg.pick("level", 3)) for k in cfg.rings]
    else:
        pairs = [("zmod:2:3", cfg.pick("level", 4)), ("zmod:3:2", cfg.pick("level", 3))]
    out = []
    for key, N in pairs:
        out += _ghost_checks(cfg, key, N, samples)
    fv_key = cfg.rings[0] if cfg.rings else "zmod:3:2"
    fv_N = cfg.pick("level", 3)
    out += _fv_and_projection(cfg, fv_key, fv_N, max(samples, 10000))
    for key in cfg.rings or catalog_keys():
        out += _delta_checks(cfg, key, cfg.pick("level", 3), cfg.pick("samples", 500))
    return out


# -- units -------------------------------------------------------------------------

def suite_units(cfg):
    primes = [cfg.p] if cfg.p else [2, 3, 5]
    ms = [cfg.m] if cfg.m else [1, 2, 3]
    Ns = [cfg.level] if cfg.level else [1, 2, 3]
    samples = cfg.pick("samples", 1000)
    out = []
    for p in primes:
        consts = U(p)
        for m in ms:
            R = get_ring(f"zmod:{p}:{m}")
            for N in Ns:
                cid = f"units.p{p}.m{m}.N{N}.u-from-p-minus-teich-p"

                def shift(R=R, N=N):
                    su = special_units(R, N)
                    A = arith(R)
                    top = A.sub(A.from_int(R.p, N + 1), A.teich(R.from_int(R.p), N + 1))
                    vu = su.Vu.comps
                    ok = su.route == "shift" and vu == top
                    # finite-level shadow of V(u) - p in hat W
                    diff = WittVec(R, A.sub(vu, A.from_int(R.p, N + 1)))
                    return ok and in_hatW(diff), {"route": su.route,
                                                  "u": list(su.u.comps)}, \
                        None if ok else {"Vu": vu, "p_minus_teich_p": top}

                out.append(guarded(cid, "u = V^-1(p - [p]) at finite level", shift))
            cid = f"units.p{p}.m{m}.Vu-minus-p-in-hatW"
            out.append(guarded(cid, "V(u) - p lies in hat W", lambda c=consts, m=m: (
                zp_in_hatW(c["u"].V() - c["p"], m)[0], {"m": m}, None)))
            cid = f"units.p{p}.m{m}.u-minus-1-in-hatW-iff-p-odd"

            def ubar(c=consts, m=m, p=p):
                got = zp_in_hatW(c["u"] - c["1"], m)[0]
                # over F_2 the vectors [-1] and 1 coincide, so p = 2 is only
                # separated from p > 2 once m >= 2
                expect = p > 2 or p ** m == 2
                return got == expect, {"m": m, "u_minus_1_in_hatW": got}, None

            out.append(guarded(cid, "u bar = 1 exactly when p > 2", ubar))
            if p == 2:
                cid = f"units.p2.m{m}.u-minus-teich-minus-1-in-hatW"
                out.append(guarded(cid, "u - [-1] lies in hat W for p = 2",
                                   lambda c=consts, m=m: (
                                       zp_in_hatW(c["u"] - c["[-1]"], m)[0], {"m": m}, None)))
        grid = [(m, N) for m in ms for N in Ns]
        cid = f"units.p{p}.F-tildeV-is-bold-p"

        def ftv(p=p, cid=cid):
            rng = cfg.rng(cid)

            def good(i):
                m, N = grid[i % len(grid)]
                R = get_ring(f"zmod:{p}:{m}")
                A = arith(R)
                su = special_units(R, N)
                x = _vec(rng, R, N)
                return A.frob(tilde_V_tuple(R, x)) == A.mul(su.bp.comps, x) or (m, N, x)

            n, bad = _first_bad(range(samples), good)
            return bad is None, {"samples": n}, None if bad is None else \
                {"m": bad[0], "N": bad[1], "x": bad[2]}

        out.append(guarded(cid, "F V~ = bold p", ftv))
        cid = f"units.p{p}.tildeV-F-is-tildeV-one"

        def tvf(p=p, cid=cid):
            rng = cfg.rng(cid)

            def good(i):
                m, N = grid[i % len(grid)]
                R = get_ring(f"zmod:{p}:{m}")
                A = arith(R)
                y = _vec(rng, R, N + 1)
                vt1 = tilde_V_tuple(R, A.from_int(1, N))
                return tilde_V_tuple(R, A.frob(y)) == A.mul(vt1, y) or (m, N, y)

            n, bad = _first_bad(range(samples), good)
            return bad is None, {"samples": n}, None if bad is None else \
                {"m": bad[0], "N": bad[1], "y": bad[2]}

        out.append(guarded(cid, "V~ F = V~(1) times", tvf))
    return out


def _first_bad(items, good):
    """Like first_failure, but good() returns True or a witness."""
    n = 0
    for item in items:
        n += 1
        r = good(item)
        if r is not True:
            return n, r
    return n, None


# -- q-ops -----------------------------------------------------------------------

def suite_q_ops(cfg):
    out = []
    N = cfg.pick("level", 3)
    for key in cfg.rings or ["fpk:2:2", "fpk:3:2"]:
        R = get_ring(key)
        rep = {}

        def q(R=R):
            if "q" not in rep:
                rep["q"] = check_q_structure(R, N=N, w=cfg.pick("window", 2))
            return rep["q"]

        out.append(guarded(f"q-ops.{key}.N{N}.kerV-zero", "V is injective on Q", lambda q=q: (
            q()["kerV_zero"], {"N": N}, {"x": q()["kerV_witness"]})))
        out.append(guarded(f"q-ops.{key}.N{N}.F-bijective-on-Q-mod-tildeV",
                           "Frobenius is bijective on Q / V~ Q", lambda q=q, R=R: (
                               q()["F_on_Q_mod_VQ"] and (not R.char_p or
                                                         q()["Q_mod_VQ_size"] == q()["R_red_size"]),
                               scalars(q()), None)))

        def fi(q=q):
            res = q()["tildeV_on_Q_Fi"]
            if isinstance(res, str):
                return None, {"reason": res}, None
            bad = [r for r in res if not r[2]]
            return not bad, {"levels": [[i, n] for i, n, _ in res]}, bad[0] if bad else None

        out.append(guarded(f"q-ops.{key}.N{N}.tildeV-bijective-on-Q-F-kernels",
                           "V~ is bijective on the kernels of F^i on Q", fi))
        if R.char_p:
            def towers(R=R):
                t = check_q_towers(R, N=min(N, 2), w=cfg.pick("window", 2),
                                   depth=cfg.pick("depth", 3))
                ok = (t["F_on_Qperf_bijective"] and t["tildeV_on_TFQ_bijective"]
                      and t["one_minus_F_on_TFQ_bijective"])
                return ok, t, None

            out.append(guarded(f"q-ops.{key}.towers", "F on Q perf and V~, 1 - F on "
                               "F-torsion towers are bijective", towers))
    return out


# -- sheared -----------------------------------------------------------------------

def suite_sheared(cfg):
    out = []
    ns = [cfg.n] if cfg.n else [1, 2]
    for key in cfg.rings or ["zmod:2:2", "fpk:2:2"]:
        R = get_ring(key)
        for n in ns:
            def seq(R=R, n=n):
                kw = {"S": cfg.pick("window", 2)}
                if cfg.depth or not R.char_p:
                    kw["L"] = cfg.pick("depth", 3)
                rep = check_sw_sequences(R, n, **kw)
                ok = (rep["tildeVn_injective"] and rep["image_equals_kernel"]
                      and rep["cokernel_is_Wn"])
                return ok, scalars(rep), rep.get("witness_injectivity") or \
                    rep.get("witness_exactness")

            out.append(guarded(f"sheared.{key}.n{n}.tildeV-n-sequence",
                               "0 -> hat W -> sW -> W_n -> 0 through V~^n", seq))

            def kerf(R=R, n=n):
                kw = {"S": cfg.pick("window", 2)}
                if cfg.depth or not R.char_p:
                    kw["L"] = cfg.pick("depth", 3)
                rep = check_sw_sequences(R, n, **kw)
                return rep["kerFn_equals_hatW_Fn"], scalars(rep), None

            out.append(guarded(f"sheared.{key}.n{n}.kernel-of-F-n",
                               "kernel of F^n on sW is the F^n-kernel of hat W", kerf))
        out.append(guarded(f"sheared.{key}.splitting", "the splitting s is a ring section",
                           lambda R=R: _splitting(R)))
    for p in ([cfg.p] if cfg.p else [2, 3]):
        def zpn(p=p):
            rep = check_zpn_decomposition(p, cfg.pick("n", 2))
            ok = rep["s_is_canonical"] and rep["direct"] and rep["sum_covers"] \
                and rep["product_size"] == rep["W_N_size"]
            return ok, scalars(rep), rep["witness"]

        out.append(guarded(f"sheared.zpn-decomposition.p{p}",
                           "sW of Z/p^n splits as image of s plus nilpotent part", zpn))
    for key, S in ([(k, cfg.pick("window", 3)) for k in cfg.rings] or
                   [("fpk:3:3", 4), ("fpk:2:2", 3), ("zmod:2:2", 3), ("zmod:3:3", 2)]):
        R = get_ring(key)

        def omv(R=R, S=S):
            rep = check_one_minus_tildeV(R, S)
            ok = (rep["injective"] and rep["lambda_kills_image"] and rep["image_is_kernel"]
                  and rep["lambda_onto_1_plus_nil"])
            return ok, scalars(rep), rep["witness"]

        out.append(guarded(f"sheared.{key}.S{S}.one-minus-tildeV",
                           "1 - V~ is injective on hat W with cokernel 1 + Nil via lambda~", omv))

        def mu(R=R, S=S):
            rep = check_mu_shadow(R, cfg.pick("n", 1), S)
            return rep["agree"] and rep["image_is_mu"], scalars(rep), rep["witness"]

        out.append(guarded(f"sheared.{key}.S{S}.mu-kernel",
                           "kernel of 1 - V~ on sW is mu_(p^n)", mu))
    out += _semiperfect_checks(cfg)
    return out


def _splitting(R):
    rep = check_splitting(R, 2)
    ok = all(v for k, v in rep.items() if isinstance(v, bool))
    return ok, scalars(rep), None


def element_nil_exponent(R):
    """max over nilpotent a of the least e with a^e = 0."""
    best = 1
    for a in R.reduction().nil:
        e, x = 1, a
        while x != 0:
            x = R.mul(x, a)
            e += 1
        best = max(best, e)
    return best


def _semiperfect_checks(cfg):
    out = []
    keys = [k for k in cfg.rings if get_ring(k).char_p] if cfg.rings else fp_algebra_keys()
    for key in keys:
        R = get_ring(key)

        def cls(R=R):
            try:
                label, n, agree = semiperfect_class(R)
            except AxiomViolation as e:
                return False, {"error": "AxiomViolation"}, e.witness
            # second route: Fr^n stabilizes exactly when p^n reaches the
            # nilpotency exponent of single elements
            e, k = element_nil_exponent(R), 0
            while R.p ** k < e:
                k += 1
            expect = "semiperfect" if k == 0 else "weakly_semiperfect"
            ok = (label, n) == (expect, k) and all(a == b for _, a, b in agree)
            return ok, {"class": label, "index": n, "nil_exponent": e}, \
                None if ok else {"got": [label, n], "expected": [expect, k]}

        out.append(guarded(f"sheared.semiperfect.{key}.semiperfect-class",
                           "weakly semiperfect classification and its quotient criterion", cls))
    for e in range(3):
        def stage(e=e):
            rep = sw_semiperfect_stage(2, e, 2)
            ok = rep["compatible"] and all(
                s["ideal"] and s["ring_map"] and s["quotient_size"] == s["W_N_R_size"]
                for s in rep["stages"])
            return ok, {"stages": [scalars(s) for s in rep["stages"]]}, None

        out.append(guarded(f"sheared.semiperfect.perfstage-2-{e}.stage-consistency",
                           f"sW of {perfstage(2, e).name} from successive semiperfect stages",
                           stage))
    return out


# -- quasideal ----------------------------------------------------------------------

def suite_quasideal(cfg):
    from .quasideal import ConeInstance, check_quasi_ideal, homology, ideal_instance
    out = []
    for n, k, p in [(4, 2, 2), (8, 2, 2), (8, 4, 2), (9, 3, 3), (27, 3, 3), (25, 5, 5)]:
        q = ideal_instance(n, k)
        cid = f"quasideal.Z{n}.ideal{k}"

        def ax(q=q, cid=cid):
            rep = check_quasi_ideal(q, seed=cfg.seed)
            return rep["ok"], scalars(rep), rep.get("witness")

        out.append(guarded(cid + ".axioms", "honest ideals are quasi-ideals", ax))

        def cone(q=q):
            rep = ConeInstance(q).check()
            return rep["ok"], scalars(rep), None

        out.append(guarded(cid + ".cone-dg-ring", "the cone of a quasi-ideal is a DG ring", cone))

        def h(q=q, n=n, k=k, p=p):
            hh = homology(q, p)
            ok = hh.counts_consistent() and hh.h0_is_Z_mod() == k
            return ok, hh.summary(), None

        out.append(guarded(cid + ".homology", "H0 of Z/n over kZ/n is Z/k", h))
    return out


# -- models ---------------------------------------------------------------------------

def suite_models(cfg):
    from . import models as M
    out = []
    ns = [cfg.n] if cfg.n else [1, 2]
    L = cfg.pick("depth", 1)
    for key in cfg.rings or ["fpk:2:2", "fpk:3:2"]:
        R = get_ring(key)
        for n in ns:
            cache = {}

            def suite(R=R, n=n, cache=cache):
                if "r" not in cache:
                    cache["r"] = M.model_quasi_iso_suite(R, n, L)
                return cache["r"]

            base = f"models.{key}.n{n}"
            out.append(guarded(base + ".models-are-quasi-ideals",
                               "A, B and A~ satisfy the quasi-ideal axioms", lambda s=suite: (
                                   s()["An_quasi_ideal"] and s()["Bn_quasi_ideal"]
                                   and s()["Atilde_n_quasi_ideal"], scalars(s()), None)))
            for name, label in (("B_to_A", "B_n -> A_n is a quasi-isomorphism"),
                                ("At_to_A", "A~_n -> A_n is a quasi-isomorphism"),
                                ("B_to_C", "B_n -> C_n is a surjective quasi-isomorphism")):
                def qi(s=suite, name=name):
                    r = s()[name]
                    if isinstance(r, str):
                        return None, {"reason": r}, None
                    ok = r["quasi_iso"] and r.get("surjective", True)
                    c = {k: v for k, v in r.items() if k not in ("H0_table",)}
                    return ok, c, None if ok else r

                out.append(guarded(f"{base}.{name.replace('_', '-')}", label, qi))
            out.append(guarded(base + ".naive-cone-roof",
                               "naive and p-nu cones are joined by quasi-isomorphisms",
                               lambda s=suite: (s()["naive_vs_pnu"]["H_match"]
                                                and s()["naive_vs_pnu"]["FnVn_equals_pnu"],
                                                {"H_match": s()["naive_vs_pnu"]["H_match"]},
                                                None)))
    incl = [(k, cfg.pick("n", 1), cfg.mparam) for k in cfg.rings] if cfg.rings else \
        [("zmod:2:2", 1, 1), ("zmod:2:2", 1, 0), ("zmod:3:2", 1, 0), ("zmod:2:3", 1, 0),
         ("fpk:2:2", 1, 0)]
    for key, n, m in incl:
        R = get_ring(key)
        if m is None:
            m = 0
        expect = R.char_p or m >= M.delta_p(R.p)

        def inc(key=key, n=n, m=m, expect=expect):
            rep = M.check_inclusion_Iprime(key, n, m)
            ok = rep["ok"] and rep["frobenius_equation"] and rep["inclusion_holds"] == expect
            if not expect:
                ok = ok and rep["counterexample"] is not None
            return ok, scalars(rep), None

        out.append(guarded(f"models.{key}.n{n}.m{m}.Iprime-inclusion",
                           "I'_(n,m) inside I_(n,m) exactly when m >= delta_p", inc))
    for key, n, m, S in ([(k, cfg.pick("n", 1), cfg.pick("mparam", 1), cfg.pick("window", 2))
                          for k in cfg.rings if get_ring(k).char_p] or
                         [("fpk:2:3", 1, 1, 2), ("fpk:2:3", 1, 0, 2), ("fpk:3:2", 1, 0, 2),
                          ("fpk:2:2", 2, 0, 2)]):
        def yhat(key=key, n=n, m=m, S=S):
            rep = M.quotient_iso_Yhat(key, n, m, S)
            return rep["bijective"], scalars(rep), None

        out.append(guarded(f"models.{key}.n{n}.m{m}.Yhat-quotient-bijection",
                           "hat Y_(n,m) maps bijectively onto the quotient", yhat))
    for key, m in ([(k, cfg.pick("mparam", 0)) for k in cfg.rings if get_ring(k).char_p] or
                   [("fpk:2:2", 0), ("fpk:2:2", 1), ("fpk:3:2", 1)]):
        def bert(key=key, m=m):
            rep = M.berthelot_check(key, m)
            ok = (rep["descriptions_agree"] and rep["injective"] and rep["onto_targets"]
                  and rep["inverse_ok"] and rep["nonnil_excluded"])
            return ok, scalars(rep), None

        out.append(guarded(f"models.{key}.m{m}.canonical-iso-arbitrary-p",
                           "the two descriptions of the kernel agree for arbitrary p", bert))

        def gp(key=key, m=m):
            rep = M.check_G_pairing(key, 1, m, 2)
            ok = rep["lift_independent"] and rep["coset_independent"] and rep["biadditive"] \
                and rep["FV_adjoint"]
            return ok, scalars(rep), None

        out.append(guarded(f"models.{key}.m{m}.G-pairing", "the pairing on G_(n,m) is "
                           "well defined, biadditive and F/V adjoint", gp))
    for key, n, Lt in ([(k, cfg.pick("n", 1), cfg.depth) for k in cfg.rings] or
                       [("fpk:2:2", 1, None), ("zmod:3:2", 1, None), ("zmod:2:3", 1, 2)]):
        def tr(key=key, n=n, Lt=Lt):
            rep = M.transition_suite(key, n, Lt)
            ok = rep["chain_map"] and rep["F_equivariant"] and rep["gamma_to_p_gamma"]
            return ok, scalars(rep), None

        out.append(guarded(f"models.{key}.n{n}.transitions",
                           "transition maps are F-equivariant chain maps sending gamma to p gamma",
                           tr))
    return out


# -- duality ---------------------------------------------------------------------------

def suite_duality(cfg):
    from .models import duality_suite
    out = []
    cases = [(k, cfg.pick("n", 1)) for k in cfg.rings] or \
        [("fpk:2:2", 1), ("fpk:2:2", 2), ("fpk:3:2", 1)]
    for key, n in cases:
        cache = {}

        def rep(key=key, n=n, cache=cache):
            if "r" not in cache:
                cache["r"] = duality_suite(key, n, samples=cfg.pick("samples", "auto"),
                                           seed=cfg.seed)
            return cache["r"]

        base = f"duality.{key}.n{n}"
        for cid, keys, label in (
                ("adjunction", ("F_V_adjoint", "V_F_adjoint"), "F and V are adjoint"),
                ("routes-agree", ("routes_agree", "formula_agrees"),
                 "pairing by formula and by Artin-Hasse agree"),
                ("xi-tildeV", ("xi_V_is_xi",), "xi V~ = xi"),
                ("nu-is-xi-gamma", ("nu_equals_xi_gamma",), "nu = xi(. gamma)"),
                ("one-minus-tildeV-diagram", ("right_square_power",
                                              "one_minus_V_bijective_on_W", "row_exact",
                                              "xi_kills_one_minus_V"),
                 "the 1 - V~ diagram commutes with exact rows")):
            out.append(guarded(f"{base}.{cid}", label, lambda rep=rep, keys=keys: (
                all(rep()[k] for k in keys),
                dict({k: rep()[k] for k in keys}, pairs=rep()["pairs"],
                     exhaustive=rep()["exhaustive"]), None)))
    return out


# -- lau ---------------------------------------------------------------------------------

def suite_lau(cfg):
    from . import lau
    out = []
    w = cfg.pick("window", 2)

    def frame_checks(name, make):
        def run():
            e = make()
            c = e.check()
            r = lau.roundtrip_check(e, w)
            return c["ok"] and r["ok"], {"laws": c["ok"], "roundtrip": r["ok"]}, None

        out.append(guarded(f"lau.{name}.laws-and-roundtrip",
                           "economic frame laws and contract(expand(e)) = e", run))

    for key, N in [("zmod:2:2", 3), ("fpk:2:2", 3), ("zmod:3:2", 2)]:
        frame_checks(f"witt.{key}.N{N}", lambda key=key, N=N: lau.witt_frame(get_ring(key), N))
    frame_checks("truncated.fpk:2:2.n2", lambda: lau.truncated_witt_frame(get_ring("fpk:2:2"), 2))
    for key in ("zmod:2:2", "fpk:2:2"):
        frame_checks(f"sw.{key}", lambda key=key: lau.sw_frame(get_ring(key)))

    def twist(make, alpha_of):
        def run():
            e = make()
            rep = lau.unit_twist(e, alpha_of(e), w, seed=cfg.seed)
            return rep["ok"], scalars(rep), None
        return run

    R4 = get_ring("zmod:2:2")
    out.append(guarded("lau.witt.zmod:2:2.twist-by-teich-minus-one",
                       "expansion with twisted V is the twist of the expansion",
                       twist(lambda: lau.witt_frame(R4, 3), lambda e: arith(R4).teich(3, 2))))
    out.append(guarded("lau.sw.fpk:2:2.twist-by-minus-one",
                       "expansion with twisted V is the twist of the expansion",
                       twist(lambda: lau.sw_frame(get_ring("fpk:2:2")),
                             lambda e: e.A1.neg(e.A1.one))))
    for kind in ("graded_cone_A", "graded_cone_B", "graded_cone_C"):
        for key in cfg.rings or ["fpk:2:2", "fpk:3:2"]:
            def dg(kind=kind, key=key):
                g = lau.build_frames(kind, key, window=w)
                c = g.check()
                d = lau.graded_degree_check(g)
                return c["ok"] and d["ok"], {"laws": c["ok"], "degrees": d["ok"]}, \
                    None if d["ok"] else d["degrees"]

            out.append(guarded(f"lau.{kind.replace('_', '-')}.{key}.degree-ranges",
                               "graded frame laws and bijectivity in the stated degree ranges",
                               dg))
    out.append(guarded("lau.B-to-C-graded.fpk:2:2", "B -> C is a quasi-isomorphism in each "
                       "degree", lambda: _ok(lau.B_to_C_graded("fpk:2:2", 1, window=w))))
    for key in cfg.rings or ["fpk:2:2", "fpk:3:2"]:
        def tc(key=key):
            rep = lau.tildeC_construct(key, 1, window=w)
            ok = rep["ok"] and rep["degree0_strictly_larger"]
            return ok, {str(i): {"size": r["size"], "economic_size": r["economic_size"]}
                        for i, r in rep["degrees"].items()}, None

        out.append(guarded(f"lau.tildeC.{key}.exactness", "the pullback C~ has exact rows in "
                           "the stated degree ranges", tc))
    return out


def _ok(rep):
    return rep["ok"], {"ok": rep["ok"]}, None if rep["ok"] else rep


RUNNERS = {"witt-core": suite_witt_core, "units": suite_units, "q-ops": suite_q_ops,
           "sheared": suite_sheared, "quasideal": suite_quasideal, "models": suite_models,
           "duality": suite_duality, "lau": suite_lau}
