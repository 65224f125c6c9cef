"""Acceptance gate: one test per primary criterion, each at its stated limits.

Every test records a single PASS/FAIL line; the lines are printed in the
terminal summary (see conftest.py) and also directly when run with -s.
Run standalone with ``python tests/test_acceptance.py``.
"""
import subprocess
import sys
import time

import pytest

from shearwitt.cli import run_suite
from shearwitt.finring import catalog_keys, get_ring
from shearwitt.sheared import check_mu_shadow, check_one_minus_tildeV
from shearwitt.suites import (SuiteConfig, _semiperfect_checks, _delta_checks, _fv_and_projection,
                              _ghost_checks)

from oracles import oracle_op

RESULTS = []


class Gate:
    """Times a criterion and records one line for it."""

    def __init__(self, name, limit):
        self.name = name
        self.limit = limit
        self.notes = []

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0
        ok = exc_type is None and dt < self.limit
        why = "" if exc_type is None else f" [{exc_type.__name__}: {str(exc)[:120]}]"
        line = (f"{'PASS' if ok else 'FAIL'}  {self.name:14} {dt:7.1f}s (limit {self.limit}s)"
                f"  {'; '.join(self.notes)}{why}")
        RESULTS.append(line)
        print(line)
        if exc_type is None:
            assert dt < self.limit, f"{self.name} took {dt:.1f}s"
        return False


def passed(records):
    bad = [r for r in records if r["status"] != "pass"]
    assert not bad, bad[:3]
    return records


def by_id(records):
    return {r["id"]: r for r in records}


def test_witt_core():
    cfg = SuiteConfig("witt-core", seed=0)
    with Gate("witt-core", 60) as g:
        recs = passed(_ghost_checks(cfg, "zmod:2:3", 4, 5000)
                      + _ghost_checks(cfg, "zmod:3:2", 3, 5000))
        assert all(r["counts"]["pairs"] >= 5000 for r in recs)
        fv = by_id(passed(_fv_and_projection(cfg, "zmod:3:2", 3, 10000)))
        assert fv["witt-core.zmod:3:2.N3.FV-is-p"]["counts"]["elements"] == 9 ** 3
        pf = fv["witt-core.zmod:3:2.N3.projection-formula"]["counts"]
        assert pf["random_pairs"] >= 10 ** 4 and pf["generator_pairs"] == 27 * 36
        g.notes.append(f"{len(recs)} ghost checks x 5000 pairs, FV on 729, "
                       f"projection on {pf['generator_pairs']} generator + "
                       f"{pf['random_pairs']} random pairs")


def test_units():
    with Gate("units", 30) as g:
        recs = passed(run_suite(SuiteConfig("units"))["checks"])
        ids = by_id(recs)
        for p in (2, 3, 5):
            for m in (1, 2, 3):
                assert f"units.p{p}.m{m}.Vu-minus-p-in-hatW" in ids
                assert f"units.p{p}.m{m}.u-minus-1-in-hatW-iff-p-odd" in ids
                for N in (1, 2, 3):
                    assert f"units.p{p}.m{m}.N{N}.u-from-p-minus-teich-p" in ids
            assert ids[f"units.p{p}.F-tildeV-is-bold-p"]["counts"]["samples"] >= 1000
            assert ids[f"units.p{p}.tildeV-F-is-tildeV-one"]["counts"]["samples"] >= 1000
        # p = 2 is told apart from odd p once m >= 2
        assert not ids["units.p2.m2.u-minus-1-in-hatW-iff-p-odd"]["counts"]["u_minus_1_in_hatW"]
        assert ids["units.p3.m2.u-minus-1-in-hatW-iff-p-odd"]["counts"]["u_minus_1_in_hatW"]
        assert "units.p2.m3.u-minus-teich-minus-1-in-hatW" in ids
        g.notes.append(f"{len(recs)} checks")


def test_delta_ring():
    cfg = SuiteConfig("witt-core", seed=0)
    with Gate("delta-ring", 60) as g:
        recs = []
        for key in catalog_keys():
            recs += passed(_delta_checks(cfg, key, 3, 500))
        assert all(r["counts"]["samples"] >= 500 for r in recs)
        # the test-side oracle module agrees on a few values as well
        R = get_ring("zmod:2:3")
        from shearwitt.witt import arith
        assert arith(R).delta((3, 5, 7)) == oracle_op(R, "delta", (3, 5, 7))
        g.notes.append(f"{len(recs)} catalog rings x 500 samples")


def test_q_structure():
    with Gate("q-structure", 60) as g:
        n = 0
        for N in (2, 3):
            recs = passed(run_suite(SuiteConfig("q-ops", rings=["fpk:2:2", "fpk:3:2"],
                                                level=N))["checks"])
            n += len(recs)
            assert any(r["id"].endswith("tildeV-bijective-on-Q-F-kernels") for r in recs)
        g.notes.append(f"{n} checks at N = 2, 3")


def test_one_minus_tildeV():
    with Gate("1-V~", 120) as g:
        for key, S, size in (("fpk:3:3", 4, 6561), ("fpk:2:2", 3, 8)):
            R = get_ring(key)
            rep = check_one_minus_tildeV(R, S)
            assert rep["image"] == size
            assert rep["injective"] and rep["image_is_kernel"] and rep["lambda_onto_1_plus_nil"]
            mu = check_mu_shadow(R, 1, S)
            assert mu["elements"] == size and mu["agree"] and mu["image_is_mu"]
            g.notes.append(f"{key} support {S}: {size} elements")


def test_sheared_sequences():
    with Gate("sheared", 120) as g:
        recs = run_suite(SuiteConfig("sheared"))["checks"]
        want = [r for r in recs if "sequence" in r["id"] or "kernel-of-F" in r["id"]
                or "zpn-decomposition" in r["id"]]
        passed(want)
        for key in ("zmod:2:2", "fpk:2:2"):
            for n in (1, 2):
                assert any(r["id"] == f"sheared.{key}.n{n}.tildeV-n-sequence" for r in want)
        assert {r["id"] for r in want} >= {"sheared.zpn-decomposition.p2",
                                           "sheared.zpn-decomposition.p3"}
        g.notes.append(f"{len(want)} checks")


def test_models():
    with Gate("models", 300) as g:
        ids = by_id(passed(run_suite(SuiteConfig("models"))["checks"]))
        for key in ("fpk:2:2", "fpk:3:2"):
            for n in (1, 2):
                for name in ("B-to-A", "At-to-A", "B-to-C"):
                    assert ids[f"models.{key}.n{n}.{name}"]["status"] == "pass"
        for key, m in (("zmod:2:2", 1), ("zmod:3:2", 0)):
            assert ids[f"models.{key}.n1.m{m}.Iprime-inclusion"]["counts"]["inclusion_holds"]
        cex = ids["models.zmod:2:2.n1.m0.Iprime-inclusion"]["counts"]
        assert not cex["inclusion_holds"] and cex["counterexample"] == "1"
        assert any(i.endswith("Yhat-quotient-bijection") for i in ids)
        g.notes.append(f"{len(ids)} checks, p=2 m=0 counterexample z = {cex['counterexample']}")


def test_duality():
    with Gate("duality", 120) as g:
        recs = passed(run_suite(SuiteConfig("duality"))["checks"])
        ex = [r for r in recs if r["counts"]["exhaustive"]]
        assert ex, "no exhaustive instance"
        g.notes.append(f"{len(recs)} checks, {len(ex)} exhaustive")


def test_lau():
    with Gate("lau", 180) as g:
        recs = passed(run_suite(SuiteConfig("lau"))["checks"])
        kinds = {r["id"].split(".")[1] for r in recs}
        assert {"witt", "truncated", "sw", "graded-cone-C", "tildeC"} <= kinds
        g.notes.append(f"{len(recs)} checks")


def test_semiperfect_checks():
    with Gate("semiperfect", 60) as g:
        recs = passed(_semiperfect_checks(SuiteConfig("sheared")))
        n = sum(r["id"].endswith("semiperfect-class") for r in recs)
        assert n == len([k for k in catalog_keys() if get_ring(k).char_p])
        assert sum(r["id"].endswith("stage-consistency") for r in recs) == 3
        g.notes.append(f"{n} F_p-algebras classified, stages e = 0, 1, 2")


def test_determinism(tmp_path):
    with Gate("determinism", 900) as g:
        outs = []
        for name in ("a.json", "b.json"):
            path = tmp_path / name
            r = subprocess.run([sys.executable, "-m", "shearwitt", "verify", "all",
                                "--seed", "0", "--out", str(path)],
                               capture_output=True, text=True)
            assert r.returncode == 0, r.stdout + r.stderr
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]
        g.notes.append(f"two runs of verify all, {len(outs[0])} bytes each, identical")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
