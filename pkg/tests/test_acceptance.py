"""Acceptance suite: one test per headline guarantee, all exact arithmetic.

Heavy corpora are built once in module-scoped fixtures and shared; every
comparison is exact (no tolerances anywhere).
"""
import json
import random
import time
from fractions import Fraction

import pytest

from lexstab import fixtures, suite
from lexstab.charge import GREATER, Slope, lex_compare, positivity_audit
from lexstab.cli import main
from lexstab.hn import (
    hn_filtration,
    is_semistable,
    level_plane,
    phase_closure_check,
    phase_of_quasi,
    quasi_semistable_decompose,
)
from lexstab.lex import (
    is_lth_level_semistable,
    lex_filtration,
    quadratic_value,
    tilted_positivity_audit,
    torsion_split,
)
from lexstab.p1 import (
    DEFAULT_Z,
    P1Backend,
    is_gieseker_semistable,
    is_slope_semistable,
    sheaf_to_json,
)
from lexstab.quiver import QuiverBackend, all_reps, preset_to_json

from oracles import Oracle

F = Fraction

EXHAUSTIVE_PRESETS = (fixtures.CP_A2_0, fixtures.CP_A2_1, fixtures.CP_2V_NIL)
R1_PRESETS = (fixtures.CP_A2_1, fixtures.CP_2V_NIL, fixtures.CP_2V_WALL)
QUIVERS = (fixtures.A2, fixtures.KRONECKER)


def backend_for(quiver, preset):
    return suite.get_backend(quiver, preset)


def plane_for(preset, t1=F(1)):
    return level_plane(preset.r, (t1,), ())


# -- shared corpora ---------------------------------------------------------


@pytest.fixture(scope="module")
def hn_corpus():
    """Exhaustive HN filtrations: every rep with dims <= (2,2) over F_2 on
    both fixture quivers under three validated presets."""
    start = time.monotonic()
    charges = []
    problems = []
    count = 0
    for quiver in QUIVERS:
        reps = list(all_reps(quiver, 2, (2, 2)))
        for preset in EXHAUSTIVE_PRESETS:
            backend = backend_for(quiver, preset)
            plane = plane_for(preset)
            rng = random.Random(hash((quiver.arrows, preset.name)) & 0xFFFF)
            for rep in reps:
                E = backend.handle(rep)
                if E.is_zero:
                    continue
                count += 1
                filt = hn_filtration(backend, E, plane)
                charges.append(E.charge)
                for factor in filt.factors:
                    charges.append(factor.charge)
                    ok, _ = is_semistable(backend, factor, plane)
                    if not ok:
                        problems.append(f"unstable factor for {rep}")
                for hi, lo in zip(filt.slopes, filt.slopes[1:]):
                    if not hi > lo:
                        problems.append(f"slopes not decreasing for {rep}")
                total = E.charge.zero(E.charge.r)
                for factor in filt.factors:
                    total = total + factor.charge
                if not (total - E.charge).is_zero():
                    problems.append(f"charge not additive for {rep}")
                redo = hn_filtration(
                    backend, E, plane, order_seed=rng.randrange(2 ** 30)
                )
                if redo.chain != filt.chain or redo.slopes != filt.slopes:
                    problems.append(f"filtration not unique for {rep}")
    elapsed = time.monotonic() - start
    return {
        "count": count,
        "elapsed": elapsed,
        "problems": problems,
        "charges": charges,
    }


@pytest.fixture(scope="module")
def hull_corpus():
    """200 seeded random instances of the hull correspondence."""
    failures = []
    charges = []
    for idx in range(200):
        out = suite.check_hn_instance(11, idx)
        if not out["hull"]:
            failures.append(idx)
        # rebuild the same instance to record its charge
        rng = suite._rng(11, idx)
        backend, _ = suite._pick_setup(rng)
        E = backend.handle(backend.random_rep((2, 2), rng.randrange(2 ** 30)))
        if not E.is_zero:
            charges.append(E.charge)
    return {"failures": failures, "charges": charges}


@pytest.fixture(scope="module")
def lex_corpus():
    """200 seeded quiver instances compared against the all-chains oracle."""
    oracles = {}
    failures = []
    charges = []
    for idx in range(200):
        rng = random.Random(7_654_321 + idx)
        quiver = rng.choice(QUIVERS)
        preset = rng.choice(R1_PRESETS)
        t = (rng.choice(suite._T_CHOICES), rng.choice(suite._T_CHOICES))
        backend = backend_for(quiver, preset)
        okey = (quiver, preset.name, t)
        if okey not in oracles:
            oracles[okey] = Oracle(quiver.arrows, 2, preset.alpha, preset.beta, t)
        oracle = oracles[okey]
        dims = (rng.randint(0, 2), rng.randint(0, 2))
        rep = backend.random_rep(dims, rng.randrange(2 ** 30))
        E = backend.handle(rep)
        if E.is_zero:
            continue
        filt = lex_filtration(backend, E, 2, t)
        ochain, ofactors, ovectors = oracle.lex_filtration((rep.dims, rep.mats), 2)
        engine_chain = tuple(c.witness for c in filt.chain)
        engine_vecs = tuple(tuple(s.value for s in vec) for vec in filt.vectors)
        if engine_chain != ochain or engine_vecs != ovectors:
            failures.append(f"instance {idx}: engine/oracle mismatch")
        if tuple(f.key.dims for f in filt.factors) != tuple(
            fr[0] for fr in ofactors
        ):
            failures.append(f"instance {idx}: factor dims mismatch")
        for hi, lo in zip(filt.vectors, filt.vectors[1:]):
            if lex_compare(hi, lo) != GREATER:
                failures.append(f"instance {idx}: vectors not lex-decreasing")
        f1 = lex_filtration(backend, E, 1, t[:1])
        w1 = {c.witness for c in f1.chain}
        w2 = {c.witness for c in filt.chain}
        if not w1 <= w2:
            failures.append(f"instance {idx}: level-1 chain not refined")
        charges.append(E.charge)
        charges.extend(f.charge for f in filt.factors)
    return {"failures": failures, "charges": charges}


@pytest.fixture(scope="module")
def sheaf_corpus():
    """500 generated split sheaves with both semistability classifications."""
    backend = P1Backend()
    failures = []
    charges = []
    quad = []
    sheaves = []
    for idx in range(500):
        rng = suite._rng(23, idx)
        sheaf = suite.random_sheaf(rng)
        t1, t2 = rng.choice(suite._T_CHOICES), rng.choice(suite._T_CHOICES)
        poly = backend.charge_poly(sheaf)
        quad.append(quadratic_value(poly))
        if sheaf.is_zero:
            continue
        sheaves.append(sheaf)
        charges.append(poly)
        h = backend.handle(sheaf)
        ok1, _ = is_lth_level_semistable(backend, h, 1, (t1,))
        if ok1 != is_slope_semistable(sheaf):
            failures.append(f"instance {idx}: level-1 vs slope")
        ok2, _ = is_lth_level_semistable(backend, h, 2, (t1, t2))
        if ok2 != is_gieseker_semistable(sheaf):
            failures.append(f"instance {idx}: level-2 vs Gieseker")
    return {
        "failures": failures,
        "charges": charges,
        "quadratic": quad,
        "sheaves": sheaves,
    }


@pytest.fixture(scope="module")
def quiver_splits():
    """200 torsion splits at cutoff (0,0) on the quiver backends."""
    cutoff = (Slope(F(0)), Slope(F(0)))
    splits = []
    for idx in range(200):
        rng = random.Random(9_999_991 + idx)
        quiver = rng.choice(QUIVERS)
        preset = rng.choice(R1_PRESETS)
        backend = backend_for(quiver, preset)
        rep = backend.random_rep((2, 2), rng.randrange(2 ** 30))
        E = backend.handle(rep)
        if E.is_zero:
            continue
        splits.append((backend, E, torsion_split(backend, E, cutoff, (1, 1))))
    return splits


# -- the criteria -----------------------------------------------------------


def test_hn_exhaustive_enumeration_is_correct_and_fast(hn_corpus):
    assert hn_corpus["count"] > 900
    assert hn_corpus["problems"] == []
    assert hn_corpus["elapsed"] < 60.0


def test_hull_vertices_match_partial_charge_sums(hull_corpus):
    assert hull_corpus["failures"] == []


def test_lex_filtration_matches_bruteforce_oracle(lex_corpus):
    assert lex_corpus["failures"] == []


def test_sheaf_levels_match_slope_and_gieseker(sheaf_corpus):
    assert sheaf_corpus["failures"] == []
    # the worked fixture: torsion, then O(1), then O(-1)
    backend = P1Backend()
    E = backend.handle(fixtures.FIX_P1)
    filt = lex_filtration(backend, E, 2, (1, 1))
    assert [c.child.key.rank for c in filt.chain] == [0, 1, 2]
    assert [tuple(s.value for s in vec) for vec in filt.vectors] == [
        (None, None),
        (F(3), F(2)),
        (F(1), F(0)),
    ]


def test_positivity_cascade_on_every_generated_object(
    hn_corpus, hull_corpus, lex_corpus, sheaf_corpus, tmp_path
):
    pool = (
        hn_corpus["charges"]
        + hull_corpus["charges"]
        + lex_corpus["charges"]
        + sheaf_corpus["charges"]
    )
    assert pool
    for poly in pool:
        assert positivity_audit(poly, nonzero=True).ok
    # a sign-flipped preset must be rejected with exit code 1
    data = preset_to_json(fixtures.CP_A2_0)
    data["beta"] = [[str(-F(x)) for x in row] for row in data["beta"]]
    path = tmp_path / "flipped.json"
    path.write_text(json.dumps(data))
    assert main(["validate", str(path)]) == 1


def test_torsion_split_is_a_genuine_torsion_pair(quiver_splits):
    assert len(quiver_splits) >= 150
    cutoff = (Slope(F(0)), Slope(F(0)))
    hom_checked = 0
    for backend, E, split in quiver_splits:
        assert split.ses.total == E
        total = split.T.charge + split.F.charge
        assert (total - E.charge).is_zero()
        # membership matches the factor-vector comparison exactly
        above = E.charge.zero(E.charge.r)
        for factor, vec in zip(split.filtration.factors, split.filtration.vectors):
            if lex_compare(vec, cutoff) == GREATER:
                above = above + factor.charge
        assert (above - split.T.charge).is_zero()
        if split.hom_zero is not None:
            assert split.hom_zero
            hom_checked += 1
    assert hom_checked > 0


def test_phase_closure_and_switch_decomposition():
    # 100 morphisms between equal-phase quasi-semistables stay in the slice
    morphisms = 0
    idx = 0
    while morphisms < 100 and idx < 5000:
        rng = suite._rng(31, idx)
        backend, plane = suite._pick_setup(rng)
        reps = [backend.random_rep((2, 2), rng.randrange(2 ** 30)) for _ in range(2)]
        handles = [backend.handle(r) for r in reps]
        idx += 1
        if any(h.is_zero for h in handles):
            continue
        if any(
            quasi_semistable_decompose(backend, h, plane) is None for h in handles
        ):
            continue
        phases = [phase_of_quasi(backend, h, plane) for h in handles]
        stated = [p for p in phases if p is not None]
        if len(stated) == 2 and stated[0] != stated[1]:
            continue
        for f in backend.hom_basis(handles[0], handles[1]):
            assert phase_closure_check(backend, f, plane).ok
            morphisms += 1
    assert morphisms >= 100
    # 100 constructed sequences satisfying the switching hypothesis
    switched = 0
    idx = 0
    while switched < 100 and idx < 5000:
        out = suite.check_switch_instance(37, idx)
        idx += 1
        if out["skipped"]:
            continue
        assert out["switch"]
        switched += 1
    assert switched >= 100


def test_tilted_positivity_and_quadratic_identity(quiver_splits, sheaf_corpus):
    for backend, E, split in quiver_splits:
        assert tilted_positivity_audit(split, (1, 1)).ok
    cutoff = (Slope(F(0)), Slope(F(0)))
    backend = P1Backend()
    for sheaf in sheaf_corpus["sheaves"]:
        split = torsion_split(backend, backend.handle(sheaf), cutoff, (1, 1))
        assert tilted_positivity_audit(split, (1, 1)).ok
    # the quadratic form vanishes identically on the geometric backend
    assert len(sheaf_corpus["quadratic"]) == 500
    assert all(q == 0 for q in sheaf_corpus["quadratic"])


def test_cli_reports_are_byte_deterministic(tmp_path):
    path = tmp_path / "sheaf.json"
    path.write_text(json.dumps(sheaf_to_json(fixtures.FIX_P1, DEFAULT_Z)))
    outs = []
    for name in ("lex1.json", "lex2.json"):
        out = str(tmp_path / name)
        assert main(["lex", str(path), "--out", out]) == 0
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1]
    grid = "1/3,1/2,1,2;1,2,3"
    scans = []
    for name, threads in (("s1.json", 1), ("s2.json", 8), ("s3.json", 1)):
        out = str(tmp_path / name)
        args = ["scan", str(path), "--grid", grid, "--threads", str(threads), "--out", out]
        assert main(args) == 0
        scans.append(open(out, "rb").read())
    assert scans[0] == scans[1] == scans[2]
