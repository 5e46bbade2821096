"""Acceptance criteria 1-6, each at its stated tolerance and runtime budget."""

import math
import random
import time
from fractions import Fraction as F

from dlaguerre.entire import (
    ExpOfSquare,
    PolyTimesExp,
    check_theorem34,
    f_infinity,
    qn_convergence_report,
    sumlem_bounds,
    sumlem_partial,
)
from dlaguerre.harness import (
    FixedPlusExponential,
    GeneratorSpec,
    UniformExtra,
    generate,
    generate_one,
    reproduce_paper_examples,
    run_campaign,
    trial_rng,
)
from dlaguerre.logderiv import (
    build_F,
    check_product_identity,
    check_residue_lemmas,
    check_spacing_preservation,
    log_derivative,
    residues,
    superlevel_measure,
)
from dlaguerre.polycore import PreconditionError
from dlaguerre.realroots import mesh_at_least, mesh_size

LAMBDAS = (F(1, 2), F(1), F(2), F(5))


def test_criterion_1_exact_reproduction(record_criterion):
    t0 = time.perf_counter()
    rep = reproduce_paper_examples()
    elapsed = time.perf_counter() - t0
    ok = rep.ok and elapsed < 10
    failed = ", ".join(name for name, _, _ in rep.failures) or "none"
    record_criterion(1, ok, f"{len(rep.checks)} exact checks, failures: {failed}, {elapsed:.2f}s of 10s")
    assert rep.ok, rep.failures
    assert elapsed < 10


def test_criterion_2_main_theorem_regression(record_criterion):
    spec = GeneratorSpec(degree_range=(2, 8), min_gap=F(1), gap_distribution=FixedPlusExponential(1),
                         seed=20140101)
    t0 = time.perf_counter()
    res = run_campaign("MainTheorem", spec, 1000, workers=1)
    elapsed = time.perf_counter() - t0
    boundary = sum(1 for i in range(1000) if generate_one(spec, i).mesh() == 1)
    ok = res.tally() == (1000, 1000, 0, 0) and elapsed < 300
    record_criterion(2, ok, f"tally {res.tally()}, {boundary} instances at mesh exactly 1, "
                            f"{elapsed:.1f}s of 300s")
    assert res.violations == []
    assert res.confirmed == 1000
    assert elapsed < 300


def test_criterion_3_lemma_suite(record_criterion):
    count = 500
    loose = generate(GeneratorSpec(degree_range=(1, 8), min_gap=F(1, 16),
                                   gap_distribution=UniformExtra(2), seed=31), count)
    spaced = generate(GeneratorSpec(degree_range=(2, 8), min_gap=F(1), seed=32), count)
    bad = {"sums": 0, "signs": 0, "identity": 0, "spacing": 0, "derivative": 0}
    below_one = sum(1 for rp in loose if rp.mesh() < 1)

    for rp in loose:
        rep = check_residue_lemmas(rp)
        bad["sums"] += not rep.sums_ok
    for rp in spaced:
        rep = check_residue_lemmas(rp)
        bad["signs"] += not (rep.min_A >= 0 and rep.min_B >= 0)
    for i, rp in enumerate(loose):
        p = rp.expand()
        rng = random.Random(1000 + i)
        pts = []
        while len(pts) < 20:
            t = F(rng.randint(-2000, 2000), rng.randint(1, 97))
            if p(t) != 0:
                pts.append(t)
        bad["identity"] += not check_product_identity(p, pts).holds
    for rp in spaced:
        rep = check_spacing_preservation(rp.expand(), 1)
        bad["spacing"] += not (rep.real_rooted and rep.mesh_at_least_one)
    for rp in loose + spaced:
        p = rp.expand()
        d = p.derivative()
        if d.degree >= 1:
            bad["derivative"] += not mesh_at_least(d, mesh_size(p).mesh)

    ok = not any(bad.values())
    record_criterion(3, ok, f"{count} instances per lemma ({below_one} with mesh < 1), violations {bad}")
    assert ok, bad


def test_criterion_4_measures(record_criterion):
    count = 200
    rps = generate(GeneratorSpec(degree_range=(2, 8), min_gap=F(1), seed=41), count)
    logd_bad, F_mismatch, F_fail, structural = 0, 0, [], 0
    for rp in rps:
        p = rp.expand()
        n = p.degree
        FF = build_F(p, 1)
        for lam in LAMBDAS:
            r = superlevel_measure(log_derivative(p), lam)
            logd_bad += not (r.consistent and r.total == r.vieta_total == n / lam)
            r = superlevel_measure(FF, lam)
            if not r.pairing_ok:
                F_fail.append((rp, lam, r.failure))
                # re-verify monotonicity exactly: a negative residue would break it
                structural += min(residues(p).residues) < 0
            elif not (r.consistent and r.vieta_total == n / lam):
                F_mismatch += 1
    ok = logd_bad == 0 and F_mismatch == 0 and structural == 0
    record_criterion(4, ok, f"{count} instances x {len(LAMBDAS)} levels: log-derivative mismatches "
                            f"{logd_bad}, F mismatches {F_mismatch}, F pairing failures {len(F_fail)} "
                            f"(structural {structural})")
    assert logd_bad == 0
    assert F_mismatch == 0
    assert structural == 0


def test_criterion_5_transcendental(record_criterion):
    t0 = time.perf_counter()
    problems = []

    want = -8 * (math.e - 1)
    got = f_infinity(ExpOfSquare(), 0, 1)
    if not abs(got - want) <= 1e-12 * abs(want):
        problems.append(f"f_inf(0,1,exp(x^2)) = {got!r}")

    for n in range(2, 9):
        for a in (-3, 0, 5):
            s = sumlem_partial(n, a)
            try:
                lo, hi = sumlem_bounds(n, a)
            except PreconditionError as exc:
                problems.append(f"sumlem bounds n={n} a={a}: {exc}")
                continue
            if not lo < s < hi:
                problems.append(f"sumlem n={n} a={a}: {lo} < {s} < {hi} fails")
            if n == 8 and not (abs(1 - lo) < 0.25 and abs(1 - hi) < 0.25):
                problems.append(f"sumlem bounds at n=8, a={a} not within 0.25 of 1")

    rep = qn_convergence_report([3, 4, 5, 6], (-1, 1), 101)
    if not rep.strictly_decreasing:
        problems.append(f"q_n errors not strictly decreasing: {rep.max_errors}")

    spec = GeneratorSpec(degree_range=(2, 6), min_gap=F(1), seed=51)
    confirmed = 0
    for i in range(100):
        rp = generate_one(spec, i)
        b = F(round(trial_rng(51, 10**6 + i).uniform(-3, 3) * 8), 8)
        roots = rp.root_list()
        r = check_theorem34(PolyTimesExp(rp.expand(), b), (float(roots[0]) - 3, float(roots[-1]) + 3),
                            1001, 1, 1e-9)
        confirmed += len(r.confirmed)
    if confirmed:
        problems.append(f"{confirmed} confirmed f_inf violations")

    elapsed = time.perf_counter() - t0
    if elapsed >= 300:
        problems.append(f"runtime {elapsed:.1f}s")
    summary = "; ".join(problems) if problems else "all sub-checks hold"
    record_criterion(5, not problems, f"{summary}; {elapsed:.1f}s of 300s")
    assert not problems, problems


def test_criterion_6_campaigns(record_criterion):
    runs = [
        ("Zspc", GeneratorSpec(min_gap=F(3, 2), seed=61), 500, {"d": F(3, 2)}),
        ("Zspc", GeneratorSpec(min_gap=F(2), seed=62), 500, {"d": F(2)}),
        ("MeasureConverse", GeneratorSpec(degree_range=(2, 6), seed=63), 200, {}),
    ]
    problems, notes = [], []
    for cid, spec, trials, params in runs:
        serial = run_campaign(cid, spec, trials, params, workers=1)
        parallel = run_campaign(cid, spec, trials, params, workers=2)
        label = f"{cid}{'(' + str(params['d']) + ')' if 'd' in params else ''}"
        if serial.to_dict(include_runtime=False) != parallel.to_dict(include_runtime=False):
            problems.append(f"{label}: serial and parallel differ")
        if serial.confirmed + len(serial.violations) + serial.precondition_skips != trials:
            problems.append(f"{label}: tally does not add up")
        if any(v.get("exact_reverification") is None for v in serial.violations):
            problems.append(f"{label}: violation without exact re-verification")
        notes.append(f"{label} tally {serial.tally()} min margin {serial.evidence['min_margin']}")
    record_criterion(6, not problems, "; ".join(problems + notes))
    assert not problems, problems
