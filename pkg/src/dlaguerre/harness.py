"""Generators, the parametric family, worked-example replay and evidence campaigns."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .entire import ExpOfSquare, GaussianTimesPoly, PolyTimesExp, check_theorem34, f_infinity
from .laguerre import MeshTooSmallError, NotRealRootedError, certify_main_theorem, discrete_fn, eval_fn
from .logderiv import (
    MeasureMode,
    build_F,
    log_derivative,
    residues,
    superlevel_measure,
)
from .polycore import EXACT, FLOAT, Poly, PreconditionError, RootedPoly
from .realroots import is_real_rooted, mesh_at_least, mesh_size

WORKERS_ENV = "DLAGUERRE_WORKERS"
NEAR_MISS_COUNT = 10
GAP_GRID = 64
OFFSET_GRID = 8
DEFAULT_LAMBDAS = (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(5))


# -- generators ----------------------------------------------------------


@dataclass(frozen=True)
class FixedPlusExponential:
    """Gap = min_gap + Exp(scale); ``scale = 0`` gives arithmetic progressions."""

    scale: Fraction | float = 1

    def draw(self, rng: np.random.Generator) -> float:
        return float(rng.exponential(float(self.scale))) if self.scale > 0 else 0.0


@dataclass(frozen=True)
class UniformExtra:
    """Gap = min_gap + U(0, max)."""

    max: Fraction | float = 1

    def draw(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(0.0, float(self.max)))


@dataclass(frozen=True)
class GeneratorSpec:
    degree_range: tuple = (2, 8)
    min_gap: Fraction = Fraction(1)
    gap_distribution: FixedPlusExponential | UniformExtra | None = None
    root_offset_range: tuple = (-4, 4)
    leading_sign: str = "+"
    backend: str = EXACT
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.degree_range
        if not (isinstance(lo, int) and isinstance(hi, int) and 1 <= lo <= hi):
            raise PreconditionError("degree_range must be integers 1 <= lo <= hi")
        if Fraction(self.min_gap) < 0:
            raise PreconditionError("min_gap must be nonnegative")
        if self.root_offset_range[0] > self.root_offset_range[1]:
            raise PreconditionError("root_offset_range must be ordered")
        if self.leading_sign not in ("+", "-", "random"):
            raise PreconditionError("leading_sign must be '+', '-' or 'random'")
        if self.backend not in (EXACT, FLOAT):
            raise PreconditionError(f"unknown backend {self.backend!r}")
        if not (0 <= int(self.seed) < 2**64):
            raise PreconditionError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "min_gap", Fraction(self.min_gap))
        if self.gap_distribution is None:
            object.__setattr__(self, "gap_distribution", FixedPlusExponential(self.min_gap))

    def to_dict(self) -> dict:
        gd = self.gap_distribution
        kind = "FixedPlusExponential" if isinstance(gd, FixedPlusExponential) else "UniformExtra"
        param = gd.scale if isinstance(gd, FixedPlusExponential) else gd.max
        return {
            "degree_range": list(self.degree_range),
            "min_gap": str(self.min_gap),
            "gap_distribution": {"kind": kind, "param": str(param)},
            "root_offset_range": [str(v) for v in self.root_offset_range],
            "leading_sign": self.leading_sign,
            "backend": self.backend,
            "seed": int(self.seed),
        }


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream per (seed, trial index)."""
    return np.random.default_rng([int(seed), int(index)])


def _snap(v: float, grid: int) -> Fraction:
    return Fraction(round(v * grid), grid)


def _leading(spec: GeneratorSpec, rng) -> int:
    if spec.leading_sign == "random":
        return 1 if rng.integers(0, 2) else -1
    return 1 if spec.leading_sign == "+" else -1


def generate_one(spec: GeneratorSpec, index: int) -> RootedPoly:
    """The ``index``-th polynomial of the stream defined by ``spec``."""
    rng = trial_rng(spec.seed, index)
    lo, hi = spec.degree_range
    degree = int(rng.integers(lo, hi + 1))
    start = _snap(rng.uniform(float(spec.root_offset_range[0]), float(spec.root_offset_range[1])), OFFSET_GRID)
    roots = [start]
    for _ in range(degree - 1):
        extra = _snap(spec.gap_distribution.draw(rng), GAP_GRID)
        roots.append(roots[-1] + spec.min_gap + max(extra, Fraction(0)))
    lead = _leading(spec, rng)
    if spec.backend == FLOAT:
        return RootedPoly(tuple((float(r), 1) for r in roots), float(lead))
    return RootedPoly(tuple((r, 1) for r in roots), lead)


def generate(spec: GeneratorSpec, count: int) -> list[RootedPoly]:
    if count < 0:
        raise PreconditionError("count must be nonnegative")
    return [generate_one(spec, i) for i in range(count)]


NON_HYPOTHESIS_KINDS = ("small_mesh", "complex", "repeated")


def generate_non_hypothesis(spec: GeneratorSpec, index: int) -> tuple[str, Poly]:
    """Polynomials outside the spaced real-rooted class, cycling through kinds."""
    kind = NON_HYPOTHESIS_KINDS[index % len(NON_HYPOTHESIS_KINDS)]
    rng = trial_rng(spec.seed, index)
    lo, hi = spec.degree_range
    degree = int(rng.integers(max(lo, 2), max(hi, 2) + 1))
    start = _snap(rng.uniform(float(spec.root_offset_range[0]), float(spec.root_offset_range[1])), OFFSET_GRID)
    gaps = [Fraction(1) + _snap(rng.exponential(1.0), GAP_GRID) for _ in range(degree)]
    if kind == "small_mesh":
        j = int(rng.integers(0, degree - 1))
        gaps[j] = Fraction(int(rng.integers(1, GAP_GRID)), GAP_GRID)
        roots = [start + sum(gaps[:i], Fraction(0)) for i in range(degree)]
        return kind, Poly.from_roots(roots)
    if kind == "repeated":
        roots = [start + sum(gaps[:i], Fraction(0)) for i in range(degree - 1)]
        j = int(rng.integers(0, degree - 1))
        return kind, Poly.from_roots(roots + [roots[j]])
    roots = [start + sum(gaps[:i], Fraction(0)) for i in range(degree - 2)]
    re = _snap(rng.uniform(float(roots[0]) - 1, float(roots[-1]) + 1) if roots else 0.0, OFFSET_GRID)
    im = Fraction(int(rng.integers(1, 4 * OFFSET_GRID)), OFFSET_GRID)
    quad = Poly([re * re + im * im, -2 * re, Fraction(1)])
    return kind, Poly.from_roots(roots) * quad if roots else quad


# -- the parametric family -------------------------------------------------


def closed_form_C(n: int, a) -> Poly:
    """The quadratic ``C(x, n, a)`` as printed, coefficient by coefficient."""
    a = Fraction(a)
    c2 = (n - 1) * (-2 * n**3 - 4 * n * a + 4 * a**2 + n**2 + n**4)
    c1 = (n - 1) * (6 * n**2 * a + 4 * n**4 - 8 * n**3 * a + 8 * a**2 - 12 * n * a
                    + 4 * n * a**2 - 8 * n**3 + 2 * n**4 * a + 4 * n**2)
    c0 = (n - 1) * (-8 * n * a - 4 * n * a**2 + 4 * a**2 + 4 * n**4 * a - 8 * n**3 + 4 * n**4
                    + 4 * n**2 + 12 * n**2 * a + n**4 * a**2 + 13 * n**2 * a**2
                    - 16 * n**3 * a - 6 * n**3 * a**2)
    return Poly([c0, c1, c2])


def discriminant_closed_form(n: int, a) -> Fraction:
    a = Fraction(a)
    return -16 * n * a**2 * (n - 1) ** 2 * (n - 2) ** 3 * (a - n) ** 2


@dataclass(frozen=True)
class FamilyCResult:
    n: int
    a: Fraction
    subject: Poly
    fn_poly: Poly
    quotient: Poly
    discriminant: Fraction
    quotient_check: bool
    discriminant_check: bool
    closed_form_check: bool


def family_polynomial(n: int, a) -> Poly:
    """``(x + a) prod_{k=1}^{n-1} (x + k)``."""
    return Poly.from_roots([-Fraction(a)] + [Fraction(-k) for k in range(1, n)])


def parametric_family_C(n: int, a, fn: Callable = discrete_fn) -> FamilyCResult:
    """Quotient of ``f_n(x,1,p)`` by ``prod_{k=2}^{n-2} (x+k)^2`` and its discriminant.

    ``closed_form_check`` compares the quotient, translated by one, with the
    printed quadratic; the discriminant is translation invariant.
    """
    if n < 3:
        raise PreconditionError("n must be at least 3")
    a = Fraction(a)
    p = family_polynomial(n, a)
    f = fn(p, n, 1)
    divisor = Poly.from_roots([Fraction(-k) for k in range(2, n - 1) for _ in range(2)])
    q, r = divmod(f, divisor)
    c0, c1, c2 = (q.coeff(i) for i in range(3))
    disc = c1 * c1 - 4 * c2 * c0
    return FamilyCResult(
        n, a, p, f, q, disc,
        quotient_check=r.is_zero() and q.degree == 2,
        discriminant_check=disc == discriminant_closed_form(n, a),
        closed_form_check=q.shift(1) == closed_form_C(n, a),
    )


# -- worked examples ---------------------------------------------------------


@dataclass
class ReproduceReport:
    checks: list = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append((name, bool(ok), detail))

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c[1]]

    @property
    def ok(self) -> bool:
        return not self.failures


def reproduce_paper_examples(fn: Callable = discrete_fn) -> ReproduceReport:
    """Replay the worked examples exactly; ``fn`` is injectable for mutation tests."""
    F = Fraction
    x = Poly.x()
    rep = ReproduceReport()

    p = Poly.from_roots([0, 1, 2])
    got = fn(p, 3, 1)
    want = Poly.from_roots([1, 1]).scale(72)
    rep.add("f_3(x,1,x(x-1)(x-2)) = 72(x-1)^2", got == want, f"got {got}")

    got = fn(p, 2, 1)
    want = Poly.from_roots([3, 1, 1, -1]).scale(-12)
    rep.add("f_2(x,1,x(x-1)(x-2)) = -12(x-3)(x-1)^2(x+1)", got == want, f"got {got}")
    val = got(F(4))
    rep.add("f_2(4,1,x(x-1)(x-2)) = -540", val == -540, f"got {val}")

    for eps in (F(1, 4), F(1, 2)):
        pf = residues(Poly.from_roots([0, eps - 1]))
        a1, a2 = pf.residue_at(F(0)), pf.residue_at(eps - 1)
        ok = a1 == (2 - eps) / (1 - eps) and a2 == -eps / (1 - eps)
        rep.add(f"A_1, A_2 for x(x+1-eps), eps={eps}", ok, f"got {a1}, {a2}")

    got = fn(Poly.from_roots([0, 0, -1]), 3, 1)
    rep.add("f_3(x,1,x^2(x+1)) = 56x^2+32x+8", got == Poly([8, 32, 56]), f"got {got}")
    got = fn((x * x + 1) * (x + 1), 3, 1)
    rep.add("f_3(x,1,(x^2+1)(x+1)) = 32x^2-32x+8", got == Poly([8, -32, 32]), f"got {got}")

    for n in (3, 4, 5):
        for a in (-1, 0, 1, 2):
            res = parametric_family_C(n, a, fn)
            rep.add(f"C(x,{n},{a}) discriminant", res.quotient_check and res.discriminant_check,
                    f"got {res.discriminant}, want {discriminant_closed_form(n, a)}")

    val = f_infinity(ExpOfSquare(), 0, 1)
    want = -8 * (math.e - 1)
    rep.add("f_inf(0,1,exp(x^2)) = -8(e-1)", abs(val - want) <= 1e-12 * abs(want), f"got {val!r}")
    return rep


# -- campaigns ---------------------------------------------------------------

CONJECTURES = ("MainTheorem", "Zspc", "MeasureForward", "MeasureConverse", "LPEntire")


@dataclass(frozen=True)
class TrialOutcome:
    index: int
    status: str  # "confirmed" | "violation" | "skip"
    margin: float | None = None
    witness: dict | None = None
    evidence: dict | None = None


def _num(v):
    """JSON-safe rendering of a number."""
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def _roots_json(rp: RootedPoly) -> dict:
    return {"roots": [str(r) for r, m in rp.roots for _ in range(m)], "leading": str(rp.leading)}


def _poly_json(p: Poly) -> dict:
    return {"coeffs": [str(c) for c in p.coeffs]}


def _main_theorem_trial(spec, params, i) -> TrialOutcome:
    rp = generate_one(spec, i)
    p = rp.expand()
    h = Fraction(params.get("h", 1))
    try:
        cert = certify_main_theorem(p, h)
    except (NotRealRootedError, MeshTooSmallError, PreconditionError) as exc:
        return TrialOutcome(i, "skip", witness={"subject": _roots_json(rp), "reason": str(exc)})
    margin = _fn_min(cert.fn_poly) / float(rp.leading) ** 2
    if cert.certified:
        return TrialOutcome(i, "confirmed", margin)
    recheck = eval_fn(p, p.degree, h, cert.witness)
    return TrialOutcome(i, "violation", margin, {
        "subject": _roots_json(rp), "x": str(cert.witness), "value": str(cert.value),
        "exact_reverification": "confirmed" if recheck < 0 else "not reproduced",
    })


def _fn_min(fn: Poly) -> float:
    """Approximate global minimum of an even-degree polynomial (inf if it is a positive constant)."""
    if fn.degree <= 0:
        return float(fn.coeff(0))
    d = fn.derivative().to_float()
    crit = np.roots(list(reversed([float(c) for c in d.coeffs]))) if d.degree >= 1 else []
    vals = [float(fn(Fraction(float(c.real)))) for c in crit if abs(c.imag) <= 1e-9 * max(1.0, abs(c))]
    return min(vals) if vals else math.inf


def _zspc_trial(spec, params, i) -> TrialOutcome:
    d = Fraction(params["d"])
    rp = generate_one(spec, i)
    p = rp.expand()
    if p.degree < 2 or not mesh_at_least(p, d):
        return TrialOutcome(i, "skip", witness={"subject": _roots_json(rp), "reason": "outside hypothesis"})
    g = p.forward_difference(1)
    ok = is_real_rooted(g) and mesh_at_least(g, d)
    mesh_g = mesh_size(g).mesh if ok else None
    margin = float(mesh_g - d) if mesh_g is not None else -math.inf
    if ok:
        return TrialOutcome(i, "confirmed", margin)
    return TrialOutcome(i, "violation", margin, {
        "subject": _roots_json(rp), "g": _poly_json(g),
        "mesh_g": _num(float(mesh_size(g).mesh)) if is_real_rooted(g) else "non-real roots",
        "exact_reverification": "confirmed",
    })


def _measure_forward_trial(spec, params, i) -> TrialOutcome:
    rp = generate_one(spec, i)
    p = rp.expand()
    if p.degree < 1 or not mesh_at_least(p, 1):
        return TrialOutcome(i, "skip", witness={"subject": _roots_json(rp), "reason": "outside hypothesis"})
    lams = [Fraction(v) for v in params.get("lambdas", DEFAULT_LAMBDAS)]
    target = log_derivative(p) if params.get("target") == "log_derivative" else build_F(p, 1)
    margin = float(min(residues(p).residues))
    bad = []
    for lam in lams:
        res = superlevel_measure(target, lam, MeasureMode.EXACT_ROOT_PAIRING)
        n_over = Fraction(p.degree) / lam
        if not res.pairing_ok:
            bad.append({"lambda": str(lam), "failure": res.failure})
        elif not res.consistent or res.vieta_total != n_over:
            bad.append({"lambda": str(lam), "total": _num(res.total), "vieta": _num(res.vieta_total)})
    if not bad:
        return TrialOutcome(i, "confirmed", margin)
    return TrialOutcome(i, "violation", margin, {
        "subject": _roots_json(rp), "failures": bad, "exact_reverification": "confirmed",
    })


def _measure_converse_trial(spec, params, i) -> TrialOutcome:
    kind, p = generate_non_hypothesis(spec, i)
    lams = [Fraction(v) for v in params.get("lambdas", DEFAULT_LAMBDAS)]
    F = build_F(p, 1)
    devs = []
    for lam in lams:
        res = superlevel_measure(F, lam, MeasureMode.NUMERIC_SCAN)
        devs.append(float(res.total) - p.degree / float(lam))
    worst = max(abs(v) for v in devs)
    matches = worst <= float(params.get("match_tol", 1e-6))
    evidence = {
        "kind": kind, "subject": _poly_json(p),
        "deviations": [_num(v) for v in devs], "matches_on_grid": matches,
    }
    return TrialOutcome(i, "confirmed", worst, evidence=evidence)


def _lp_entire_trial(spec, params, i) -> TrialOutcome:
    rp = generate_one(spec, i)
    p = rp.expand()
    rng = trial_rng(spec.seed, 2**32 + i)
    bmax = float(params.get("b_max", 3))
    b = _snap(rng.uniform(-bmax, bmax), OFFSET_GRID)
    roots = rp.root_list()
    window = (float(roots[0]) - 3, float(roots[-1]) + 3)
    if params.get("family") == "gaussian":
        phi = GaussianTimesPoly(p, Fraction(int(rng.integers(1, 9)), 8))
    else:
        phi = PolyTimesExp(p, b)
    try:
        rep = check_theorem34(phi, window, int(params.get("grid", 1001)), 1, float(params.get("tol", 1e-9)))
    except PreconditionError as exc:
        return TrialOutcome(i, "skip", witness={"subject": _roots_json(rp), "reason": str(exc)})
    evidence = {"artifacts": [[x, v] for x, v in rep.artifacts]} if rep.artifacts else None
    if rep.ok:
        return TrialOutcome(i, "confirmed", rep.min_normalized, evidence=evidence)
    return TrialOutcome(i, "violation", rep.min_normalized, {
        "subject": phi.describe(), "points": [[x, v] for x, v in rep.confirmed],
        "exact_reverification": "confirmed",
    }, evidence)


_TRIALS = {
    "MainTheorem": _main_theorem_trial,
    "Zspc": _zspc_trial,
    "MeasureForward": _measure_forward_trial,
    "MeasureConverse": _measure_converse_trial,
    "LPEntire": _lp_entire_trial,
}


def _run_trial(args) -> TrialOutcome:
    conjecture_id, spec, params, index = args
    return _TRIALS[conjecture_id](spec, params, index)


@dataclass
class CampaignResult:
    conjecture_id: str
    params: dict
    trials: int
    confirmed: int
    violations: list
    precondition_skips: int
    near_misses: list
    seed: int
    runtime: float
    evidence: dict
    artifacts: list = field(default_factory=list)

    def tally(self) -> tuple:
        return (self.trials, self.confirmed, len(self.violations), self.precondition_skips)

    def to_dict(self, include_runtime: bool = True) -> dict:
        d = asdict(self)
        if not include_runtime:
            d.pop("runtime")
        return d


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _check_hypothesis_class(conjecture_id: str, spec: GeneratorSpec, params: dict) -> None:
    if conjecture_id not in _TRIALS:
        raise PreconditionError(f"unknown conjecture id {conjecture_id!r}")
    if conjecture_id == "MeasureConverse":
        return
    if spec.backend != EXACT:
        raise PreconditionError("campaigns run on the exact backend")
    if conjecture_id == "Zspc":
        if "d" not in params:
            raise PreconditionError("Zspc needs params['d']")
        d = Fraction(params["d"])
        if d < 1 or spec.min_gap < d:
            raise PreconditionError("Zspc(d) needs 1 <= d <= min_gap")
        if spec.degree_range[0] < 2:
            raise PreconditionError("Zspc needs degree >= 2")
    elif conjecture_id == "MainTheorem":
        if spec.min_gap < Fraction(params.get("h", 1)):
            raise PreconditionError("MainTheorem needs min_gap >= h")
    elif spec.min_gap < 1:
        raise PreconditionError(f"{conjecture_id} needs min_gap >= 1")


def run_campaign(conjecture_id: str, spec: GeneratorSpec, trials: int,
                 params: dict | None = None, workers: int | None = None) -> CampaignResult:
    """Run ``trials`` independent trials; tallies do not depend on ``workers``."""
    params = dict(params or {})
    _check_hypothesis_class(conjecture_id, spec, params)
    if trials < 0:
        raise PreconditionError("trials must be nonnegative")
    workers = default_workers() if workers is None else max(1, int(workers))
    t0 = time.perf_counter()
    jobs = [(conjecture_id, spec, params, i) for i in range(trials)]
    if workers == 1 or trials < 2:
        outcomes = [_run_trial(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_trial, jobs, chunksize=max(1, trials // (4 * workers))))
    outcomes.sort(key=lambda o: o.index)
    runtime = time.perf_counter() - t0

    confirmed = sum(o.status == "confirmed" for o in outcomes)
    skips = sum(o.status == "skip" for o in outcomes)
    violations = [dict(o.witness, trial=o.index) for o in outcomes if o.status == "violation"]
    ranked = sorted((o for o in outcomes if o.margin is not None), key=lambda o: (o.margin, o.index))
    near = [{"trial": o.index, "margin": _num(o.margin)} for o in ranked[:NEAR_MISS_COUNT]]
    evidence = _summarize(conjecture_id, outcomes)
    artifacts = [dict(o.evidence, trial=o.index) for o in outcomes
                 if o.evidence and "artifacts" in o.evidence]
    return CampaignResult(conjecture_id, {k: _num(Fraction(v)) if isinstance(v, (int, Fraction)) else v
                                          for k, v in params.items()},
                          trials, confirmed, violations, skips, near, int(spec.seed), runtime,
                          evidence, artifacts)


def _summarize(conjecture_id: str, outcomes: list) -> dict:
    margins = [o.margin for o in outcomes if o.margin is not None and math.isfinite(o.margin)]
    out = {"min_margin": _num(min(margins)) if margins else None}
    if conjecture_id == "MeasureConverse":
        by_kind: dict = {}
        interesting = []
        for o in outcomes:
            ev = o.evidence
            stats = by_kind.setdefault(ev["kind"], {"count": 0, "max_abs_deviation": [], "matches_on_grid": 0})
            stats["count"] += 1
            stats["max_abs_deviation"].append(o.margin)
            if ev["matches_on_grid"]:
                stats["matches_on_grid"] += 1
                interesting.append(dict(ev, trial=o.index))
        for stats in by_kind.values():
            devs = sorted(stats.pop("max_abs_deviation"))
            finite = [v for v in devs if math.isfinite(v)]
            stats["min_max_abs_deviation"] = _num(devs[0])
            stats["median_max_abs_deviation"] = _num(devs[len(devs) // 2])
            stats["unbounded"] = len(devs) - len(finite)
        out["by_kind"] = by_kind
        out["interesting"] = interesting
    return out
