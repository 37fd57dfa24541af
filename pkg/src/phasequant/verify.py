"""Named property suites producing machine-readable verdict reports."""

from __future__ import annotations

import json
import math
import random
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .coeff import Coeff, HBAR
from .errors import TruncationWarning
from .fock import FockState, coherent_state, expectation, fock_state, segal_bargmann_transform, vacuum
from .operators import LadderExpr, to_matrix
from .phasespace import (
    exact_q_average,
    husimi_q,
    husimi_q_xp,
    marginal_second_moments,
    born_density_x,
    q_bound,
    q_equals_sb_check,
    q_marginal_x,
    reproducing_apply,
    variance_report,
    weierstrass_grid,
    wigner,
)
from .quadrature import QuadratureGrid, line_rule
from .quantization import (
    Scheme,
    convert_scheme,
    divisible_by_hbar_power,
    groenewold_residual,
    quantize,
    toeplitz_deviation,
    toeplitz_matrix,
)
from .symbols import PhaseSymbol, parse_symbol

SUITES = ("central-identity", "scheme-table", "groenewold", "kernel", "qfunction", "marginals", "variances")
ALL = "all"


@dataclass(frozen=True)
class VerifyConfig:
    hbar: float = 1.0
    central_instances: int = 100
    weyl_instances: int = 50
    groenewold_pairs: int = 50
    max_symbol_degree: int = 6
    max_levels: int = 8
    nodes: int = 40
    kernel_nodes: int = 60

    def __post_init__(self):
        for name in ("central_instances", "weyl_instances", "groenewold_pairs", "nodes", "kernel_nodes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")


@dataclass
class Check:
    identity: str
    anchor: str
    max_deviation: float
    tolerance: float
    passed: bool
    wall_time: float = 0.0
    detail: str = ""
    deviations: list[float] = field(default_factory=list)

    def to_dict(self, include_timing: bool) -> dict:
        d = {
            "identity": self.identity,
            "anchor": self.anchor,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail,
            "deviations": self.deviations,
        }
        if include_timing:
            d["wall_time"] = self.wall_time
        return d


@dataclass
class VerdictReport:
    suite: str
    seed: int
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, include_timing: bool = False) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [c.to_dict(include_timing) for c in self.checks],
        }

    def to_json(self, include_timing: bool = False) -> str:
        # wall times vary between runs, so they are left out unless asked for
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)


# -- random instances -----------------------------------------------------------------

def random_rational(rng: random.Random, bound: int = 9) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_symbol(rng: random.Random, max_degree: int = 6, mode_count: int = 1, max_terms: int = 6) -> PhaseSymbol:
    """Sparse alpha-form polynomial with small complex-rational coefficients."""
    out = PhaseSymbol.zero(mode_count)
    for _ in range(rng.randint(1, max_terms)):
        key = []
        budget = max_degree
        for _ in range(mode_count):
            j = rng.randint(0, budget)
            k = rng.randint(0, budget - j)
            budget -= j + k
            key.append((j, k))
        c = Coeff.rational(random_rational(rng), random_rational(rng) if rng.random() < 0.5 else 0)
        if rng.random() < 0.3:
            c = c * HBAR
        out = out + PhaseSymbol.monomial(key, c)
    return out


def random_real_xp_symbol(rng: random.Random, max_degree: int, mode_count: int = 1, max_terms: int = 4) -> PhaseSymbol:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        key = []
        budget = max_degree
        for _ in range(mode_count):
            a = rng.randint(0, budget)
            b = rng.randint(0, budget - a)
            budget -= a + b
            key.append((a, b))
        terms[tuple(key)] = Coeff.rational(random_rational(rng))
    return PhaseSymbol.from_xp(terms, mode_count)


def random_state(rng: random.Random, levels: int, cutoff: int | None = None, hbar: float = 1.0) -> FockState:
    vec = np.array([complex(float(random_rational(rng)), float(random_rational(rng))) for _ in range(levels)])
    if not np.any(vec):
        vec[0] = 1.0
    state = FockState(vec, (levels,), hbar).normalized()
    return state.with_cutoffs(cutoff) if cutoff else state


def random_point(rng: random.Random, radius: float = 2.0) -> complex:
    return complex(rng.uniform(-radius, radius), rng.uniform(-radius, radius))


def _rng(seed: int, suite: str) -> random.Random:
    return random.Random(f"{seed}:{suite}")


def _relative(a: complex, b: complex) -> float:
    return abs(a - b) / (1.0 + abs(b))


def _timed(identity: str, anchor: str, tolerance: float, fn: Callable[[], tuple]) -> Check:
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        result = fn()
    deviations, detail = result[0], result[1]
    passed = result[2] if len(result) > 2 else None
    worst = float(max(deviations)) if deviations else 0.0
    if passed is None:
        passed = worst <= tolerance
    return Check(
        identity,
        anchor,
        worst,
        tolerance,
        bool(passed),
        time.perf_counter() - start,
        detail,
        [float(d) for d in deviations],
    )


# -- suites -------------------------------------------------------------------------------

def _central_instances(rng: random.Random, cfg: VerifyConfig, count: int):
    for _ in range(count):
        hbar = rng.choice((0.5, 1.0, 2.0))
        f = random_symbol(rng, cfg.max_symbol_degree)
        levels = rng.randint(1, cfg.max_levels)
        psi = random_state(rng, levels, levels + cfg.max_symbol_degree, hbar)
        yield f, psi


def suite_central_identity(seed: int, cfg: VerifyConfig) -> list[Check]:
    rng = _rng(seed, "central-identity")

    def run():
        devs = []
        for f, psi in _central_instances(rng, cfg, cfg.central_instances):
            devs.append(_relative(expectation(psi, quantize(f, Scheme.ANTIWICK)), exact_q_average(f, psi)))
        ok = sum(d <= 1e-9 for d in devs)
        return devs, f"{ok}/{len(devs)} instances within tolerance"

    return [_timed("central-identity", "<psi|Q_AW(A)|psi> = int A Q_psi", 1e-9, run)]


def suite_scheme_table(seed: int, cfg: VerifyConfig) -> list[Check]:
    checks = []
    X, P = LadderExpr.position(), LadderExpr.momentum()
    half = HBAR * Fraction(1, 2)
    expected = {
        Scheme.WEYL: Coeff.rational(0),
        Scheme.WICK: -half,
        Scheme.ANTIWICK: half,
    }
    for name, op in (("x", X), ("p", P)):
        for scheme, shift in expected.items():
            def run(name=name, op=op, scheme=scheme, shift=shift):
                got = quantize(parse_symbol(f"{name}^2"), scheme)
                want = op * op + LadderExpr.identity(1, shift)
                return [0.0 if got == want else 1.0], f"Q_{scheme.value}({name}^2) = {got}"

            label = {"weyl": "", "wick": " - hbar/2", "antiwick": " + hbar/2"}[scheme.value]
            checks.append(
                _timed(f"scheme-table:{scheme.value}:{name}^2", f"Q_{scheme.value}({name}^2) = {name.upper()}^2{label}", 0.0, run)
            )

    def conversion():
        got = convert_scheme(parse_symbol("x^2"), Scheme.WEYL, Scheme.ANTIWICK)
        return [0.0 if got == parse_symbol("x^2 - hbar/2") else 1.0], f"AW symbol of Q_Weyl(x^2) = {got}"

    checks.append(_timed("scheme-table:conversion", "Q_AW^-1(Q_Weyl(x^2)) = x^2 - hbar/2", 0.0, conversion))

    rng = _rng(seed, "scheme-table")

    def weyl_route():
        devs = []
        for f, psi in _central_instances(rng, cfg, cfg.weyl_instances):
            hilbert = expectation(psi, quantize(f, Scheme.WEYL))
            classical = exact_q_average(convert_scheme(f, Scheme.WEYL, Scheme.ANTIWICK), psi)
            devs.append(_relative(hilbert, classical))
        return devs, f"{sum(d <= 1e-9 for d in devs)}/{len(devs)} instances within tolerance"

    checks.append(_timed("scheme-table:weyl-route", "<Q_Weyl(A)> = int Q_AW^-1(Q_Weyl(A)) Q_psi", 1e-9, weyl_route))
    return checks


def suite_groenewold(seed: int, cfg: VerifyConfig) -> list[Check]:
    rng = _rng(seed, "groenewold")

    def low_degree():
        devs = []
        for _ in range(cfg.groenewold_pairs):
            f = random_real_xp_symbol(rng, 2)
            g = random_real_xp_symbol(rng, 6)
            devs.append(0.0 if groenewold_residual(f, g).is_zero() else 1.0)
        return devs, f"{devs.count(0.0)}/{len(devs)} residuals exactly zero"

    def cubic():
        r = groenewold_residual(parse_symbol("x^3"), parse_symbol("p^3"))
        ok = (not r.is_zero()) and divisible_by_hbar_power(r, 2)
        return [0.0 if ok else 1.0], f"residual(x^3, p^3) = {r}", ok

    return [
        _timed("groenewold:degree<=2", "[Q(f),Q(g)]/(i hbar) = Q({f,g}) for deg f <= 2", 0.0, low_degree),
        _timed("groenewold:cubic", "residual(x^3, p^3) nonzero, O(hbar^2)", 0.0, cubic),
    ]


def suite_kernel(seed: int, cfg: VerifyConfig) -> list[Check]:
    rng = _rng(seed, "kernel")
    hbar = cfg.hbar

    def reproduce():
        devs = []
        grid = QuadratureGrid(1, cfg.kernel_nodes)
        points = [random_point(rng, 2.0 * math.sqrt(hbar)) for _ in range(20)]
        for n in range(7):
            F = segal_bargmann_transform(fock_state(n, n + 1, hbar))
            for z in points:
                exact = F(np.array([[z]]))[0]
                devs.append(abs(reproducing_apply(F, [z], grid) - exact) / abs(exact))
        return devs, "monomials w^n, n <= 6, at 20 points"

    def toeplitz():
        f = parse_symbol("x^2")
        quad = toeplitz_matrix(f, QuadratureGrid(1, cfg.nodes), 6, hbar)
        sym = to_matrix(quantize(f, Scheme.ANTIWICK), 6, hbar)
        return [toeplitz_deviation(quad, sym, f.mode_degree())], "x^2 at cutoff 6"

    def resolution():
        quad = toeplitz_matrix(PhaseSymbol.constant(1), QuadratureGrid(1, cfg.nodes), 6, hbar)
        return [float(np.max(np.abs(quad.entries - np.eye(6))))], "coherent-state resolution of identity"

    return [
        _timed("kernel:reproducing", "F(z) = int exp(z conj(w)/hbar) F(w) mu(w) dw", 1e-7, reproduce),
        _timed("kernel:toeplitz", "quadrature Toeplitz matrix = symbolic anti-Wick matrix", 1e-7, toeplitz),
        _timed("kernel:resolution", "int |alpha><alpha| d^2alpha/pi = I", 1e-8, resolution),
    ]


def suite_qfunction(seed: int, cfg: VerifyConfig) -> list[Check]:
    rng = _rng(seed, "qfunction")
    hbar = cfg.hbar

    def sb_identity():
        devs = []
        for _ in range(20):
            psi = random_state(rng, rng.randint(1, cfg.max_levels), hbar=hbar)
            pts = np.array([[random_point(rng, 3.0)] for _ in range(100)])
            devs.append(q_equals_sb_check(psi, pts))
        return devs, "20 states x 100 points"

    axis = np.linspace(-4 * math.sqrt(hbar), 4 * math.sqrt(hbar), 41)
    bound = q_bound(hbar)

    def sup_bound():
        devs = []
        states = [vacuum(hbar=hbar), fock_state(1, 2, hbar)] + [
            random_state(rng, rng.randint(1, cfg.max_levels), hbar=hbar) for _ in range(10)
        ]
        for psi in states:
            q = husimi_q_xp(psi, axis[:, None], axis[None, :])
            devs.append(max(0.0, float(q.max()) - bound) + max(0.0, -float(q.min())))
        return devs, f"bound 1/(2 pi hbar) = {bound!r}", max(devs) <= 1e-12

    def attained():
        beta = complex(0.7, -0.4)
        psi = coherent_state(beta, hbar=hbar)
        peak = husimi_q(psi, [beta], "xpDensity")
        return [abs(peak - bound)], "coherent state at its centre"

    def smoothing():
        devs = []
        xs = np.linspace(-3 * math.sqrt(hbar), 3 * math.sqrt(hbar), 21)
        for psi in (vacuum(hbar=hbar), fock_state(1, 2, hbar), random_state(rng, 4, hbar=hbar)):
            smoothed = weierstrass_grid(psi, xs, xs, cfg.nodes)
            q = husimi_q_xp(psi, xs[:, None], xs[None, :])
            devs.append(float(np.max(np.abs(smoothed - q))))
        return devs, "vacuum, |1>, random 4-level state on 21x21"

    def negativity():
        w = wigner(fock_state(1, 2, hbar), 0.0, 0.0)
        return [abs(w - (-1.0 / (np.pi * hbar)))], f"W_1(0,0) = {w!r}"

    return [
        _timed("qfunction:sb-identity", "Q(z) = |F(z)|^2 mu(z)", 1e-9, sb_identity),
        _timed("qfunction:bound", "0 <= Q(z) <= 1/(2 pi hbar)^n", 1e-12, sup_bound),
        _timed("qfunction:bound-attained", "coherent Q peak = 1/(2 pi hbar)", 1e-9, attained),
        _timed("qfunction:weierstrass", "Gaussian-smoothed Wigner = Q", 1e-4, smoothing),
        _timed("qfunction:wigner-negativity", "W_|1>(0,0) = -1/(pi hbar)", 1e-6, negativity),
    ]


def suite_marginals(seed: int, cfg: VerifyConfig) -> list[Check]:
    hbar = cfg.hbar
    psi = vacuum(hbar=hbar)

    def q_moment():
        q2, _ = marginal_second_moments(psi, cfg.nodes)
        return [abs(q2 - hbar)], f"int x^2 Qmarg dx = {q2!r}"

    def born_moment():
        _, b2 = marginal_second_moments(psi, cfg.nodes)
        return [abs(b2 - hbar / 2)], f"int x^2 |psi|^2 dx = {b2!r}"

    def gap():
        xs = np.linspace(-4 * math.sqrt(hbar), 4 * math.sqrt(hbar), 401)
        g = float(np.max(np.abs(q_marginal_x(psi, xs, cfg.nodes) - born_density_x(psi, xs))))
        return [g], f"sup |Qmarg - |psi|^2| = {g!r} (must exceed 0.05)", g > 0.05

    def normalization():
        xs, ws = line_rule(cfg.nodes, 0.0, math.sqrt(2 * hbar))
        total = float(np.sum(ws * q_marginal_x(psi, xs, cfg.nodes)))
        return [abs(total - 1.0)], f"int Qmarg dx = {total!r}"

    return [
        _timed("marginals:q-second-moment", "int x^2 int Q dp dx = hbar", 1e-4, q_moment),
        _timed("marginals:born-second-moment", "int x^2 |<x|psi>|^2 dx = hbar/2", 1e-6, born_moment),
        _timed("marginals:gap", "int Q dp != |<x|psi>|^2", 0.05, gap),
        _timed("marginals:normalization", "int int Q dp dx = 1", 1e-8, normalization),
    ]


def suite_variances(seed: int, cfg: VerifyConfig) -> list[Check]:
    rng = _rng(seed, "variances")
    hbar = cfg.hbar

    def shifts():
        devs, ok = [], True
        for _ in range(20):
            psi = random_state(rng, rng.randint(1, cfg.max_levels), cfg.max_levels + 2, hbar)
            w, aw = variance_report(psi, Scheme.WEYL), variance_report(psi, Scheme.ANTIWICK)
            devs.append(max(abs(aw.var_x - w.var_x - hbar / 2), abs(aw.var_p - w.var_p - hbar / 2)))
            ok &= aw.product > w.product
        return devs, "Var_AW - Var_Weyl per axis over 20 random states", ok and max(devs) <= 1e-10

    def coherent():
        psi = coherent_state(complex(0.5, -0.3), hbar=hbar)
        w, aw = variance_report(psi, Scheme.WEYL), variance_report(psi, Scheme.ANTIWICK)
        devs = [abs(w.product - hbar**2 / 4), abs(aw.product - hbar**2)]
        return devs, f"Weyl product {w.product!r}, anti-Wick product {aw.product!r}"

    return [
        _timed("variances:shift", "Var_AW = Var_Weyl + hbar/2; AW product > Weyl product", 1e-10, shifts),
        _timed("variances:coherent", "coherent products hbar^2/4 (Weyl) and hbar^2 (anti-Wick)", 1e-10, coherent),
    ]


_SUITES: dict[str, Callable[[int, VerifyConfig], list[Check]]] = {
    "central-identity": suite_central_identity,
    "scheme-table": suite_scheme_table,
    "groenewold": suite_groenewold,
    "kernel": suite_kernel,
    "qfunction": suite_qfunction,
    "marginals": suite_marginals,
    "variances": suite_variances,
}


def run_suite(name: str, seed: int = 0, config: VerifyConfig | None = None) -> VerdictReport:
    config = config or VerifyConfig()
    if name == ALL:
        names = list(SUITES)
    elif name in _SUITES:
        names = [name]
    else:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES + (ALL,))}")
    report = VerdictReport(name, seed)
    for n in names:
        report.checks.extend(_SUITES[n](seed, config))
    return report
