"""Residual checks shared by the CLI and the acceptance tests.

Every check returns a ``Check`` record; a suite is a list of them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import cd_kernel, cmv_operator, second_kind as sk, tau as tau_mod, toda
from .errors import OlpucError
from .factorization import (gauss_borel, phi, phi_determinantal, phi_matrix, reversed_poly, szego_from_olp,
                            szego_oracle, verblunsky)
from .laurent import LaurentPoly
from .measure import DEFAULT_QUAD_N, DeformationTimes, MeasureSpec, density, quad_nodes
from .moments import build, string_residual
from .ordering import CMV, OrderingSpec, build_upsilon, chi, class_of, nu_minus

# tolerances of the acceptance criteria
TOL = {
    "biorthogonality": 1e-9,
    "determinantal": 1e-9,
    "szego": 1e-9,
    "rho": 1e-10,
    "cd_triple": 1e-9,
    "reproducing": 1e-8,
    "projection_window": 1e-12,
    "projection_idempotent": 1e-9,
    "second_kind_methods": 1e-7,
    "second_kind_sums": 1e-8,
    "summation_rule": 1e-4,
    "toeplitz": 1e-6,
    "toeplitz_fixed_point": 1e-12,
    "schur_real": 1e-8,
    "lax_zs": 1e-4,
    "discrete": 1e-8,
    "tau_pivots": 1e-9,
    "tau_poly": 1e-8,
    "tau_second_kind": 1e-6,
    "bilinear": 1e-6,
    "band": 1e-11,
    "string": 1e-10,
    "recursion": 1e-9,
}


@dataclass
class Check:
    check: str
    params: dict
    residual: float
    tolerance: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual < self.tolerance)

    def to_json(self) -> dict:
        return {"check": self.check, "params": self.params, "residual": float(f"{self.residual:.15g}"),
                "tolerance": self.tolerance, "pass": self.passed}


def quad_n() -> int:
    return int(os.environ.get("OLPUC_QUAD_N", DEFAULT_QUAD_N))


def _params(spec: MeasureSpec, ord: OrderingSpec, **kw) -> dict:
    return {"measure": spec.kind, "ordering": str(ord), **kw}


def _values(mat: np.ndarray, ord: OrderingSpec, z: np.ndarray) -> np.ndarray:
    """Rows: polynomials, columns: points."""
    n = mat.shape[0]
    return mat @ np.array([chi(ord, n, x) for x in z]).T


# 1. biorthogonality by quadrature
def biorthogonality(spec: MeasureSpec, ord: OrderingSpec, l: int, N: int | None = None) -> Check:
    N = N or quad_n()
    gb = gauss_borel(build(spec, ord, l))
    u = quad_nodes(N)
    w = density(spec, u) * 2 * np.pi / N
    p1 = _values(phi_matrix(gb, 1), ord, u)
    p2 = _values(phi_matrix(gb, 2), ord, u)
    gram = (p1 * w) @ np.conj(p2).T
    res = float(np.max(np.abs(gram - np.eye(l))))
    return Check("biorthogonality", _params(spec, ord, l=l, N=N), res, TOL["biorthogonality"])


# 2. bordered determinants against LU
def determinantal(spec: MeasureSpec, ord: OrderingSpec, l_max: int = 8) -> Check:
    g = build(spec, ord, l_max + 2)
    gb = gauss_borel(g)
    res = 0.0
    for l in range(l_max + 1):
        for fam in (1, 2):
            a, b = phi(gb, ord, fam, l), phi_determinantal(g, ord, fam, l)
            res = max(res, a.distance(b) / max(a.max_abs(), 1e-300))
    return Check("determinantal", _params(spec, ord, l_max=l_max), res, TOL["determinantal"])


# 3. Szego polynomials from the OLPUC
def szego(spec: MeasureSpec, ord: OrderingSpec, l_max: int = 12) -> Check:
    gb = gauss_borel(build(spec, ord, l_max + 2))
    res = 0.0
    for l in range(l_max + 1):
        p = szego_oracle(spec, l)
        q = szego_from_olp(phi(gb, ord, 1, l), ord, l)
        if class_of(ord, l) == 1:
            res = max(res, float(np.max(np.abs(q - p))))
        else:
            # reciprocal branch: z^nu_-(l) phi_1 = P_l^*
            res = max(res, float(np.max(np.abs(q - reversed_poly(p)))))
    return Check("szego", _params(spec, ord, l_max=l_max), res, TOL["szego"])


# 4. rho^2 = 1 - alpha1 conj(alpha2)
def rho_identity(spec: MeasureSpec, ord: OrderingSpec, k_max: int = 12) -> Check:
    v = verblunsky(gauss_borel(build(spec, ord, k_max + 1)), ord)
    k = np.arange(1, k_max + 1)
    res = float(np.max(np.abs(v.rho2[k] - (1 - v.alpha1[k] * np.conj(v.alpha2[k])))))
    return Check("rho_identity", _params(spec, ord, k_max=k_max), res, TOL["rho"])


def random_pairs(rng: np.random.Generator, n: int, gap: float = 0.05, rmin: float = 0.3, rmax: float = 2.0):
    """Seeded (z, z') pairs off the CD diagonal |1 - z' conj z| > gap."""
    out = []
    while len(out) < n:
        r = rng.uniform(rmin, rmax, 2)
        t = rng.uniform(0, 2 * np.pi, 2)
        z, zp = r * np.exp(1j * t)
        if abs(1 - zp * np.conj(z)) > gap:
            out.append((complex(z), complex(zp)))
    return out


# 5. CD kernel three ways and the reproducing property
def cd_triple(spec: MeasureSpec, ord: OrderingSpec, l_max: int = 12, points: int = 100, seed: int = 42) -> Check:
    rng = np.random.default_rng(seed)
    g = build(spec, ord, l_max + 2 * ord.period + 2)
    gb = gauss_borel(g)
    pairs = random_pairs(rng, points)
    res = 0.0
    # the '-' associated polynomials need an index of each class below l
    for l in range(ord.n_plus + 1, l_max + 1):
        assoc = cd_kernel.associated(g, ord, l)
        for z, zp in pairs:
            s = cd_kernel.kernel_sum(gb, ord, l, z, zp)
            a = cd_kernel.kernel_abc(g, ord, l, z, zp)
            c = cd_kernel.cd_formula(assoc, l, z, zp)
            scale = max(abs(s), 1e-300)
            res = max(res, abs(s - a) / scale, abs(s - c) / scale)
    return Check("cd_triple", _params(spec, ord, l_max=l_max, points=points, seed=seed), res, TOL["cd_triple"])


def reproducing(spec: MeasureSpec, ord: OrderingSpec, l: int = 12, points: int = 20, seed: int = 42,
                N: int | None = None) -> Check:
    """int f(u) K(u, z') dmu(u) = f(z') for f in the span of chi^(0..l-1)."""
    N = N or quad_n()
    rng = np.random.default_rng(seed)
    gb = gauss_borel(build(spec, ord, l))
    coef = rng.normal(size=l) + 1j * rng.normal(size=l)
    u = quad_nodes(N)
    w = density(spec, u) * 2 * np.pi / N
    fu = coef @ np.array([chi(ord, l, x) for x in u]).T
    p2u = _values(phi_matrix(gb, 2)[:l, :l], ord, u)
    inner = (np.conj(p2u) * w) @ fu  # <f, phi_2^(k)>
    res = 0.0
    for _, zp in random_pairs(rng, points):
        val = inner @ (phi_matrix(gb, 1)[:l, :l] @ chi(ord, l, zp))
        ref = coef @ chi(ord, l, zp)
        res = max(res, abs(val - ref) / max(abs(ref), 1.0))
    return Check("reproducing", _params(spec, ord, l=l, N=N), res, TOL["reproducing"])


# 6. projection onto the window z^-p .. z^q for ordering (q+1, p)
def projection(spec: MeasureSpec, p: int, q: int, seed: int = 42) -> list[Check]:
    ord = OrderingSpec(q + 1, p)
    l = p + q + 1
    gb = gauss_borel(build(spec, ord, l + 2 * ord.period + 2))
    rng = np.random.default_rng(seed)
    f = LaurentPoly({e: complex(*rng.normal(size=2)) for e in range(-p - 3, q + 4)})
    pf = cd_kernel.project(spec, gb, ord, l, f)
    outside = max((abs(c) for e, c in pf.coeffs.items() if not -p <= e <= q), default=0.0)
    again = cd_kernel.project(spec, gb, ord, l, pf)
    params = _params(spec, ord, window=[-p, q])
    return [Check("projection_window", params, float(outside), TOL["projection_window"]),
            Check("projection_idempotent", params, again.distance(pf) / max(pf.max_abs(), 1e-300),
                  TOL["projection_idempotent"])]


def _ring(rng, n, rmin, rmax):
    r = rng.uniform(rmin, rmax, n)
    return r * np.exp(1j * rng.uniform(0, 2 * np.pi, n))


# 7. second kind functions by three routes
def second_kind_methods(spec: MeasureSpec, ord: OrderingSpec, l_max: int = 6, points: int = 20,
                        seed: int = 42) -> list[Check]:
    N = quad_n()
    rng = np.random.default_rng(seed)
    gb = gauss_borel(build(spec, ord, l_max + 2 * ord.period + 2))
    outer, inner = _ring(rng, points, 1.2, 2.5), _ring(rng, points, 0.3, 0.8)
    meth = sums = 0.0
    for l in range(l_max + 1):
        for which, zs in (("C11", outer), ("C21", outer), ("C12", inner), ("C22", inner)):
            for z in zs:
                vals = [sk.second_kind(spec, gb, ord, l, which, z, "series"),
                        sk.second_kind(spec, gb, ord, l, which, z, "cauchy", N),
                        sk.second_kind(spec, gb, ord, l, which, z, "gamma_det")]
                if l >= 1:
                    vals.append(sk.second_kind(spec, gb, ord, l, which, z, "geronimus", N))
                s = max(abs(vals[0]), 1.0)
                meth = max(meth, max(abs(v - vals[0]) for v in vals) / s)
        for z in np.concatenate([outer, inner]):
            lo, hi = sk.region(spec, "C1")
            if lo < abs(z) < hi and not 0.95 < abs(z) < 1.05:
                full = {w: sk.second_kind(spec, gb, ord, l, w, z) for w in ("C1", "C2", "C11", "C12", "C21", "C22")}
                sums = max(sums, abs(full["C1"] - full["C11"] - full["C12"]) / max(abs(full["C1"]), 1.0),
                           abs(full["C2"] - full["C21"] - full["C22"]) / max(abs(full["C2"]), 1.0))
    p = _params(spec, ord, l_max=l_max, points=points, seed=seed)
    return [Check("second_kind_methods", p, meth, TOL["second_kind_methods"]),
            Check("second_kind_sums", p, sums, TOL["second_kind_sums"])]


def summation_rule(spec: MeasureSpec, ord: OrderingSpec, L: int | None = None, near: complex = 0.3 + 0.1j,
                   far: complex = 1.8 - 0.6j) -> Check:
    """Partial sums over l < L against +-1/(z - z') or 0.

    The diagonal sums must also have a nonincreasing error over the last few L.
    Convergence is per period of the ordering, so L defaults to six periods.
    """
    L = L or 6 * ord.period
    gb = gauss_borel(build(spec, ord, L + 2 * ord.period + 2))
    worst, monotone = 0.0, True
    for fam in (1, 2):
        for part in (1, 2):
            # class-1 sums converge for |z'| < |z|, class-2 sums for |z'| > |z|
            z, zp = (far, near) if part == 1 else (near, far)
            for other in (1, 2):
                target = sk.summation_target(part, other, z, zp)
                errs = [abs(sk.summation_sum(spec, gb, ord, n, fam, part, other, z, zp) - target)
                        for n in range(L - 4, L + 1)]
                worst = max(worst, errs[-1])
                if other == part:
                    monotone &= all(b <= a * (1 + 1e-6) + 1e-14 for a, b in zip(errs, errs[1:]))
    return Check("summation_rule", _params(spec, ord, L=L, monotone=monotone),
                 worst if monotone else float("inf"), TOL["summation_rule"])


# 8. Toeplitz lattice
def toeplitz(spec: MeasureSpec, ord: OrderingSpec = CMV, t11: complex = 0.1, t21: complex = 0.0,
             steps: int = 100, n: int = 24, k_max: int = 8) -> Check:
    v0 = toda.refactorize_at_time(spec, ord, DeformationTimes(), n)
    v = toda.integrate_flow(v0, t11, t21, steps)
    ref = toda.refactorize_at_time(spec, ord, DeformationTimes.first(t11, t21), n)
    k_max = min(k_max, len(v) - 1)  # the flow drops its untrusted tail
    k = slice(0, k_max + 1)
    res = float(max(np.max(np.abs(v.alpha1[k] - ref.alpha1[k])), np.max(np.abs(v.alpha2[k] - ref.alpha2[k]))))
    tol = TOL["toeplitz_fixed_point"] if spec.kind == "lebesgue" else TOL["toeplitz"]
    return Check("toeplitz", _params(spec, ord, t11=str(t11), t21=str(t21), steps=steps, k_max=k_max), res, tol)


def schur_reality(spec: MeasureSpec, t11: float = 0.1, steps: int = 100, n: int = 24) -> Check:
    v0 = toda.refactorize_at_time(spec, CMV, DeformationTimes(), n)
    v = toda.integrate_flow(v0, t11, -np.conj(t11), steps)
    ref = toda.refactorize_at_time(spec, CMV, DeformationTimes.first(t11, -np.conj(t11)), n)
    res = float(max(np.max(np.abs(v.alpha1.imag)), np.max(np.abs(ref.alpha1[: len(v)].imag)),
                    np.max(np.abs(v.alpha1 - v.alpha2))))
    return Check("schur_reality", _params(spec, CMV, t11=t11), res, TOL["schur_real"])


# 9. Lax and Zakharov-Shabat
def lax_zs(spec: MeasureSpec, ord: OrderingSpec, size: int = 12) -> list[Check]:
    p = _params(spec, ord, size=size, eps=1e-3)
    return [Check("lax", p, toda.lax_residual(spec, ord, size), TOL["lax_zs"]),
            Check("zakharov_shabat", p, toda.zs_residual(spec, ord, size), TOL["lax_zs"])]


# 10. discrete flows
def discrete(spec: MeasureSpec, ord: OrderingSpec, lam: complex = 0.3 + 0.1j, size: int = 24) -> list[Check]:
    """Darboux steps; entries grow like |lam|^-k, so the block stays moderate."""
    out = []
    for kind, direction in (("D1", "T1"), ("D2", "T2"), ("conj_pair", "T1"), ("conj_pair", "T2")):
        r = toda.discrete_residuals(spec, ord, size, lam, direction, kind)
        p = _params(spec, ord, lam=str(lam), kind=kind, direction=direction)
        out.append(Check("discrete_two_path", p, max(r["lower"], r["upper"]), TOL["discrete"]))
        out.append(Check("discrete_darboux_flip", p, r["darboux"], TOL["discrete"]))
        if kind == "conj_pair":
            new_spec, _ = toda.discrete_step(spec, gauss_borel(build(spec, ord, size)), ord, lam, direction, kind)
            h = gauss_borel(build(new_spec, ord, size)).h
            ok = bool(np.all(h.real > 0) and np.max(np.abs(h.imag)) < 1e-10 * np.max(np.abs(h)))
            out.append(Check("discrete_positivity", p, 0.0 if ok else float("inf"), 1.0))
    return out


# 11. tau functions
def tau_pivots(spec: MeasureSpec, ord: OrderingSpec, times: DeformationTimes, l_max: int = 8) -> Check:
    gb = toda.factors_at_time(spec, ord, times, l_max)
    res = 0.0
    for l in range(1, l_max + 1):
        t = tau_mod.tau(spec, ord, times, l)
        p = np.prod(gb.h[:l])
        res = max(res, abs(t - p) / abs(p))
    return Check("tau_pivots", _params(spec, ord, l_max=l_max), res, TOL["tau_pivots"])


def tau_poly(spec: MeasureSpec, ord: OrderingSpec, times: DeformationTimes, l_max: int = 8, points: int = 20,
             seed: int = 42) -> Check:
    rng = np.random.default_rng(seed)
    zs = _ring(rng, points, 0.3, 2.5)
    res = max(tau_mod.tau_poly_residual(spec, ord, times, l, z)
              for l in range(ord.n_plus + ord.n_minus, l_max + 1) for z in zs)
    return Check("tau_poly", _params(spec, ord, l_max=l_max, points=points), res, TOL["tau_poly"])


def tau_second_kind(spec: MeasureSpec, ord: OrderingSpec, times: DeformationTimes, l_max: int = 6,
                    points: int = 20, seed: int = 42) -> Check:
    rng = np.random.default_rng(seed)
    # |z| within 0.85 of the circle keeps the Miwa factor expansions inside the coefficient bound
    zs = np.concatenate([_ring(rng, points // 2, 1 / 0.85, 2.5), _ring(rng, points - points // 2, 0.3, 0.85)])
    res = max(tau_mod.tau_second_kind_residual(spec, ord, times, l, z) for l in range(l_max + 1) for z in zs)
    return Check("tau_second_kind", _params(spec, ord, l_max=l_max, points=points), res, TOL["tau_second_kind"])


def bilinear(spec: MeasureSpec, ord: OrderingSpec, pairs=None, N: int = 2048) -> Check:
    pairs = pairs or [
        (DeformationTimes(), DeformationTimes(), 0, 0),
        (DeformationTimes(), DeformationTimes(), 2, 1),
        (DeformationTimes.first(0.05), DeformationTimes.first(0, 0.03), 2, 2),
        (DeformationTimes.first(0.07, -0.07), DeformationTimes.first(-0.05j, 0.02), 3, 1),
    ]
    res = max(tau_mod.bilinear_residual(spec, ord, t, tp, k, l, N=N) for t, tp, k, l in pairs)
    return Check("bilinear", _params(spec, ord, N=N, pairs=len(pairs)), res, TOL["bilinear"])


def wave_bilinear(spec: MeasureSpec, ord: OrderingSpec) -> Check:
    t, tp = DeformationTimes.first(0.05), DeformationTimes.first(0, 0.03)
    res = max(tau_mod.wave_bilinear_residual(spec, ord, t, tp, n, m) for n, m in ((0, 0), (2, 1), (3, 3)))
    return Check("wave_bilinear", _params(spec, ord), res, TOL["bilinear"])


# 12. band structure, string equation, recursions
def band(spec: MeasureSpec, ord: OrderingSpec, size: int = 16) -> Check:
    gb = gauss_borel(build(spec, ord, size))
    ups = build_upsilon(ord, size)
    res = max(cmv_operator.jacobi_dressed(gb, ups, 1).outside_band(),
              cmv_operator.jacobi_dressed(gb, ups, 2, transpose=True).outside_band())
    return Check("band", _params(spec, ord, size=size), res, TOL["band"])


def string_equation(spec: MeasureSpec, ord: OrderingSpec, size: int = 16) -> Check:
    g = build(spec, ord, size)
    res = string_residual(g, build_upsilon(ord, size)) / np.max(np.abs(g.entries))
    return Check("string_equation", _params(spec, ord, size=size), res, TOL["string"])


def recursion(spec: MeasureSpec, ord: OrderingSpec, size: int = 16, seed: int = 42) -> Check:
    rng = np.random.default_rng(seed)
    gb = gauss_borel(build(spec, ord, size))
    res = 0.0
    for z in _ring(rng, 5, 0.5, 1.5):
        scale = max(1.0, float(np.max(np.abs(gb.S1 @ chi(ord, size, z)))))
        res = max(res, cmv_operator.recursion_residual(gb, ord, z) / scale)
    if ord.is_cmv:
        v = verblunsky(gb, ord)
        j_dressed = cmv_operator.jacobi_dressed(gb, build_upsilon(ord, size), 1)
        j_explicit = cmv_operator.jacobi_explicit_cmv(v, size, ord)
        n = min(j_explicit.trusted, j_dressed.trusted)
        res = max(res, float(np.max(np.abs(j_explicit.entries[:n, :n] - j_dressed.entries[:n, :n]))))
    return Check("recursion", _params(spec, ord, size=size), res, TOL["recursion"])


def _guard(name: str, spec: MeasureSpec, ord: OrderingSpec, fn, *args, **kw) -> list[Check]:
    """Run a check; a library error counts as a failed check rather than a crash."""
    try:
        out = fn(*args, **kw)
    except OlpucError as exc:
        return [Check(name, _params(spec, ord, error=f"{type(exc).__name__}: {exc}"), float("inf"), 0.0)]
    return out if isinstance(out, list) else [out]


def verify_all(spec: MeasureSpec, ord: OrderingSpec, size: int = 16, points: int = 20, seed: int = 42) -> list[Check]:
    """Every residual suite that applies to the measure and ordering."""
    lo, hi = spec.annulus()
    entire = lo == 0 and hi == np.inf
    t = DeformationTimes.first(0.05, 0.02)
    plan = [
        ("biorthogonality", biorthogonality, (spec, ord, size), {}),
        ("determinantal", determinantal, (spec, ord, min(8, size - 2)), {}),
        ("rho_identity", rho_identity, (spec, ord, min(12, size - 1)), {}),
        ("string_equation", string_equation, (spec, ord, size), {}),
        ("band", band, (spec, ord, size), {}),
        ("recursion", recursion, (spec, ord, size), {"seed": seed}),
        ("cd_triple", cd_triple, (spec, ord, min(12, size)), {"points": points, "seed": seed}),
        ("reproducing", reproducing, (spec, ord, min(12, size)), {"seed": seed}),
        ("second_kind", second_kind_methods, (spec, ord, 6), {"points": points, "seed": seed}),
        ("summation_rule", summation_rule, (spec, ord), {}),
        ("toeplitz", toeplitz, (spec, ord), {}),
        ("lax_zs", lax_zs, (spec, ord, 12), {}),
        ("discrete", discrete, (spec, ord), {}),
        ("tau_pivots", tau_pivots, (spec, ord, t), {}),
        ("tau_poly", tau_poly, (spec, ord, t), {"points": points, "seed": seed}),
        ("tau_second_kind", tau_second_kind, (spec, ord, t), {"points": points, "seed": seed}),
    ]
    if spec.is_real():
        plan.append(("szego", szego, (spec, ord), {}))
        if ord.is_cmv:
            plan.append(("schur_reality", schur_reality, (spec,), {}))
    if entire:
        plan.append(("bilinear", bilinear, (spec, ord), {}))
        plan.append(("wave_bilinear", wave_bilinear, (spec, ord), {}))
    out = []
    for name, fn, args, kw in plan:
        out += _guard(name, spec, ord, fn, *args, **kw)
    return out
