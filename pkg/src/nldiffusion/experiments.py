"""Experiments behind the acceptance checks.  Each ``run_*`` returns an :class:`ExperimentResult`
holding named pass/fail checks, CSV tables and scalar metrics."""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import hfourier as hf
from .config import Config
from .evolution import check_order_preservation, evolve, functional
from .geometry import Kind, RadialManifold, circle_grid, laplace_beltrami_radial, panel_grid, sphere_grid
from .kernels import Kernel, normalize_mass, normalize_spectral, spectral_coefficient
from .nonlocal_op import assemble, infinitesimal_limit_study
from .spectral import (
    decay_report,
    eigendecompose,
    match_zonal_tower,
    oracle_circle,
    pair_eigenvalues,
    sphere_gamma,
)


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    threshold: str
    note: str = ""


@dataclass
class ExperimentResult:
    name: str
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name, passed, value, threshold, note=""):
        self.checks.append(Check(name, bool(passed), float(value), str(threshold), note))

    def get(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _timed(fn):
    def wrapper(cfg: Config, *a, **kw):
        t0 = time.perf_counter()
        res = fn(cfg, *a, **kw)
        res.runtime = time.perf_counter() - t0
        res.metrics["runtime_s"] = res.runtime
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def loglog_slope(t, y) -> float:
    return float(np.polyfit(np.log(t), np.log(y), 1)[0])


def _gauss(width):
    return lambda r: np.exp(-(np.asarray(r) / width) ** 2)


TEST_FUNCTIONS = {
    "cos": np.cos,
    "gauss": lambda r: np.exp(-np.asarray(r) ** 2),
    "square": lambda r: np.asarray(r) ** 2,
}
# quadratics are reproduced exactly by the second moment, so only a floor is meaningful
FLOOR_FUNCTIONS = {"square"}


def _base_kernel(cfg: Config) -> Kernel:
    return Kernel(cfg.kernel.delta, cfg.kernel.p)


# -- local limit ---------------------------------------------------------------

@_timed
def run_limit(cfg: Config) -> ExperimentResult:
    """L_eps u against q Delta_M u on a ladder of eps."""
    lc = cfg.limit
    res = ExperimentResult("limit")
    rows = []
    for case in lc.cases:
        kind, dim, fname = case.split(":")
        m = RadialManifold(kind, int(dim))
        k = normalize_mass(_base_kernel(cfg), RadialManifold(Kind.EUCLIDEAN, m.dim))
        table = infinitesimal_limit_study(
            m, k, TEST_FUNCTIONS[fname], lc.epsilons, tuple(lc.window),
            nodes_per_support=lc.nodes_per_support, angular_order=lc.angular_order,
        )
        errs = np.array([r.error for r in table])
        orders = np.array([r.order for r in table[1:]])
        tag = f"{kind}{m.dim}_{fname}"
        for r in table:
            rows.append([tag, r.eps, r.error, r.order])
        res.metrics[f"{tag}_errors"] = errs.tolist()
        res.metrics[f"{tag}_orders"] = orders.tolist()
        if fname in FLOOR_FUNCTIONS:
            res.check(f"{tag}_floor", errs.max() < lc.floor_tol, errs.max(), f"< {lc.floor_tol:g}")
            continue
        ok = np.all((orders >= lc.order_min) & (orders <= lc.order_max))
        res.check(f"{tag}_order", ok, orders.min() if ok else orders[np.argmax(np.abs(orders - 2))],
                  f"in [{lc.order_min}, {lc.order_max}]")
        res.check(f"{tag}_monotone", np.all(np.diff(errs) < 0), float(np.max(np.diff(errs))), "< 0")
        res.check(f"{tag}_pointwise", errs[-1] <= lc.pointwise_tol, errs[-1], f"<= {lc.pointwise_tol:g}")
        eps = np.asarray(lc.epsilons)
        C = errs[0] / eps[0] ** lc.alpha
        worst = float(np.max(errs / (C * eps**lc.alpha)))
        res.check(f"{tag}_alpha_rate", worst <= 1 + 1e-12, worst, f"error <= C eps^{lc.alpha:g}")
    res.tables["limit.csv"] = (["case", "eps", "error", "order"], rows)
    return res


# -- compact spectra -----------------------------------------------------------

@_timed
def run_spectrum(cfg: Config) -> ExperimentResult:
    """Circle spectrum against the cosine oracle; sphere zonal tower against Funk-Hecke."""
    sc = cfg.spectrum
    res = ExperimentResult("spectrum")
    mc = RadialManifold(Kind.CIRCLE)
    k = normalize_mass(replace(_base_kernel(cfg), delta=sc.circle_delta), mc)
    grid = circle_grid(sc.circle_n)
    A = assemble(mc, k, grid)
    S = eigendecompose(A)
    res.check("circle_lambda0", abs(S.lam[0]) <= sc.lambda0_tol, abs(S.lam[0]), f"<= {sc.lambda0_tol:g}")
    res.check("circle_lambda1_positive", S.lam[1] > 0, S.lam[1], "> 0")
    res.check("circle_monotone", np.all(np.diff(S.lam) >= -1e-14), float(np.min(np.diff(S.lam))), ">= 0")
    orc = oracle_circle(k, sc.k_max)
    idx, err = pair_eigenvalues(S.gamma, orc)
    res.check("circle_oracle", err.max() <= sc.circle_tol, err.max(), f"<= {sc.circle_tol:g}")
    res.check("circle_orthonormality", S.orthonormality_defect() <= sc.ortho_tol, S.orthonormality_defect(),
              f"<= {sc.ortho_tol:g}")
    res.check("circle_gamma_le_1", S.gamma.max() <= 1 + 1e-10, S.gamma.max(), "<= 1")
    res.metrics.update(lambda1=float(S.lam[1]), gamma_min=float(S.gamma.min()))
    res.tables["spectrum_circle.csv"] = (
        ["k", "gamma_k", "lambda_k", "oracle_value", "abs_error"],
        [[j, S.gamma[i], S.lam[i], o, e] for j, (i, o, e) in enumerate(zip(idx, orc, err))],
    )

    ms = RadialManifold(Kind.SPHERE, 2)
    ks = normalize_mass(replace(_base_kernel(cfg), delta=sc.sphere_delta), ms)
    gs = sphere_grid(ms, sc.sphere_n)
    As = assemble(ms, ks, gs)
    Ss = eigendecompose(As)
    idx, overlap = match_zonal_tower(Ss, gs.nodes, sc.l_max)
    fh = sphere_gamma(ks, sc.l_max)
    err = np.abs(Ss.gamma[idx] - fh)
    res.check("sphere_funk_hecke", err.max() <= sc.sphere_tol, err.max(), f"<= {sc.sphere_tol:g}")
    res.check("sphere_lambda0", abs(Ss.lam[0]) <= 1e-8, abs(Ss.lam[0]), "<= 1e-8")
    res.metrics.update(sphere_min_overlap=float(overlap.min()), sphere_symmetry=As.symmetry_defect())
    res.tables["spectrum_sphere.csv"] = (
        ["l", "gamma_l", "lambda_l", "oracle_value", "abs_error"],
        [[l, Ss.gamma[i], Ss.lam[i], o, e] for l, (i, o, e) in enumerate(zip(idx, fh, err))],
    )
    return res


# -- compact decay and comparison ---------------------------------------------------

def _generic_u0(m: RadialManifold):
    if m.kind is Kind.CIRCLE:
        return lambda x: np.exp(np.cos(x)) + 0.3 * np.sin(3 * x)
    return lambda r: np.exp(np.cos(r)) + 0.3 * np.cos(3 * r)


@_timed
def run_compact_decay(cfg: Config) -> ExperimentResult:
    """L^2 bound, fitted rate and L^infinity decay towards the mean."""
    dc = cfg.decay
    res = ExperimentResult("decay-compact")
    m = RadialManifold(dc.manifold, 1 if dc.manifold == "circle" else 2)
    k = normalize_mass(replace(_base_kernel(cfg), delta=dc.delta), m)
    n = dc.n
    grid = circle_grid(n) if m.kind is Kind.CIRCLE else sphere_grid(m, n)
    A = assemble(m, k, grid)
    S = eigendecompose(A)
    u0 = grid.with_values(_generic_u0(m)(grid.nodes))

    rb = decay_report(A, S, u0, dc.t_bound)
    slack = float(np.max(rb.l2 - rb.bound))
    res.check("l2_bound", slack <= dc.bound_slack, slack, f"l2 - bound <= {dc.bound_slack:g}")
    rf = decay_report(A, S, u0, dc.t_fit, fit_from=min(dc.t_fit))
    rel = abs(rf.fitted_rate - rf.lambda1) / rf.lambda1
    res.check("fitted_rate", rel <= dc.rate_tol, rel, f"|rate/lambda1 - 1| <= {dc.rate_tol:g}")
    rl = decay_report(A, S, u0, dc.t_linf)
    C = rl.linf[0] * np.exp(rl.lambda1 * rl.t[0])
    worst = float(np.max(rl.linf / (C * np.exp(-rl.lambda1 * rl.t))))
    res.check("linf_decay", worst <= 1 + 1e-12, worst, "linf <= C e^{-lambda1 t}, C fit at first t")
    rc = decay_report(A, S, grid.with_values(np.full(n, 2.5)), dc.t_bound)
    const_d = max(rc.l2.max(), rc.linf.max())
    # constants move only through the row-sum defect (lambda0 ~ 1e-12)
    res.check("constant_data", const_d <= 1e-9, const_d, "<= 1e-9")
    res.metrics.update(lambda1=rf.lambda1, fitted_rate=rf.fitted_rate, linf_constant=float(C))

    t_all = sorted(set(dc.t_bound) | set(dc.t_fit) | set(dc.t_linf) | {0.0})
    rows = []
    for t in t_all:
        u = evolve(A, u0, t, spectral=S)
        mean = functional(u, "mean")
        d = u.with_values(u.values - functional(u0, "mean"))
        rows.append([t, functional(u, "mass"), mean, functional(d, "l2"), functional(d, "linf"),
                     np.exp(-rf.lambda1 * t) * functional(u0, "l2")])
    res.tables["decay.csv"] = (["t", "mass", "mean", "l2_dist_to_mean", "linf_dist_to_mean", "l2_bound"], rows)
    mass = np.array([r[1] for r in rows])
    res.metrics["mass_drift"] = float(np.max(np.abs(mass - mass[0])) / abs(mass[0]))
    return res


@_timed
def run_comparison(cfg: Config) -> ExperimentResult:
    """Order preservation for seeded random ordered pairs, including scaled operators."""
    dc = cfg.decay
    res = ExperimentResult("comparison")
    m = RadialManifold(Kind.CIRCLE)
    k = normalize_mass(replace(_base_kernel(cfg), delta=dc.delta), m)
    n = dc.pair_n
    grid = circle_grid(n)
    A = assemble(m, k, grid)
    S = eigendecompose(A)
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(dc.pairs):
        u = rng.normal(size=n)
        gap = rng.exponential(size=n) * (rng.random(n) < 0.5)
        worst = max(worst, check_order_preservation(A, grid.with_values(u), grid.with_values(u + gap),
                                                    dc.t_pairs, spectral=S, c0_list=dc.c0_list))
    res.check("random_pairs", worst <= dc.order_tol, worst, f"<= {dc.order_tol:g}")
    u = grid.with_values(rng.normal(size=n))
    same = check_order_preservation(A, u, u, dc.t_pairs, spectral=S, c0_list=dc.c0_list)
    res.check("equal_data", same == 0.0, same, "== 0")
    shift = 0.0
    for t in dc.t_pairs:
        a = evolve(A, u.with_values(u.values - 1), t, spectral=S).values
        b = evolve(A, u, t, spectral=S).values
        shift = max(shift, float(np.max(np.abs(a - (b - 1)))))
    res.check("affine_shift", shift <= 1e-10, shift, "<= 1e-10")
    res.metrics.update(pairs=dc.pairs, max_violation=worst)
    return res


# -- hyperbolic space ----------------------------------------------------------

def _constants() -> dict:
    out = {}
    for N in (2, 3):
        out[f"kappa_{N}"] = hf.inversion_constant(N)
        out[f"c_{N}"] = hf.kernel_constant(N)
    return out


@_timed
def run_transform(cfg: Config) -> ExperimentResult:
    """Round trip, Laplacian multiplier, convolution theorem, Plancherel, k_lambda and drift."""
    tc = cfg.transform
    res = ExperimentResult("transform")
    lams = hf.lambda_grid(tc.lambda_max, tc.dlambda)
    panel = tc.panel
    rows = []
    for N in tc.dims:
        m = RadialManifold(Kind.HYPERBOLIC, N)
        g = panel_grid(m, tc.r_max, panel, tc.panel_order, _gauss(tc.bump_width))
        T = hf.forward_transform(g, lams)
        scale = np.max(np.abs(g.values))
        back = hf.inverse_transform(T, g.nodes, check=True)
        rt = float(np.max(np.abs(back - g.values)) / scale)
        res.check(f"N{N}_roundtrip", rt <= tc.roundtrip_tol, rt, f"<= {tc.roundtrip_tol:g}")

        lap_f = hf.inverse_transform(T.multiply(lambda l: -(l**2 + (N - 1) ** 2 / 4)), g.nodes)
        lap_d = laplace_beltrami_radial(m, g).values
        inner = g.nodes < tc.r_max - 1.0
        lerr = float(np.max(np.abs(lap_f - lap_d)[inner]) / np.max(np.abs(lap_d)))
        res.check(f"N{N}_laplace_multiplier", lerr <= tc.laplace_tol, lerr, f"<= {tc.laplace_tol:g}")

        k = normalize_mass(_base_kernel(cfg), m)
        A = assemble(m, k, g)
        Ju = g.with_values(A.apply(g.values))
        TJ = hf.forward_transform(Ju, lams)
        jh = hf.jhat(k, N, lams)
        cerr = float(np.max(np.abs(TJ.uhat - jh * T.uhat)) / np.max(np.abs(T.uhat)))
        res.check(f"N{N}_convolution", cerr <= tc.convolution_tol, cerr, f"<= {tc.convolution_tol:g}")
        conv_back = hf.inverse_transform(T.multiply(lambda l, k=k, N=N: hf.jhat(k, N, l)), g.nodes)
        cb = float(np.max(np.abs(conv_back - Ju.values)) / np.max(np.abs(Ju.values)))
        res.check(f"N{N}_convolution_inverse", cb <= 1e-3, cb, "<= 1e-3")

        lhs, rhs = hf.plancherel_norms(g, T)
        perr = abs(lhs - rhs) / lhs
        res.check(f"N{N}_plancherel", perr <= tc.plancherel_tol, perr, f"<= {tc.plancherel_tol:g}")
        res.check(f"N{N}_even", np.array_equal(T.uhat, T.uhat[::-1]), 0.0, "uhat(-lam) == uhat(lam)")
        res.check(f"N{N}_bounded_by_zero_mode", np.all(np.abs(T.uhat) <= T.uhat[lams.size // 2] * (1 + 1e-12)),
                  float(np.max(np.abs(T.uhat)) / T.uhat[lams.size // 2]), "|uhat| <= uhat(0)")
        ks = normalize_spectral(_base_kernel(cfg), m)
        a = hf.jhat(ks, N, 0.0)
        res.check(f"N{N}_spectral_a", abs(a - 1) <= 1e-8, abs(a - 1), "<= 1e-8")
        half = lams >= 0
        rows += [[N, l, u, c] for l, u, c in zip(lams[half], T.uhat[half], T.plancherel_weight[half])]

    # kernel formulas on the lam x rho grid
    grid = [(lam, rho) for lam in (0.5, 1.0, 2.0) for rho in (0.5, 1.0, 2.0)]
    odd = max(abs(hf.k_lambda(3, l, r, "closed_odd") / hf.k_lambda(3, l, r) - 1) for l, r in grid)
    even = max(abs(hf.k_lambda(2, l, r, "abel_even") / hf.k_lambda(2, l, r) - 1) for l, r in grid)
    res.check("k_lambda_odd", odd <= tc.k_odd_tol, odd, f"<= {tc.k_odd_tol:g}")
    res.check("k_lambda_even", even <= tc.k_even_tol, even, f"<= {tc.k_even_tol:g}")
    k_rows = [[N, l, r, hf.k_lambda(N, l, r), hf.k_lambda(N, l, r, "closed_odd" if N == 3 else "abel_even")]
              for N in (2, 3) for l, r in grid]
    res.tables["k_lambda.csv"] = (["N", "lambda", "rho", "direct", "formula"], k_rows)

    # drift velocity
    for N, r in ((3, 20.0), (2, 30.0)):
        dv = abs(r * hf.drift_velocity(N, r) - 2)
        res.check(f"drift_N{N}", dv <= tc.drift_tol, dv, f"|r V(r) - 2| <= {tc.drift_tol:g} at r={r:g}")
    res.tables["transform.csv"] = (["N", "lambda", "uhat", "c_inv_sq"], rows)
    res.metrics.update(_constants())
    return res


def _bound_check(res, name, lhs, rhs, slack, calib_index=0, note=""):
    """Calibrate C = lhs/rhs at one point and report max(lhs / (C rhs))."""
    lhs = np.abs(np.ravel(lhs))
    rhs = np.ravel(rhs)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = lhs / rhs
        C = ratio[calib_index]
        worst = float(np.max(ratio / C)) if np.isfinite(C) and C > 0 else float("inf")
    finite = np.isfinite(ratio)
    sup_over_first = float(np.max(ratio[finite]) / C) if finite.any() and np.isfinite(C) and C > 0 else float("inf")
    res.check(name, worst <= 1 + slack, worst, "max(lhs/(C rhs)) <= 1 with C from the first point", note)
    res.metrics[f"{name}_C"] = float(C) if np.isfinite(C) else None
    res.metrics[f"{name}_sup_ratio_over_first"] = sup_over_first
    res.metrics[f"{name}_ratio_bounded"] = bool(finite.all())


def _lin(spec):
    a, b, n = spec
    return np.linspace(a, b, int(n))


@_timed
def run_bounds(cfg: Config) -> ExperimentResult:
    """Bound suite: decay of Phi, derivative towers, Abel integrals and heat-kernel estimates.

    Each bound lhs <= C rhs gets a single C from the first grid point; the
    check fails if any other grid point exceeds it.
    """
    bc = cfg.bounds
    res = ExperimentResult("bounds")
    r = _lin(bc.r_grid)
    lam = _lin(bc.lam_grid)
    rho = _lin(bc.rho_grid)
    for N in (2, 3):
        phi0 = hf.phi_lambda(N, 0.0, r)
        phis = hf.phi_matrix(N, lam, r)
        dom = float(np.max(np.abs(phis) - phi0[None, :]))
        res.check(f"phi_dominated_N{N}", dom <= 1e-12, dom, "|Phi_lam| - Phi_0 <= 0")
        _bound_check(res, f"phi0_decay_N{N}", phi0, np.exp(-(N - 1) / 2 * r) * (1 + r), bc.rel_slack)

    L, R = np.meshgrid(lam, rho, indexing="ij")
    for N in (3, 5):
        mm = (N - 1) // 2
        lhs = hf.tower_cos(mm, L, R)
        poly = sum(L**n for n in range(2, mm + 1)) if mm >= 2 else np.zeros_like(L)
        rhs = R / np.sinh(R) ** mm * poly
        # the lam-grid need not contain 1; calibrate at (1, 1) explicitly
        lhs_c = np.concatenate([[hf.tower_cos(mm, 1.0, 1.0)], lhs.ravel()])
        rhs_c = np.concatenate([[1.0 / np.sinh(1.0) ** mm * (1.0 if mm >= 2 else 0.0) * (mm - 1)], rhs.ravel()])
        _bound_check(res, f"bound1_N{N}", lhs_c, rhs_c, bc.rel_slack,
                     note="m = 1 leaves an empty sum on the right" if mm == 1 else "calibrated at (lam, rho) = (1, 1)")

    for N in (2, 4):
        span = 84.0 / (N - 1) + 20.0
        maj = lambda s, N=N: np.minimum(1.0, np.sinh(s) ** (-N / 2))
        I1 = np.array([hf.abel_integral(lambda s: np.sinh(s) * maj(s), q, span) for q in rho])
        _bound_check(res, f"lemma_integral_N{N}", I1, np.sinh(rho) ** (-(N - 1) / 2), bc.rel_slack)
        I2 = np.array([hf.abel_integral(lambda s: np.sinh(s) * s * maj(s), q, span) for q in rho])
        _bound_check(res, f"lemma_integral_s_N{N}", I2, rho * np.sinh(rho) ** (-(N - 1) / 2), bc.rel_slack)
    kl = np.array([hf.k_lambda(2, 1.0, q) for q in rho])
    _bound_check(res, "k_lambda_N2_decay", kl, np.sinh(rho) ** -0.5, bc.rel_slack)

    t = np.geomspace(bc.t_grid[0], bc.t_grid[1], int(bc.t_grid[2]))
    near = np.linspace(0.05, 1.0, 20)
    for N in (2, 3):
        Kf = np.array([hf.heat_kernel_K0(N, bc.heat_b, rho, ti) for ti in t])
        Tt, Rr = np.meshgrid(t, rho, indexing="ij")
        _bound_check(res, f"estimates1_N{N}", Kf, Tt**-1.5 * Rr / np.sinh(Rr) ** ((N - 1) / 2), bc.rel_slack)
        Kn = np.array([hf.heat_kernel_K0(N, bc.heat_b, near, ti) for ti in t])
        _bound_check(res, f"estimates2_N{N}", Kn, np.broadcast_to(t[:, None] ** -1.5, Kn.shape), bc.rel_slack)
    return res


@_timed
def run_heat_decay(cfg: Config) -> ExperimentResult:
    """Log-log slopes of sup_rho |K0(rho, t)| at large and small t."""
    hc = cfg.heat
    res = ExperimentResult("heat-decay")
    rho = np.linspace(0.0, hc.rho_max, cfg.scaled(hc.rho_points, 11))
    npts = max(3, cfg.scaled(hc.t_points, 3))
    rows = []
    for N in hc.dims:
        for label, (t0, t1), target, tol in (
            ("large", hc.t_large, hc.slope_large, hc.slope_large_tol),
            ("small", hc.t_small, -N / 2, hc.slope_small_tol),
        ):
            t = np.geomspace(t0, t1, npts)
            sup = np.array([np.max(np.abs(hf.heat_kernel_K0(N, hc.b, rho, ti))) for ti in t])
            s = loglog_slope(t, sup)
            res.check(f"N{N}_{label}_slope", abs(s - target) <= tol, s, f"{target:g} +- {tol:g}")
            res.metrics[f"N{N}_{label}_slope"] = s
            rows += [[N, ti, si] for ti, si in zip(t, sup)]
    res.metrics["b"] = hc.b
    res.tables["heat.csv"] = (["N", "t", "sup_K0"], rows)
    return res


@_timed
def run_main_theorem(cfg: Config) -> ExperimentResult:
    """g(t) = e^{(1-a)t} t^{3/2} sup|u - v| for a radial bump on H^N, mass-normalized J."""
    mc = cfg.main_theorem
    res = ExperimentResult("main-theorem")
    N = mc.dim
    m = RadialManifold(Kind.HYPERBOLIC, N)
    k = normalize_mass(replace(_base_kernel(cfg), delta=mc.delta), m)
    ex = hf.jhat_expansion(k, N)
    a, b = ex.a, ex.b
    panel = mc.panel / cfg.grid_scale
    g0 = panel_grid(m, 10.0 * mc.bump_width, 0.25, 10, _gauss(mc.bump_width))
    T0 = hf.forward_transform(g0, hf.lambda_grid(mc.lambda_max, mc.dlambda))
    rho = np.linspace(0.0, mc.rho_max, cfg.scaled(mc.rho_points, 21))
    jh = lambda lam: hf.jhat(k, N, lam)
    rows, gs = [], []
    for t in mc.t_list:
        diff = hf.inverse_transform(
            T0.multiply(lambda lam, t=t: np.exp((jh(lam) - a) * t) - np.exp(-b * lam**2 * t)), rho, check=True)
        v_w = hf.inverse_transform(T0.multiply(lambda lam, t=t: np.exp(-b * lam**2 * t)), rho)
        g = t**1.5 * np.max(np.abs(diff))
        gs.append(g)
        rows.append([t, np.exp(-(1 - a) * t) * np.max(np.abs(diff)), g, t**1.5 * np.max(np.abs(v_w))])
    gs = np.array(gs)
    res.check("g_decreasing", np.all(np.diff(gs) < 0), float(np.max(np.diff(gs))), "< 0")
    ratio = gs[-1] / gs[0]
    res.check("g_ratio", ratio < mc.ratio, ratio, f"< {mc.ratio:g} (artifact-defined trend threshold)")

    # cross-check the Fourier path against direct evolution
    gq = panel_grid(m, mc.cross_r_max, panel, mc.panel_order, _gauss(mc.bump_width))
    A = assemble(m, k, gq)
    u_direct = evolve(A, gq, mc.cross_t, "rk4").values
    u_fourier = hf.inverse_transform(T0.multiply(lambda lam: np.exp((jh(lam) - 1) * mc.cross_t)), gq.nodes)
    cross = float(np.max(np.abs(u_direct - u_fourier)))
    res.check("fourier_vs_direct", cross <= mc.cross_tol, cross, f"<= {mc.cross_tol:g} at t={mc.cross_t:g}")
    res.metrics.update(a=a, b=b, g=gs.tolist(), ratio=float(ratio), **_constants())
    res.tables["main_theorem.csv"] = (["t", "sup_u_minus_v", "g", "t32_sup_v_weighted"], rows)
    return res


@_timed
def run_conservation(cfg: Config) -> ExperimentResult:
    """Conservation of int u Phi_0 under a = 1, and its e^{(a-1)t} law otherwise."""
    cc = cfg.conservation
    res = ExperimentResult("conservation")
    N = cc.dim
    m = RadialManifold(Kind.HYPERBOLIC, N)
    panel = cc.panel / cfg.grid_scale
    u0f = _gauss(cc.bump_width)
    ks = normalize_spectral(_base_kernel(cfg), m)
    g0 = panel_grid(m, 10.0 * cc.bump_width, 0.25, 10, u0f)
    T0 = hf.forward_transform(g0)
    a_s = hf.jhat(ks, N, 0.0)
    zero = T0.lambda_nodes.size // 2
    t = np.asarray(cc.t_list, dtype=float)
    four = np.array([T0.uhat[zero] * np.exp((a_s - 1) * ti) for ti in t])
    drift_f = float(np.max(np.abs(four - four[0])) / abs(four[0]))
    res.check("fourier_path", drift_f <= cc.fourier_tol, drift_f, f"<= {cc.fourier_tol:g}")

    grid = panel_grid(m, cc.r_max, panel, cc.panel_order, u0f)
    rows = []
    quad = {}
    for name, k in (("spectral", ks), ("mass", normalize_mass(_base_kernel(cfg), m))):
        A = assemble(m, k, grid)
        vals, u, prev = [], grid, 0.0
        for ti in t:
            u = evolve(A, u, ti - prev, "rk4", dt=cc.dt)
            prev = ti
            vals.append(functional(u, "phi0_weighted"))
        quad[name] = np.array(vals)
        from .hfourier import exterior_residual

        res.metrics[f"{name}_exterior_residual"] = exterior_residual(u)
    drift_q = float(np.max(np.abs(quad["spectral"] - quad["spectral"][0])) / abs(quad["spectral"][0]))
    res.check("quadrature_path", drift_q <= cc.quad_tol, drift_q, f"<= {cc.quad_tol:g}")
    a_m = spectral_coefficient(normalize_mass(_base_kernel(cfg), m), m)
    expected = np.exp((a_m - 1) * t)
    got = quad["mass"] / quad["mass"][0]
    merr = float(np.max(np.abs(got - expected)))
    res.check("mass_normalized_law", merr <= cc.mass_tol, merr, f"<= {cc.mass_tol:g}")
    rows = [[ti, f, q, gm, e] for ti, f, q, gm, e in zip(t, four, quad["spectral"], got, expected)]
    res.tables["conservation.csv"] = (
        ["t", "fourier_phi0_weighted", "quadrature_phi0_weighted", "mass_kernel_ratio", "expected_ratio"], rows)
    res.metrics.update(a_spectral=a_s, a_mass=a_m, drift_fourier=drift_f, drift_quadrature=drift_q)
    return res


EXPERIMENTS = {
    "limit": [run_limit],
    "spectrum": [run_spectrum],
    "decay-compact": [run_compact_decay, run_comparison],
    "heat-decay": [run_heat_decay],
    "main-theorem": [run_main_theorem],
    "conservation": [run_conservation],
    "transform": [run_transform, run_bounds],
}
