"""Named invariant checks shared by the command-line verifier and the
acceptance suite: loss degeneracies at the ends of the mu range, analytic
gradients against central finite differences, the reverse-CE/MAE scaling
identity, the beta-linkage round trip, and the gamma/digamma contracts.

Each check accepts ``fault=True``, which swaps in a deliberately wrong
reference so the verifier can prove it would catch a sign error.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import losses, specialfn

FD_H = 1e-6

P_GRID = (0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99)
MU_GRID_P = (0.0, 0.25, 0.5, 0.75, 0.95)
MU_GRID_MU = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_err: float
    tol: float
    seconds: float = 0.0


def _rel_err(a, b, zero_tol=1e-7):
    # components where both sides vanish (zero gradient vs FD round-off noise)
    # count as exact agreement; relative error is meaningless there
    a = float(a)
    b = float(b)
    scale = max(abs(a), abs(b))
    if scale <= zero_tol:
        return 0.0
    return abs(a - b) / scale


def _vector_with_target(p_y, k=10):
    p = np.full(k, (1.0 - p_y) / (k - 1))
    p[0] = p_y
    return p


def _dirichlet(n, k, seed):
    return np.random.default_rng(seed).dirichlet(np.ones(k), size=n)


def _exact_simplex(n, k, seed, grain=1 << 20):
    """Random probability vectors whose entries are multiples of 2**-20, so
    the float sum is exactly 1 and sums of entry subsets are exact."""
    rng = np.random.default_rng(seed)
    cuts = np.sort(rng.integers(1, grain, size=(n, k - 1)), axis=1)
    counts = np.diff(np.concatenate(
        [np.zeros((n, 1), dtype=np.int64), cuts, np.full((n, 1), grain, dtype=np.int64)], axis=1
    ), axis=1)
    counts = np.maximum(counts, 1)
    counts[:, -1] = grain - counts[:, :-1].sum(axis=1)
    assert (counts >= 1).all()
    return counts.astype(np.float64) / grain


def check_degeneracy_mu0(fault=False) -> CheckResult:
    P = _dirichlet(1000, 10, seed=7)
    y = np.random.default_rng(8).integers(0, 10, size=len(P))
    fcl_v, _, _ = losses.batch_eval(losses.LossSpec("fcl", {"mu0": 0.0}), P, y)
    ce_v, _, _ = losses.batch_eval(losses.LossSpec("ce"), P, y)
    mae_v, _, _ = losses.batch_eval(losses.LossSpec("mae"), P, y)
    ref = ce_v - mae_v if fault else ce_v + mae_v
    err = float(np.max(np.abs(fcl_v - ref)))
    return CheckResult("degeneracy_mu0", err <= 1e-12, err, 1e-12)


def check_degeneracy_mu1(fault=False) -> CheckResult:
    P = _dirichlet(1000, 10, seed=9)
    y = np.random.default_rng(10).integers(0, 10, size=len(P))
    fcl_v, _, _ = losses.batch_eval(losses.LossSpec("fcl", {"mu0": 1.0}), P, y)
    mae_v, _, _ = losses.batch_eval(losses.LossSpec("mae"), P, y)
    ref = mae_v - 1.0 if fault else mae_v + 1.0
    err = float(np.max(np.abs(fcl_v - ref)))
    return CheckResult("degeneracy_mu1", err <= 1e-12, err, 1e-12)


def _fd_grad_p(loss_fn, p, y) -> np.ndarray:
    out = np.empty(len(p))
    for j in range(len(p)):
        hi = p.copy()
        lo = p.copy()
        hi[j] += FD_H
        lo[j] -= FD_H
        out[j] = (loss_fn(hi, y).value - loss_fn(lo, y).value) / (2.0 * FD_H)
    return out


def _max_grad_p_err(loss_fn, mus=None, fault=False) -> float:
    worst = 0.0
    for p_y in P_GRID:
        p = _vector_with_target(p_y)
        for mu in mus or (None,):
            fn = (lambda q, t, m=mu: loss_fn(q, t, m)) if mu is not None else loss_fn
            analytic = fn(p, 0).grad_p
            if fault:
                analytic = -analytic
            fd = _fd_grad_p(fn, p, 0)
            for a, b in zip(analytic, fd):
                worst = max(worst, _rel_err(a, b))
    return worst


def check_grad_p_fce(fault=False) -> CheckResult:
    err = _max_grad_p_err(losses.fce, mus=MU_GRID_P, fault=fault)
    return CheckResult("grad_p_fce", err <= 1e-6, err, 1e-6)


def check_grad_p_fcl(fault=False) -> CheckResult:
    err = _max_grad_p_err(losses.fcl, mus=MU_GRID_P, fault=fault)
    return CheckResult("grad_p_fcl", err <= 1e-6, err, 1e-6)


def check_grad_p_baselines(fault=False) -> CheckResult:
    fns = (
        losses.ce,
        losses.mae,
        lambda p, y: losses.gce(p, y, 0.7),
        lambda p, y: losses.rce(p, y, -6.0),
        losses.nce,
        lambda p, y: losses.apl_combine("ce", {"kind": "rce", "log_zero": -6.0}, 1.0, 1.0, p, y),
    )
    err = max(_max_grad_p_err(fn, fault=fault) for fn in fns)
    return CheckResult("grad_p_baselines", err <= 1e-6, err, 1e-6)


def check_grad_mu_fd(fault=False) -> CheckResult:
    worst = 0.0
    for loss_fn in (losses.fce, losses.fcl):
        for p_y in P_GRID:
            p = _vector_with_target(p_y)
            for mu in MU_GRID_MU:
                analytic = loss_fn(p, 0, mu).grad_mu
                if fault:
                    analytic = -analytic
                fd = (loss_fn(p, 0, mu + FD_H).value - loss_fn(p, 0, mu - FD_H).value) / (2.0 * FD_H)
                worst = max(worst, _rel_err(analytic, fd))
    return CheckResult("grad_mu_fd", worst <= 1e-6, worst, 1e-6)


def check_rce_mae_scaling(fault=False) -> CheckResult:
    P = _exact_simplex(500, 10, seed=11)
    y = np.random.default_rng(12).integers(0, 10, size=len(P))
    log_zero = -6.0
    rce_v, _, _ = losses.batch_eval(losses.LossSpec("rce", {"log_zero": log_zero}), P, y)
    mae_v, _, _ = losses.batch_eval(losses.LossSpec("mae"), P, y)
    scale = -log_zero if fault else -log_zero / 2.0
    err = float(np.max(np.abs(rce_v - scale * mae_v)))
    return CheckResult("rce_mae_scaling", err == 0.0, err, 0.0)


def check_beta_roundtrip(fault=False) -> CheckResult:
    """Substituting the returned coefficient back into the matching relation
    must reproduce the CE-side coefficient exactly (up to the documented sign
    convention of the returned value)."""
    log_zero = -6.0
    worst = 0.0
    for mu in np.linspace(0.0, 1.0, 11):
        for p in (0.01, 0.1, 0.3, 0.5, 0.7, 0.9):
            beta = losses.beta_equivalent(mu, p, log_zero)
            u = -np.log(p)
            lhs = -2.0 / (log_zero * beta)
            rhs = 1.0 / (specialfn.gamma(2.0 - mu) * u**mu)
            target = rhs if fault else -rhs
            worst = max(worst, _rel_err(lhs, target))
    return CheckResult("beta_roundtrip", worst <= 1e-12, worst, 1e-12)


def check_gamma_factorial(fault=False) -> CheckResult:
    worst = 0.0
    fact = 1.0
    for n in range(0, 11):
        if n > 0:
            fact *= n
        ref = fact * (n + 1) if fault else fact
        worst = max(worst, _rel_err(specialfn.gamma(n + 1.0), ref))
    return CheckResult("gamma_factorial", worst <= 1e-11, worst, 1e-11)


def check_digamma_euler(fault=False) -> CheckResult:
    ref = specialfn.EULER_GAMMA if fault else -specialfn.EULER_GAMMA
    err = abs(specialfn.digamma(1.0) - ref)
    return CheckResult("digamma_euler", err <= 1e-10, err, 1e-10)


def check_weierstrass_oracle(fault=False) -> CheckResult:
    worst = 0.0
    for z in (0.7, 1.3, 1.5, 1.9):
        oracle = specialfn.gamma_weierstrass(z, 10**6)
        ref = 1.0 / specialfn.gamma(z) if fault else specialfn.gamma(z)
        worst = max(worst, abs(oracle - ref))
    return CheckResult("weierstrass_oracle", worst <= 1e-5, worst, 1e-5)


def check_gamma_recurrence(fault=False) -> CheckResult:
    worst = 0.0
    for z in np.arange(0.5, 10.01, 0.25):
        lhs = specialfn.gamma(z + 1.0)
        rhs = (z + 1.0 if fault else z) * specialfn.gamma(z)
        worst = max(worst, _rel_err(lhs, rhs))
    return CheckResult("gamma_recurrence", worst <= 1e-11, worst, 1e-11)


def check_digamma_recurrence(fault=False) -> CheckResult:
    worst = 0.0
    for z in np.arange(0.5, 10.01, 0.25):
        rhs = specialfn.digamma(z) + (-1.0 / z if fault else 1.0 / z)
        worst = max(worst, abs(specialfn.digamma(z + 1.0) - rhs))
    return CheckResult("digamma_recurrence", worst <= 1e-9, worst, 1e-9)


def check_grad_attenuation(fault=False) -> CheckResult:
    """|d(fcl)/dp_y| at p_y = 0.01 must strictly decrease as mu rises."""
    p = _vector_with_target(0.01)
    mags = [abs(losses.fcl(p, 0, mu).grad_p[0]) for mu in (0.0, 0.25, 0.5, 0.75, 1.0)]
    if fault:
        mags = mags[::-1]
    worst = max(b - a for a, b in zip(mags, mags[1:]))
    return CheckResult("grad_attenuation", worst < 0.0, worst, 0.0)


ALL_CHECKS = (
    check_degeneracy_mu0,
    check_degeneracy_mu1,
    check_grad_p_fce,
    check_grad_p_fcl,
    check_grad_p_baselines,
    check_grad_mu_fd,
    check_rce_mae_scaling,
    check_beta_roundtrip,
    check_grad_attenuation,
    check_gamma_factorial,
    check_digamma_euler,
    check_weierstrass_oracle,
    check_gamma_recurrence,
    check_digamma_recurrence,
)

CHECK_NAMES = tuple(fn.__name__.removeprefix("check_") for fn in ALL_CHECKS)


def run_checks(names=None, fault=None):
    """Run the selected checks (all by default); ``fault`` names one check
    whose reference is deliberately corrupted, as a self-test."""
    wanted = set(names) if names else set(CHECK_NAMES)
    unknown = wanted - set(CHECK_NAMES)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    if fault is not None and fault not in CHECK_NAMES:
        raise ValueError(f"unknown fault target {fault!r}")
    results = []
    for fn in ALL_CHECKS:
        name = fn.__name__.removeprefix("check_")
        if name not in wanted:
            continue
        start = time.perf_counter()
        result = fn(fault=(name == fault))
        result.seconds = time.perf_counter() - start
        results.append(result)
    return results
