"""Classification losses on probability vectors, with analytic gradients.

Every loss is a function of the raw entries of a softmax output ``p`` and an
integer target ``y``.  Gradients are returned with respect to those raw
entries (the simplex coupling between entries belongs to the softmax
backward pass) and, for the fractional family, with respect to the
differentiation order ``mu``.

The fractional cross-entropy is the order-``mu`` derivative of the plain
cross-entropy taken with respect to the negative log-likelihood
``u = -log p_y``:

    fce(p, y; mu) = u**(1 - mu) / gamma(2 - mu),    mu in [0, 1]

At ``mu = 0`` this is exactly the cross-entropy; at ``mu = 1`` it collapses
to the constant 1.  Adding the mean absolute error as a passive term gives
``fcl = fce + mae``, which interpolates between a fast-converging CE-like
shape and a noise-robust MAE-like shape as ``mu`` sweeps from 0 to 1.
The value of ``mu`` can therefore trade convergence speed against label
noise robustness, and its gradient (``grad_mu``) makes it learnable.
"""

from dataclasses import dataclass, field

import numpy as np

from . import specialfn

PROB_EPS = 1e-7

LOSS_KINDS = ("ce", "mae", "gce", "rce", "nce", "sce", "apl", "fce", "fcl")

_MU_PARAMETRIC = ("fce", "fcl")


@dataclass
class LossEval:
    """Per-sample loss value with gradients w.r.t. p and w.r.t. mu."""

    value: float
    grad_p: np.ndarray
    grad_mu: float = 0.0


@dataclass
class LossSpec:
    """Declarative loss selector: a kind from LOSS_KINDS plus named params.

    Recognised params: ``q`` (gce), ``log_zero`` (rce, sce), ``alpha`` and
    ``beta`` (sce, apl), ``mu0`` (fce, fcl), ``active`` and ``passive``
    (apl component specs, given as nested dicts with their own ``kind``).
    """

    kind: str = "ce"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.kind = str(self.kind).lower()

    def validate(self):
        if self.kind not in LOSS_KINDS:
            raise ValueError(f"unknown loss kind {self.kind!r}; expected one of {LOSS_KINDS}")
        if self.kind == "gce":
            q = float(self.params.get("q", 0.7))
            if not 0.0 < q <= 1.0:
                raise ValueError(f"gce: q must lie in (0, 1], got {q}")
        if self.kind in ("rce", "sce"):
            a = float(self.params.get("log_zero", -6.0))
            if a >= 0.0:
                raise ValueError(f"{self.kind}: log_zero must be negative, got {a}")
        if self.kind in _MU_PARAMETRIC:
            mu0 = float(self.params.get("mu0", 0.5))
            if not 0.0 <= mu0 <= 1.0:
                raise ValueError(f"{self.kind}: mu0 must lie in [0, 1], got {mu0}")
        if self.kind == "apl":
            for role in ("active", "passive"):
                sub = self.params.get(role)
                if sub is None:
                    raise ValueError(f"apl: missing {role!r} component spec")
                _as_spec(sub).validate()
        return self

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for key, val in self.params.items():
            out[key] = _as_spec(val).to_dict() if key in ("active", "passive") else val
        return out


def _as_spec(obj) -> LossSpec:
    if isinstance(obj, LossSpec):
        return obj
    if isinstance(obj, str):
        return LossSpec(kind=obj)
    if isinstance(obj, dict):
        raw = dict(obj)
        return LossSpec(kind=raw.pop("kind", "ce"), params=raw)
    raise ValueError(f"cannot interpret {obj!r} as a loss spec")


def is_mu_parametric(spec) -> bool:
    """True when the loss depends on the fractional order mu."""
    spec = _as_spec(spec)
    if spec.kind in _MU_PARAMETRIC:
        return True
    if spec.kind == "apl":
        return any(
            is_mu_parametric(spec.params[role]) for role in ("active", "passive")
        )
    return False


def clamp_probs(p: np.ndarray) -> np.ndarray:
    """Clip probabilities into [PROB_EPS, 1 - PROB_EPS] before any logarithm."""
    return np.clip(p, PROB_EPS, 1.0 - PROB_EPS)


def _as_batch(p, y):
    P = np.atleast_2d(np.asarray(p, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.intp))
    if P.ndim != 2:
        raise ValueError(f"probability input must be 1- or 2-dimensional, got shape {P.shape}")
    if y.shape[0] != P.shape[0]:
        raise ValueError(f"{P.shape[0]} probability rows but {y.shape[0]} labels")
    if np.any(y < 0) or np.any(y >= P.shape[1]):
        raise ValueError("target label out of range for the class count")
    return P, y


def _check_mu(mu) -> float:
    mu = float(mu)
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must lie in [0, 1], got {mu}")
    return mu


# --- vectorized kernels (inputs already clamped) -------------------------

def _ce_kernel(P, y):
    rows = np.arange(len(y))
    py = P[rows, y]
    values = -np.log(py)
    grad = np.zeros_like(P)
    grad[rows, y] = -1.0 / py
    return values, grad


def _mae_kernel(P, y):
    rows = np.arange(len(y))
    diff = P.copy()
    diff[rows, y] -= 1.0
    values = np.abs(diff).sum(axis=1)
    grad = np.sign(diff)
    return values, grad


def _gce_kernel(P, y, q):
    rows = np.arange(len(y))
    py = P[rows, y]
    values = (1.0 - py**q) / q
    grad = np.zeros_like(P)
    grad[rows, y] = -(py ** (q - 1.0))
    return values, grad


def _rce_kernel(P, y, log_zero):
    rows = np.arange(len(y))
    off_target = P.sum(axis=1) - P[rows, y]
    values = -log_zero * off_target
    grad = np.full_like(P, -log_zero)
    grad[rows, y] = 0.0
    return values, grad


def _nce_kernel(P, y):
    rows = np.arange(len(y))
    U = -np.log(P)
    denom = U.sum(axis=1)
    uy = U[rows, y]
    values = uy / denom
    # quotient rule through each raw entry: d(-log p_j)/dp_j = -1/p_j
    grad = uy[:, None] / (P * (denom**2)[:, None])
    grad[rows, y] = -(denom - uy) / (P[rows, y] * denom**2)
    return values, grad


def _fce_kernel(P, y, mu):
    rows = np.arange(len(y))
    py = P[rows, y]
    u = -np.log(py)
    log_u = np.log(u)
    g = specialfn.gamma(2.0 - mu)
    # exp-form so u**(1-mu) * (psi - log u) underflows cleanly as u -> 0
    values = np.exp((1.0 - mu) * log_u) / g
    grad = np.zeros_like(P)
    grad[rows, y] = -(1.0 - mu) * np.exp(-mu * log_u) / (g * py)
    grad_mu = values * (specialfn.digamma(2.0 - mu) - log_u)
    return values, grad, grad_mu


def _fcl_kernel(P, y, mu):
    fce_v, fce_g, grad_mu = _fce_kernel(P, y, mu)
    mae_v, mae_g = _mae_kernel(P, y)
    return fce_v + mae_v, fce_g + mae_g, grad_mu


# --- public per-sample losses ---------------------------------------------

def _single(values, grad, grad_mu=None) -> LossEval:
    gm = 0.0 if grad_mu is None else float(grad_mu[0])
    return LossEval(float(values[0]), grad[0], gm)


def ce(p, y) -> LossEval:
    """Cross-entropy -log p_y."""
    P, y = _as_batch(p, y)
    return _single(*_ce_kernel(clamp_probs(P), y))


def mae(p, y) -> LossEval:
    """Mean absolute error sum_k |p_k - onehot_k|, equal to 2(1 - p_y)."""
    P, y = _as_batch(p, y)
    return _single(*_mae_kernel(clamp_probs(P), y))


def gce(p, y, q: float = 0.7) -> LossEval:
    """Generalized cross-entropy (1 - p_y**q) / q, the Box-Cox bridge from CE
    (q -> 0) to an MAE-like loss (q = 1)."""
    q = float(q)
    if not 0.0 < q <= 1.0:
        raise ValueError(f"gce: q must lie in (0, 1], got {q}")
    P, y = _as_batch(p, y)
    return _single(*_gce_kernel(clamp_probs(P), y, q))


def rce(p, y, log_zero: float = -6.0) -> LossEval:
    """Reverse cross-entropy with log 0 replaced by the constant ``log_zero``.

    Equals -log_zero * (1 - p_y), a scaled mean absolute error.
    """
    log_zero = float(log_zero)
    if log_zero >= 0.0:
        raise ValueError(f"rce: log_zero must be negative, got {log_zero}")
    P, y = _as_batch(p, y)
    return _single(*_rce_kernel(clamp_probs(P), y, log_zero))


def nce(p, y) -> LossEval:
    """Normalized cross-entropy (-log p_y) / (-sum_k log p_k), in [0, 1]."""
    P, y = _as_batch(p, y)
    return _single(*_nce_kernel(clamp_probs(P), y))


def fce(p, y, mu: float) -> LossEval:
    """Fractional cross-entropy u**(1-mu) / gamma(2-mu) with u = -log p_y."""
    mu = _check_mu(mu)
    P, y = _as_batch(p, y)
    return _single(*_fce_kernel(clamp_probs(P), y, mu))


def fcl(p, y, mu: float) -> LossEval:
    """Fractional classification loss: fce(p, y, mu) + mae(p, y)."""
    mu = _check_mu(mu)
    P, y = _as_batch(p, y)
    return _single(*_fcl_kernel(clamp_probs(P), y, mu))


def apl_combine(active, passive, alpha, beta, p, y, mu=None) -> LossEval:
    """Weighted active-passive combination alpha * active + beta * passive.

    ``active`` and ``passive`` are loss specs (LossSpec, kind string, or
    dict); gradients combine linearly.
    """
    spec = LossSpec(
        "apl",
        {"active": _as_spec(active), "passive": _as_spec(passive),
         "alpha": float(alpha), "beta": float(beta)},
    )
    values, grad, grad_mu = batch_eval(spec, p, y, mu=mu)
    return _single(values, grad, grad_mu)


def beta_equivalent(mu, p_true, log_zero: float = -6.0) -> float:
    """Passive-term coefficient matching the fractional order against the
    scaled-CE form of the symmetric loss.

    Returns 2 * gamma(2 - mu) * u**mu / log_zero with u = -log p_true, which
    is negative for negative ``log_zero``; callers wanting the conventional
    positive weighting should flip the sign themselves.
    """
    mu = _check_mu(mu)
    log_zero = float(log_zero)
    if log_zero >= 0.0:
        raise ValueError(f"beta_equivalent: log_zero must be negative, got {log_zero}")
    p_true = float(p_true)
    if not 0.0 < p_true < 1.0:
        raise ValueError(f"beta_equivalent: p_true must lie in (0, 1), got {p_true}")
    u = -np.log(clamp_probs(np.asarray([p_true]))[0])
    return float(2.0 * specialfn.gamma(2.0 - mu) * u**mu / log_zero)


# --- batched dispatch ------------------------------------------------------

def batch_eval(spec, P, y, mu=None):
    """Evaluate a loss spec over a batch.

    Returns ``(values, grad_p, grad_mu)`` with shapes (n,), (n, k) and (n,);
    ``grad_mu`` is None for losses that do not depend on mu.  For fce/fcl the
    explicit ``mu`` argument overrides the spec's ``mu0``.
    """
    spec = _as_spec(spec).validate()
    P, y = _as_batch(P, y)
    return _eval_clamped(spec, clamp_probs(P), y, mu)


def _eval_clamped(spec, Pc, y, mu):
    kind = spec.kind
    if kind == "ce":
        return (*_ce_kernel(Pc, y), None)
    if kind == "mae":
        return (*_mae_kernel(Pc, y), None)
    if kind == "gce":
        return (*_gce_kernel(Pc, y, float(spec.params.get("q", 0.7))), None)
    if kind == "rce":
        return (*_rce_kernel(Pc, y, float(spec.params.get("log_zero", -6.0))), None)
    if kind == "nce":
        return (*_nce_kernel(Pc, y), None)
    if kind in ("fce", "fcl"):
        m = _check_mu(spec.params.get("mu0", 0.5) if mu is None else mu)
        kernel = _fce_kernel if kind == "fce" else _fcl_kernel
        return kernel(Pc, y, m)
    if kind == "sce":
        expanded = LossSpec(
            "apl",
            {
                "active": LossSpec("ce"),
                "passive": LossSpec("rce", {"log_zero": spec.params.get("log_zero", -6.0)}),
                "alpha": spec.params.get("alpha", 1.0),
                "beta": spec.params.get("beta", 1.0),
            },
        )
        return _eval_clamped(expanded, Pc, y, mu)
    if kind == "apl":
        alpha = float(spec.params.get("alpha", 1.0))
        beta = float(spec.params.get("beta", 1.0))
        av, ag, agm = _eval_clamped(_as_spec(spec.params["active"]).validate(), Pc, y, mu)
        pv, pg, pgm = _eval_clamped(_as_spec(spec.params["passive"]).validate(), Pc, y, mu)
        grad_mu = None
        if agm is not None or pgm is not None:
            zeros = np.zeros(len(y))
            grad_mu = alpha * (agm if agm is not None else zeros) + beta * (
                pgm if pgm is not None else zeros
            )
        return alpha * av + beta * pv, alpha * ag + beta * pg, grad_mu
    raise ValueError(f"unknown loss kind {kind!r}")
