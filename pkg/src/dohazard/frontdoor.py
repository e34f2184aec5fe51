"""Mediator-based ("frontdoor") causal estimators for unmeasured confounding.

The hidden confounder U drives both the exposure X and the hazard, but X
acts on the hazard only through a measured mediator Z. The interventional
incidence then factorizes into the baseline, a confounded constant (the
x' average), a mediator-noise constant, and exp(beta_z * alpha * x); only
the last factor moves with the intervention, so the causal relative risk
is exp(beta_z * alpha * (x - x0)) no matter how strong the confounding.

The same product of coefficients is the natural indirect effect of a
mediation analysis with no direct pathway; ``mediation_indirect_rr`` is
the same computation under that name.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .cox import CoxFit, fit_cox
from .errors import EmptyStratumError, InvalidArgumentError
from .results import CausalEstimate
from .simulate import Dataset
from .stats import empirical_moments, gaussian_exponential_moment, ols_fit, GaussianSpec

RARITY_THRESHOLD = 0.1


@dataclass(frozen=True)
class FrontdoorParams:
    """Estimated pieces of the factorized interventional incidence.

    beta_x is the confounded exposure coefficient from the (x, z) hazard
    fit; it enters the incidence level only, never the relative risk.
    se_alpha and se_beta_z, when present, feed the delta-method standard
    error of the relative risk.
    """

    beta_x: float
    beta_z: float
    alpha: float
    mu_x: float
    sigma_x: float
    sigma_z: float
    se_alpha: float | None = None
    se_beta_z: float | None = None

    def __post_init__(self) -> None:
        for name in ("beta_x", "beta_z", "alpha", "mu_x", "sigma_x", "sigma_z"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"FrontdoorParams.{name} must be finite")
        if self.sigma_x < 0 or self.sigma_z < 0:
            raise InvalidArgumentError("FrontdoorParams sigmas must be >= 0")


def estimate_frontdoor_params(dataset: Dataset, fit: CoxFit | None = None) -> FrontdoorParams:
    """Fit every factor from one cohort: the mediator line z ~ x by least
    squares, the exposure moments empirically, and (beta_x, beta_z) from
    the proportional-hazards fit on (x, z). Any latent column is ignored.
    """
    x = dataset.column("x")
    z = dataset.column("z")
    alpha, _, sigma_z = ols_fit(x, z)
    mu_x, sigma_x = empirical_moments(x)
    if fit is None:
        fit = fit_cox(dataset, ["x", "z"])
    sxx = float(np.sum((x - np.mean(x)) ** 2))
    return FrontdoorParams(
        beta_x=fit.coef("x"),
        beta_z=fit.coef("z"),
        alpha=alpha,
        mu_x=mu_x,
        sigma_x=sigma_x,
        sigma_z=sigma_z,
        se_alpha=sigma_z / math.sqrt(sxx),
        se_beta_z=fit.std_err("z"),
    )


def frontdoor_do_cdf_gaussian(params: FrontdoorParams, h0_t: float, x: float) -> CausalEstimate:
    """Closed-form interventional incidence for Gaussian exposure and
    mediator noise:

        h0_t * exp(beta_x*mu_x) * exp(sigma_x^2*beta_x^2/2 + sigma_z^2*beta_z^2/2)
             * exp(beta_z*alpha*x)

    Flagged when the value exceeds 0.1 (no longer a credible probability).
    """
    if not (math.isfinite(h0_t) and h0_t >= 0):
        raise InvalidArgumentError(f"h0_t must be >= 0, got {h0_t}")
    if not math.isfinite(x):
        raise InvalidArgumentError(f"x must be finite, got {x}")
    value = (
        h0_t
        * math.exp(params.beta_x * params.mu_x)
        * math.exp((params.sigma_x * params.beta_x) ** 2 / 2.0 + (params.sigma_z * params.beta_z) ** 2 / 2.0)
        * math.exp(params.beta_z * params.alpha * x)
    )
    return CausalEstimate(
        value=value,
        std_err=float("nan"),
        method="frontdoor_do_cdf_gaussian",
        rarity_flag=value > RARITY_THRESHOLD,
        diagnostics={"h0_t": h0_t},
    )


def gaussian_moment_factorization(params: FrontdoorParams, h0_t: float, x: float) -> float:
    """The same closed form written as two exponential moments:
    E[exp(beta_x X')] for X' ~ N(mu_x, sigma_x^2) times E[exp(beta_z Z)]
    for Z ~ N(alpha*x, sigma_z^2), times the baseline."""
    m_x = gaussian_exponential_moment(params.beta_x, GaussianSpec(params.mu_x, params.sigma_x))
    m_z = gaussian_exponential_moment(params.beta_z, GaussianSpec(params.alpha * x, params.sigma_z))
    return h0_t * m_x * m_z


def _quantile_edges(values: np.ndarray, bins: int) -> np.ndarray:
    return np.quantile(values, np.linspace(0.0, 1.0, bins + 1))


def _bin_of(edges: np.ndarray, value: float) -> int:
    idx = int(np.searchsorted(edges, value, side="right")) - 1
    return min(max(idx, 0), len(edges) - 2)


def frontdoor_do_cdf_empirical(
    dataset: Dataset,
    fit: CoxFit,
    x_value: float,
    t: float,
    x_bins: int = 50,
    z_bins: int = 50,
) -> float:
    """Nonparametric double sum behind the closed form.

    Quantile-bins x, takes the subjects in the bin containing x_value to
    estimate the mediator law given the intervention (z quantile-binned,
    bin means as representatives), and multiplies H0(t), the binned
    conditional sum of exp(beta_z z), and the cohort-wide average of
    exp(beta_x x').
    """
    if x_bins < 1 or z_bins < 1:
        raise InvalidArgumentError("x_bins and z_bins must be >= 1")
    if t < 0:
        raise InvalidArgumentError(f"t must be >= 0, got {t}")
    x = dataset.column("x")
    z = dataset.column("z")
    if not (np.min(x) <= x_value <= np.max(x)):
        raise InvalidArgumentError(f"x_value {x_value} is outside the observed exposure range")
    beta_x = fit.coef("x")
    beta_z = fit.coef("z")

    edges = _quantile_edges(x, x_bins)
    bin_idx = _bin_of(edges, x_value)
    lo, hi = edges[bin_idx], edges[bin_idx + 1]
    in_bin = (x >= lo) & (x <= hi) if bin_idx == x_bins - 1 else (x >= lo) & (x < hi)
    if not np.any(in_bin):
        raise EmptyStratumError(f"x bin {bin_idx} [{lo}, {hi}] containing x_value={x_value} is empty")
    z_sel = z[in_bin]

    conditional = 0.0
    z_edges = np.unique(_quantile_edges(z_sel, z_bins))
    n_sel = z_sel.size
    for k in range(len(z_edges) - 1 if len(z_edges) > 1 else 1):
        if len(z_edges) == 1:
            members = z_sel
        else:
            zlo, zhi = z_edges[k], z_edges[k + 1]
            members = z_sel[(z_sel >= zlo) & (z_sel <= zhi)] if k == len(z_edges) - 2 else z_sel[(z_sel >= zlo) & (z_sel < zhi)]
        if members.size == 0:
            continue
        conditional += (members.size / n_sel) * math.exp(beta_z * float(np.mean(members)))

    marginal = float(np.mean(np.exp(beta_x * x)))
    return fit.baseline_cumhaz(t) * conditional * marginal


def frontdoor_causal_rr(params: FrontdoorParams, x: float, x0: float) -> CausalEstimate:
    """Causal relative risk exp(beta_z * alpha * (x - x0)).

    Every confounded factor cancels in the incidence ratio. The standard
    error treats the hazard fit and the mediator regression as independent
    and applies the delta method to the product of coefficients.
    """
    if not (math.isfinite(x) and math.isfinite(x0)):
        raise InvalidArgumentError("x and x0 must be finite")
    delta = x - x0
    log_rr = params.beta_z * params.alpha * delta
    rr = math.exp(log_rr)
    if params.se_alpha is None or params.se_beta_z is None:
        se = float("nan")
    else:
        var_log = delta * delta * (
            params.alpha ** 2 * params.se_beta_z ** 2 + params.beta_z ** 2 * params.se_alpha ** 2
        )
        se = rr * math.sqrt(var_log)
    return CausalEstimate(
        value=rr,
        std_err=se,
        method="frontdoor_causal_rr",
        rarity_flag=False,
        diagnostics={"log_rr": log_rr},
    )


def mediation_indirect_rr(params: FrontdoorParams, x: float, x0: float) -> CausalEstimate:
    """Natural indirect effect rate ratio for the solely-mediated model
    (no direct exposure pathway, no exposure-mediator interaction).

    This is the frontdoor relative risk under another name; the shared
    code path keeps the two identical to the last bit.
    """
    est = frontdoor_causal_rr(params, x, x0)
    return dataclasses.replace(est, method="mediation_indirect_rr")
