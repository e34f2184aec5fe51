"""Covariate-standardized ("adjustment formula") causal estimators.

With measured confounders Z, the interventional incidence at horizon t is
approximately exp(eta_x(x)) * H0(t) * a_z under a rare outcome, where
a_z averages exp(eta_z) over the study-start population. Ratios of such
incidences reduce to exp(eta_x(x) - eta_x(x0)): the confounder average
cancels, so the causal relative risk uses x-coefficients only.

Baseline convention: eta(x0) = 0 at covariates equal to zero, matching the
uncentered Breslow baseline of the fitter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cox import CoxFit
from .errors import InvalidArgumentError, NumericalError
from .results import CausalEstimate
from .simulate import Dataset

RARITY_THRESHOLD = 0.1


@dataclass(frozen=True)
class BackdoorSummary:
    """Population-level factors of the adjustment formula.

    a_z averages exp(eta_z) over subjects; mean_joint_risk averages the
    full exp(eta); max_cumhaz is the largest per-subject cumulative hazard
    at horizon_t, and rarity_flag marks max_cumhaz > 0.1, where the
    hazard-to-probability shortcut degrades past ~5% relative error.
    """

    a_z: float
    mean_joint_risk: float
    horizon_t: float
    max_cumhaz: float
    rarity_flag: bool
    z_columns: tuple
    n: int


def _as_values(x, names, what: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if arr.ndim != 1 or arr.shape[0] != len(names):
        raise InvalidArgumentError(
            f"{what} must supply {len(names)} value(s) for columns {list(names)}, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{what} contains non-finite values")
    return arr


def _x_columns(fit: CoxFit, z_columns) -> list:
    return [c for c in fit.covariate_names if c not in z_columns]


def _eta_x(fit: CoxFit, summary: BackdoorSummary, x) -> float:
    names = _x_columns(fit, summary.z_columns)
    values = _as_values(x, names, "x")
    idx = [fit.covariate_names.index(c) for c in names]
    return float(fit.beta[idx] @ values)


def compute_az(dataset: Dataset, fit: CoxFit, z_columns, horizon_t: float | None = None) -> BackdoorSummary:
    """Average exp(eta_z) over the cohort, with the empirical distribution
    standing in for the confounder law exactly (equal weights).

    horizon_t defaults to the last event time of the fitted baseline; it
    only feeds the rarity diagnostic, not a_z itself.
    """
    z_columns = tuple(z_columns)
    for name in z_columns:
        fit._index(name)  # raises InvalidArgumentError for unknown names
        dataset.column_index(name)
    if horizon_t is None:
        horizon_t = float(fit.baseline_cumhaz.knots[-1]) if fit.baseline_cumhaz.knots.size else 0.0
    elif not (math.isfinite(horizon_t) and horizon_t >= 0):
        raise InvalidArgumentError(f"horizon_t must be >= 0, got {horizon_t}")

    z_idx = [fit._index(c) for c in z_columns]
    eta_z = dataset.covariates[:, [dataset.column_index(c) for c in z_columns]] @ fit.beta[z_idx]
    full_idx = [dataset.column_index(c) for c in fit.covariate_names]
    eta_full = dataset.covariates[:, full_idx] @ fit.beta

    a_z = float(np.mean(np.exp(eta_z)))
    jensen_floor = math.exp(float(np.mean(eta_z)))
    if a_z < jensen_floor * (1.0 - 1e-12):
        raise NumericalError(f"a_z = {a_z} fell below its Jensen floor {jensen_floor}")

    h0 = fit.baseline_cumhaz(horizon_t)
    max_cumhaz = float(np.max(np.exp(eta_full)) * h0)
    return BackdoorSummary(
        a_z=a_z,
        mean_joint_risk=float(np.mean(np.exp(eta_full))),
        horizon_t=float(horizon_t),
        max_cumhaz=max_cumhaz,
        rarity_flag=max_cumhaz > RARITY_THRESHOLD,
        z_columns=z_columns,
        n=dataset.n,
    )


def do_cdf(fit: CoxFit, summary: BackdoorSummary, x, t) -> CausalEstimate:
    """Interventional incidence by horizon t: exp(eta_x(x)) * H0(t) * a_z.

    The returned estimate is flagged when its value exceeds 0.1, where it
    stops being a credible probability approximation.
    """
    if t < 0:
        raise InvalidArgumentError(f"t must be >= 0, got {t}")
    value = math.exp(_eta_x(fit, summary, x)) * fit.baseline_cumhaz(t) * summary.a_z
    return CausalEstimate(
        value=value,
        std_err=float("nan"),
        method="do_cdf",
        rarity_flag=value > RARITY_THRESHOLD,
        diagnostics={"a_z": summary.a_z, "h0_t": fit.baseline_cumhaz(t)},
    )


def causal_rr(fit: CoxFit, x, x0, x_columns=None) -> CausalEstimate:
    """Causal relative risk exp(eta_x(x) - eta_x(x0)).

    Only exposure coefficients enter; adjustment coefficients cancel in
    the incidence ratio and are excluded by construction. Asking for a
    contrast over an adjustment column is refused: such a ratio has no
    interventional reading here.
    """
    if x_columns is None:
        x_columns = [c for c in fit.covariate_names if c.startswith("x")]
    else:
        x_columns = list(x_columns)
        bad = [c for c in x_columns if not c.startswith("x")]
        if bad:
            raise InvalidArgumentError(
                f"causal_rr contrasts exposure columns only; refusing adjustment column(s) {bad}"
            )
    if not x_columns:
        raise InvalidArgumentError("fit has no exposure columns (names starting with 'x')")
    x_vec = _as_values(x, x_columns, "x")
    x0_vec = _as_values(x0, x_columns, "x0")
    idx = [fit._index(c) for c in x_columns]
    delta = x_vec - x0_vec
    log_rr = float(fit.beta[idx] @ delta)
    contrast = np.zeros_like(fit.beta)
    contrast[idx] = delta
    se_log = math.sqrt(max(float(contrast @ fit.covariance @ contrast), 0.0))
    rr = math.exp(log_rr)
    return CausalEstimate(
        value=rr,
        std_err=rr * se_log,
        method="causal_rr",
        rarity_flag=False,
        diagnostics={"log_rr": log_rr, "se_log_rr": se_log},
    )


def do_cumhaz(fit: CoxFit, summary: BackdoorSummary, x, t) -> float:
    """Interventional cumulative hazard exp(eta_x(x)) * a_z * H0(t).

    Exact under the fitted model (no rare-outcome step involved)."""
    if t < 0:
        raise InvalidArgumentError(f"t must be >= 0, got {t}")
    return math.exp(_eta_x(fit, summary, x)) * summary.a_z * fit.baseline_cumhaz(t)


def do_interval_hazard(fit: CoxFit, summary: BackdoorSummary, x, t1, t2) -> float:
    """Average interventional hazard over (t1, t2]: the difference quotient
    of do_cumhaz."""
    if t2 <= t1:
        raise InvalidArgumentError(f"need t2 > t1, got t1={t1}, t2={t2}")
    return (do_cumhaz(fit, summary, x, t2) - do_cumhaz(fit, summary, x, t1)) / (t2 - t1)


def paf(dataset: Dataset, fit: CoxFit, summary: BackdoorSummary, x0=None) -> float:
    """Population attributable fraction 1 - exp(eta_x(x0)) * a_z / mean(exp(eta)).

    Compares the factual population incidence against everyone forced to
    the reference exposure x0 (all-zero baseline by default); the baseline
    hazard cancels in the ratio.
    """
    full_idx = [dataset.column_index(c) for c in fit.covariate_names]
    mean_joint = float(np.mean(np.exp(dataset.covariates[:, full_idx] @ fit.beta)))
    eta_x0 = 0.0 if x0 is None else _eta_x(fit, summary, x0)
    return 1.0 - math.exp(eta_x0) * summary.a_z / mean_joint


def naive_rr(dataset: Dataset, x_column: str, x, x0) -> CausalEstimate:
    """Unadjusted comparator: single-covariate fit on the exposure alone.

    Reported only to show what conditioning without adjustment does; this
    is not a causal quantity when confounders exist.
    """
    from .cox import fit_cox

    fit = fit_cox(dataset, [x_column])
    beta = fit.coef(x_column)
    se = fit.std_err(x_column)
    delta = float(x) - float(x0)
    rr = math.exp(beta * delta)
    return CausalEstimate(
        value=rr,
        std_err=rr * abs(delta) * se,
        method="naive_rr",
        rarity_flag=False,
        diagnostics={"beta": beta, "se_beta": se},
    )
