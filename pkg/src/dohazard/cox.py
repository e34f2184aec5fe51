"""Cox proportional hazards: Breslow partial likelihood, Newton solver,
and the Breslow baseline cumulative hazard.

The baseline is anchored at the reference covariate vector baseline_x0
(all zeros unless overridden), so the linear predictor is exactly 0 there
and exp(beta . (x - x0)) multiplies the reported baseline directly. Ties
are handled with the Breslow convention: every subject with a tied time
sits in the risk set of that time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateCovariateError,
    InvalidArgumentError,
    MonotoneLikelihoodError,
    NoEventsError,
    NumericalError,
    ParseError,
    ValidationError,
)
from .simulate import Dataset

_MAX_HALVINGS = 30
_BETA_BOUND = 50.0
_ETA_BOUND = 500.0


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function, zero before the first knot and
    constant after the last."""

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        knots = np.asarray(self.knots, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if knots.ndim != 1 or knots.shape != values.shape:
            raise InvalidArgumentError("knots and values must be 1-d arrays of equal length")
        if knots.size and np.any(np.diff(knots) <= 0):
            raise InvalidArgumentError("knots must be strictly increasing")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=np.float64)
        idx = np.searchsorted(self.knots, t_arr, side="right") - 1
        out = np.where(idx >= 0, self.values[np.maximum(idx, 0)], 0.0)
        return float(out) if np.isscalar(t) else out


def _design(dataset: Dataset, covariate_names) -> tuple:
    names = list(covariate_names) if covariate_names is not None else list(dataset.covariate_names)
    if not names:
        raise InvalidArgumentError("at least one covariate is required")
    x = dataset.covariates[:, [dataset.column_index(c) for c in names]]
    return names, x


def _check_beta(beta, p: int) -> np.ndarray:
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (p,):
        raise InvalidArgumentError(f"beta must have length {p}, got shape {beta.shape}")
    return beta


def _sorted_arrays(time, event, covariates):
    order = np.argsort(time, kind="stable")
    return time[order], event[order], covariates[order]


def _nlpl(beta, t_s, d_s, x_s):
    """Negative Breslow log partial likelihood plus derivatives on
    time-sorted arrays."""
    eta = x_s @ beta
    if np.max(np.abs(eta)) > _ETA_BOUND:
        raise NumericalError(
            "linear predictor exceeds exp() range; rescale covariates to moderate magnitudes"
        )
    w = np.exp(eta)
    s0 = np.cumsum(w[::-1])[::-1]
    s1 = np.cumsum((w[:, None] * x_s)[::-1], axis=0)[::-1]
    xx = x_s[:, :, None] * x_s[:, None, :]
    s2 = np.cumsum((w[:, None, None] * xx)[::-1], axis=0)[::-1]
    # rows sharing a time share the risk set: read sums at the tie group head
    first = np.searchsorted(t_s, t_s, side="left")
    ev = np.flatnonzero(d_s)
    s0_e = s0[first][ev]
    ratio1 = s1[first][ev] / s0_e[:, None]
    value = -float(np.sum(eta[ev] - np.log(s0_e)))
    gradient = -np.sum(x_s[ev] - ratio1, axis=0)
    hessian = np.sum(
        s2[first][ev] / s0_e[:, None, None] - ratio1[:, :, None] * ratio1[:, None, :], axis=0
    )
    return value, gradient, hessian


def neg_log_partial_likelihood(dataset: Dataset, beta, covariate_names=None):
    """Negative Breslow log partial likelihood with gradient and Hessian.

    Returns (value, gradient, hessian); the Hessian is the observed
    information, positive semidefinite by construction.
    """
    names, x = _design(dataset, covariate_names)
    beta = _check_beta(beta, len(names))
    if dataset.n_events == 0:
        raise NoEventsError("no events in the data; the partial likelihood is undefined")
    t_s, d_s, x_s = _sorted_arrays(dataset.time, dataset.event, x)
    return _nlpl(beta, t_s, d_s, x_s)


def _breslow(beta, t_s, d_s, x_s) -> StepFunction:
    eta = x_s @ beta
    if np.max(np.abs(eta)) > _ETA_BOUND:
        raise NumericalError(
            "linear predictor exceeds exp() range; rescale covariates to moderate magnitudes"
        )
    w = np.exp(eta)
    s0 = np.cumsum(w[::-1])[::-1]
    knots, counts = np.unique(t_s[d_s], return_counts=True)
    ev_first = np.searchsorted(t_s, knots, side="left")
    increments = counts / s0[ev_first]
    return StepFunction(knots=knots, values=np.cumsum(increments))


def breslow_baseline(dataset: Dataset, beta, covariate_names=None) -> StepFunction:
    """Baseline cumulative hazard at the zero covariate vector: at each
    distinct event time, the event count over the risk-set sum of exp(eta)."""
    names, x = _design(dataset, covariate_names)
    beta = _check_beta(beta, len(names))
    if dataset.n_events == 0:
        raise NoEventsError("no events in the data; the baseline hazard is undefined")
    t_s, d_s, x_s = _sorted_arrays(dataset.time, dataset.event, x)
    return _breslow(beta, t_s, d_s, x_s)


@dataclass
class CoxFit:
    """Fitted proportional-hazards model plus its baseline.

    The linear predictor is beta . (covariates - baseline_x0), exactly
    zero at the reference vector baseline_x0.
    """

    beta: np.ndarray
    covariance: np.ndarray
    covariate_names: list
    baseline_cumhaz: StepFunction
    n: int
    n_events: int
    log_likelihood: float
    converged: bool
    iterations: int
    final_score_norm: float
    baseline_x0: np.ndarray = field(default=None)

    def __post_init__(self) -> None:
        if self.baseline_x0 is None:
            self.baseline_x0 = np.zeros(len(self.covariate_names))

    def coef(self, name: str) -> float:
        return float(self.beta[self._index(name)])

    def std_err(self, name: str) -> float:
        i = self._index(name)
        return math.sqrt(float(self.covariance[i, i]))

    def _index(self, name: str) -> int:
        try:
            return self.covariate_names.index(name)
        except ValueError:
            raise InvalidArgumentError(
                f"fit has no covariate {name!r}; it has {self.covariate_names}"
            ) from None


def fit_cox(dataset: Dataset, covariate_names=None, tol: float = 1e-9, max_iter: int = 50) -> CoxFit:
    """Newton solver for the Breslow partial likelihood, started at zero,
    with step halving whenever the objective fails to decrease.

    Stops when the gradient max-norm or the relative objective change
    drops to tol; hitting max_iter returns converged=False. A coefficient
    running past 50 raises MonotoneLikelihoodError naming the covariate
    (separated data has no finite optimum).
    """
    names, x = _design(dataset, covariate_names)
    for j, name in enumerate(names):
        if np.ptp(x[:, j]) == 0.0:
            raise DegenerateCovariateError(f"covariate {name!r} is constant; its effect is unidentifiable")
    if dataset.n_events == 0:
        raise NoEventsError("no events in the data; the partial likelihood is undefined")
    t_s, d_s, x_s = _sorted_arrays(dataset.time, dataset.event, x)

    beta = np.zeros(len(names))
    value, gradient, hessian = _nlpl(beta, t_s, d_s, x_s)
    converged = float(np.max(np.abs(gradient))) <= tol
    iterations = 0
    while not converged and iterations < max_iter:
        iterations += 1
        try:
            direction = np.linalg.solve(hessian, -gradient)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"observed information is singular: {exc}") from exc
        step = 1.0
        accepted = False
        for _ in range(_MAX_HALVINGS):
            candidate = beta + step * direction
            try:
                new = _nlpl(candidate, t_s, d_s, x_s)
            except NumericalError:
                step *= 0.5
                continue
            if new[0] <= value + 1e-12 * (1.0 + abs(value)):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        improvement = value - new[0]
        beta, (value, gradient, hessian) = candidate, new
        worst = int(np.argmax(np.abs(beta)))
        if abs(beta[worst]) > _BETA_BOUND:
            raise MonotoneLikelihoodError(
                f"coefficient for {names[worst]!r} diverged past {_BETA_BOUND}; "
                "the likelihood appears monotone (separation)"
            )
        if float(np.max(np.abs(gradient))) <= tol or improvement <= tol * (1.0 + abs(value)):
            converged = True

    try:
        covariance = np.linalg.inv(hessian)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"observed information is singular: {exc}") from exc
    return CoxFit(
        beta=beta,
        covariance=covariance,
        covariate_names=names,
        baseline_cumhaz=_breslow(beta, t_s, d_s, x_s),
        n=dataset.n,
        n_events=dataset.n_events,
        log_likelihood=-value,
        converged=converged,
        iterations=iterations,
        final_score_norm=float(np.max(np.abs(gradient))),
    )


def linear_predictor(fit: CoxFit, covariates) -> float:
    """beta . (covariates - baseline_x0) for one covariate vector, in the
    order of fit.covariate_names."""
    x = np.atleast_1d(np.asarray(covariates, dtype=np.float64))
    if x.shape != fit.beta.shape:
        raise InvalidArgumentError(
            f"covariates must have length {fit.beta.shape[0]} (order {fit.covariate_names}), got shape {x.shape}"
        )
    return float(fit.beta @ (x - fit.baseline_x0))


def predict_cumhaz(fit: CoxFit, covariates, t):
    """Model cumulative hazard exp(eta) * H0(t) at one covariate vector;
    vectorizes over t."""
    if np.any(np.asarray(t) < 0):
        raise InvalidArgumentError("t must be >= 0")
    return fit.baseline_cumhaz(t) * math.exp(linear_predictor(fit, covariates))


def save_fit(fit: CoxFit, path) -> None:
    payload = {
        "beta": [float(b) for b in fit.beta],
        "covariance": [[float(v) for v in row] for row in fit.covariance],
        "covariate_names": list(fit.covariate_names),
        "baseline_knots": [float(k) for k in fit.baseline_cumhaz.knots],
        "baseline_values": [float(v) for v in fit.baseline_cumhaz.values],
        "baseline_x0": [float(v) for v in fit.baseline_x0],
        "n": fit.n,
        "n_events": fit.n_events,
        "log_likelihood": fit.log_likelihood,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "final_score_norm": fit.final_score_norm,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_fit(path) -> CoxFit:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    required = (
        "beta", "covariance", "covariate_names", "baseline_knots", "baseline_values",
        "baseline_x0", "n", "n_events", "log_likelihood", "converged", "iterations",
        "final_score_norm",
    )
    for key in required:
        if key not in raw:
            raise ValidationError(f"{path}: fit file is missing field '{key}'")
    return CoxFit(
        beta=np.asarray(raw["beta"], dtype=np.float64),
        covariance=np.asarray(raw["covariance"], dtype=np.float64),
        covariate_names=list(raw["covariate_names"]),
        baseline_cumhaz=StepFunction(
            knots=np.asarray(raw["baseline_knots"], dtype=np.float64),
            values=np.asarray(raw["baseline_values"], dtype=np.float64),
        ),
        n=int(raw["n"]),
        n_events=int(raw["n_events"]),
        log_likelihood=float(raw["log_likelihood"]),
        converged=bool(raw["converged"]),
        iterations=int(raw["iterations"]),
        final_score_norm=float(raw["final_score_norm"]),
        baseline_x0=np.asarray(raw["baseline_x0"], dtype=np.float64),
    )
