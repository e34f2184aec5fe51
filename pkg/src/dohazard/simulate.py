"""Synthetic survival cohorts from two structural causal models.

The confounded DAG draws a measured covariate Z that influences both the
exposure X and the event hazard; the mediated DAG draws a hidden U that
influences X and the hazard, with X acting on the hazard only through the
mediator Z. Event times come from a proportional-hazards model
h(t) = h0(t) * exp(eta) inverted by the standard uniform transform, with
administrative censoring at the study horizon and optional independent
exponential censoring.

Structural log-hazards live in ``backdoor_log_hazard`` and
``frontdoor_log_hazard``; the frontdoor one takes no exposure argument,
which makes the exclusion restriction a property of the code, not of a
statistical check.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Union

import numpy as np

from .errors import InvalidArgumentError, ParseError, ValidationError
from .stats import RngStream

# Stream ids per structural variable, so adding a variable never perturbs
# the draws of another.
_STREAM_Z_OR_U = 1
_STREAM_X_NOISE = 2
_STREAM_Z_NOISE = 3
_STREAM_FAILURE = 4
_STREAM_CENSOR = 5


@dataclass(frozen=True)
class ExponentialHazard:
    """Constant baseline hazard: H0(t) = rate * t."""

    rate: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValidationError(f"baseline_hazard.rate must be > 0, got {self.rate}")

    def cumulative(self, t):
        return self.rate * np.asarray(t, dtype=np.float64)

    def invert(self, h):
        return np.asarray(h, dtype=np.float64) / self.rate

    def to_dict(self) -> dict:
        return {"kind": "exponential", "rate": self.rate}


@dataclass(frozen=True)
class WeibullHazard:
    """Weibull baseline: H0(t) = (t / scale) ** shape."""

    shape: float
    scale: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.shape) and self.shape > 0):
            raise ValidationError(f"baseline_hazard.shape must be > 0, got {self.shape}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValidationError(f"baseline_hazard.scale must be > 0, got {self.scale}")

    def cumulative(self, t):
        return (np.asarray(t, dtype=np.float64) / self.scale) ** self.shape

    def invert(self, h):
        return self.scale * np.asarray(h, dtype=np.float64) ** (1.0 / self.shape)

    def to_dict(self) -> dict:
        return {"kind": "weibull", "shape": self.shape, "scale": self.scale}


BaselineHazard = Union[ExponentialHazard, WeibullHazard]


@dataclass(frozen=True)
class StandardNormalZ:
    def draw(self, rng: RngStream, n: int) -> np.ndarray:
        return rng.normal(0.0, 1.0, n)

    def to_dict(self):
        return "standard_normal"


@dataclass(frozen=True)
class BernoulliZ:
    p: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError(f"z_dist.p must be in [0, 1], got {self.p}")

    def draw(self, rng: RngStream, n: int) -> np.ndarray:
        return rng.bernoulli(self.p, n).astype(np.float64)

    def to_dict(self):
        return {"kind": "bernoulli", "p": self.p}


ZDistribution = Union[StandardNormalZ, BernoulliZ]


@dataclass(frozen=True)
class BackdoorCoefficients:
    a_zx: float      # effect of Z on X
    sigma_x: float   # sd of X given Z
    beta_x: float    # log-hazard effect of X
    beta_z: float    # log-hazard effect of Z

    def __post_init__(self) -> None:
        _require_finite_fields(self, "coefficients")
        if self.sigma_x < 0:
            raise ValidationError(f"coefficients.sigma_x must be >= 0, got {self.sigma_x}")


@dataclass(frozen=True)
class FrontdoorCoefficients:
    c_ux: float      # effect of hidden U on X
    sigma_x: float   # sd of X given U
    alpha: float     # effect of X on the mediator Z
    sigma_z: float   # sd of Z given X
    beta_z: float    # log-hazard effect of Z
    beta_u: float    # log-hazard effect of hidden U

    def __post_init__(self) -> None:
        _require_finite_fields(self, "coefficients")
        if self.sigma_x < 0:
            raise ValidationError(f"coefficients.sigma_x must be >= 0, got {self.sigma_x}")
        if self.sigma_z < 0:
            raise ValidationError(f"coefficients.sigma_z must be >= 0, got {self.sigma_z}")


def _require_finite_fields(obj, prefix: str) -> None:
    for name, value in vars(obj).items():
        if not math.isfinite(value):
            raise ValidationError(f"{prefix}.{name} must be finite, got {value}")


def backdoor_log_hazard(coef: BackdoorCoefficients, x, z):
    """Structural log relative hazard for the confounded DAG."""
    return coef.beta_x * np.asarray(x) + coef.beta_z * np.asarray(z)


def frontdoor_log_hazard(coef: FrontdoorCoefficients, z, u):
    """Structural log relative hazard for the mediated DAG.

    Depends on (z, u) only: the exposure has no direct hazard term.
    """
    return coef.beta_z * np.asarray(z) + coef.beta_u * np.asarray(u)


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete generative description of one synthetic cohort."""

    dag_kind: str                 # "backdoor" | "frontdoor"
    n_subjects: int
    seed: int
    baseline_hazard: BaselineHazard
    horizon_t: float
    censor_rate: float
    coefficients: Union[BackdoorCoefficients, FrontdoorCoefficients]
    z_dist: ZDistribution = field(default_factory=StandardNormalZ)

    def __post_init__(self) -> None:
        if self.dag_kind not in ("backdoor", "frontdoor"):
            raise ValidationError(f"dag_kind must be 'backdoor' or 'frontdoor', got {self.dag_kind!r}")
        if self.n_subjects < 1:
            raise ValidationError(f"n_subjects must be >= 1, got {self.n_subjects}")
        if self.seed < 0:
            raise ValidationError(f"seed must be nonnegative, got {self.seed}")
        if not (math.isfinite(self.horizon_t) and self.horizon_t > 0):
            raise ValidationError(f"horizon_t must be > 0, got {self.horizon_t}")
        if not (math.isfinite(self.censor_rate) and self.censor_rate >= 0):
            raise ValidationError(f"censor_rate must be >= 0, got {self.censor_rate}")
        expected = BackdoorCoefficients if self.dag_kind == "backdoor" else FrontdoorCoefficients
        if not isinstance(self.coefficients, expected):
            raise ValidationError(f"coefficients do not match dag_kind {self.dag_kind!r}")

    def to_dict(self) -> dict:
        return {
            "dag_kind": self.dag_kind,
            "n_subjects": self.n_subjects,
            "seed": self.seed,
            "baseline_hazard": self.baseline_hazard.to_dict(),
            "horizon_t": self.horizon_t,
            "censor_rate": self.censor_rate,
            "coefficients": dict(vars(self.coefficients)),
            "z_dist": self.z_dist.to_dict(),
        }

    @staticmethod
    def from_dict(raw: dict) -> "ScenarioConfig":
        for key in ("dag_kind", "n_subjects", "seed", "baseline_hazard", "horizon_t", "coefficients"):
            if key not in raw:
                raise ValidationError(f"scenario config is missing field '{key}'")
        dag_kind = raw["dag_kind"]
        coefs = raw["coefficients"]
        if not isinstance(coefs, dict):
            raise ValidationError("field 'coefficients' must be an object")
        try:
            if dag_kind == "backdoor":
                coefficients = BackdoorCoefficients(**coefs)
            elif dag_kind == "frontdoor":
                coefficients = FrontdoorCoefficients(**coefs)
            else:
                raise ValidationError(f"dag_kind must be 'backdoor' or 'frontdoor', got {dag_kind!r}")
        except TypeError as exc:
            raise ValidationError(f"field 'coefficients' invalid for {dag_kind}: {exc}") from exc
        return ScenarioConfig(
            dag_kind=dag_kind,
            n_subjects=_require_int(raw, "n_subjects"),
            seed=_require_int(raw, "seed"),
            baseline_hazard=_hazard_from_dict(raw["baseline_hazard"]),
            horizon_t=_require_number(raw, "horizon_t"),
            censor_rate=_require_number(raw, "censor_rate") if "censor_rate" in raw else 0.0,
            coefficients=coefficients,
            z_dist=_z_dist_from_dict(raw.get("z_dist", "standard_normal")),
        )


def _require_int(raw: dict, key: str) -> int:
    value = raw[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValidationError(f"field '{key}' must be an integer, got {value!r}")
    return value


def _require_number(raw: dict, key: str) -> float:
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"field '{key}' must be a number, got {value!r}")
    return float(value)


def _hazard_from_dict(raw) -> BaselineHazard:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ValidationError("field 'baseline_hazard' must be an object with a 'kind'")
    kind = raw["kind"]
    try:
        if kind == "exponential":
            return ExponentialHazard(rate=float(raw["rate"]))
        if kind == "weibull":
            return WeibullHazard(shape=float(raw["shape"]), scale=float(raw["scale"]))
    except KeyError as exc:
        raise ValidationError(f"baseline_hazard is missing field {exc}") from exc
    raise ValidationError(f"baseline_hazard.kind must be 'exponential' or 'weibull', got {kind!r}")


def _z_dist_from_dict(raw) -> ZDistribution:
    if raw == "standard_normal":
        return StandardNormalZ()
    if isinstance(raw, dict) and raw.get("kind") == "bernoulli":
        if "p" not in raw:
            raise ValidationError("z_dist of kind 'bernoulli' is missing field 'p'")
        return BernoulliZ(p=float(raw["p"]))
    raise ValidationError(f"field 'z_dist' must be 'standard_normal' or a bernoulli object, got {raw!r}")


def load_scenario_config(path) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: scenario config must be a JSON object")
    return ScenarioConfig.from_dict(raw)


@dataclass(frozen=True)
class SubjectRecord:
    """One cohort row; x and z are the exposure and adjustment blocks."""

    time: float
    event: bool
    x: np.ndarray
    z: np.ndarray
    u_latent: float | None = None


@dataclass
class Dataset:
    """Column-oriented cohort with named covariates.

    ``u_latent`` holds the hidden confounder of the mediated DAG. It is kept
    outside the covariate matrix, so estimators that select covariates by
    name can never see it; only the intervention oracle reads it.
    """

    time: np.ndarray
    event: np.ndarray
    covariates: np.ndarray
    covariate_names: list[str]
    u_latent: np.ndarray | None = None
    provenance: ScenarioConfig | str | None = None

    def __post_init__(self) -> None:
        self.time = np.asarray(self.time, dtype=np.float64)
        self.event = np.asarray(self.event, dtype=bool)
        self.covariates = np.asarray(self.covariates, dtype=np.float64)
        if self.covariates.ndim != 2:
            raise ValidationError("covariates must be a 2-d matrix")
        n = self.time.shape[0]
        if n == 0:
            raise ValidationError("dataset is empty")
        if self.event.shape[0] != n or self.covariates.shape[0] != n:
            raise ValidationError("time, event and covariates must have equal length")
        if len(self.covariate_names) != self.covariates.shape[1]:
            raise ValidationError("covariate_names must match the covariate columns")
        if len(set(self.covariate_names)) != len(self.covariate_names):
            raise ValidationError("covariate_names must be unique")
        if not np.all(np.isfinite(self.time)) or not np.all(np.isfinite(self.covariates)):
            raise ValidationError("dataset contains non-finite values")
        if np.any(self.time <= 0):
            raise ValidationError("all times must be positive")
        if self.u_latent is not None:
            self.u_latent = np.asarray(self.u_latent, dtype=np.float64)
            if self.u_latent.shape[0] != n or not np.all(np.isfinite(self.u_latent)):
                raise ValidationError("u_latent must be finite and match the cohort size")

    @property
    def n(self) -> int:
        return int(self.time.shape[0])

    @property
    def n_events(self) -> int:
        return int(np.count_nonzero(self.event))

    @property
    def x_names(self) -> list[str]:
        return [c for c in self.covariate_names if c.startswith("x")]

    @property
    def z_names(self) -> list[str]:
        return [c for c in self.covariate_names if c.startswith("z")]

    def column_index(self, name: str) -> int:
        try:
            return self.covariate_names.index(name)
        except ValueError:
            raise InvalidArgumentError(f"unknown covariate {name!r}; dataset has {self.covariate_names}") from None

    def column(self, name: str) -> np.ndarray:
        return self.covariates[:, self.column_index(name)]

    def records(self) -> Iterator[SubjectRecord]:
        x_idx = [self.column_index(c) for c in self.x_names]
        z_idx = [self.column_index(c) for c in self.z_names]
        for i in range(self.n):
            yield SubjectRecord(
                time=float(self.time[i]),
                event=bool(self.event[i]),
                x=self.covariates[i, x_idx],
                z=self.covariates[i, z_idx],
                u_latent=float(self.u_latent[i]) if self.u_latent is not None else None,
            )


def inverse_survival_time(u, eta, baseline_hazard: BaselineHazard):
    """Failure time T solving H0(T) * exp(eta) = -log(1 - u).

    Accepts scalars or arrays; u must lie strictly inside (0, 1).
    """
    u_arr = np.asarray(u, dtype=np.float64)
    eta_arr = np.asarray(eta, dtype=np.float64)
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0):
        raise InvalidArgumentError("u must lie strictly inside (0, 1)")
    if not np.all(np.isfinite(eta_arr)):
        raise InvalidArgumentError("eta must be finite")
    target = -np.log1p(-u_arr) * np.exp(-eta_arr)
    t = baseline_hazard.invert(target)
    return float(t) if np.isscalar(u) and np.isscalar(eta) else t


def _censoring_times(config: ScenarioConfig, rng: RngStream, n: int) -> np.ndarray:
    if config.censor_rate > 0:
        random_censor = rng.exponential(config.censor_rate, n)
        return np.minimum(config.horizon_t, random_censor)
    return np.full(n, config.horizon_t)


def _observe(failure: np.ndarray, censoring: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    event = failure <= censoring
    return np.where(event, failure, censoring), event


def generate_backdoor(config: ScenarioConfig) -> Dataset:
    """Cohort from the confounded DAG: Z -> X, (X, Z) -> hazard."""
    if config.dag_kind != "backdoor":
        raise InvalidArgumentError(f"generate_backdoor needs dag_kind 'backdoor', got {config.dag_kind!r}")
    coef = config.coefficients
    n = config.n_subjects
    z = config.z_dist.draw(RngStream(config.seed, _STREAM_Z_OR_U), n)
    x = coef.a_zx * z + RngStream(config.seed, _STREAM_X_NOISE).normal(0.0, coef.sigma_x, n)
    eta = backdoor_log_hazard(coef, x, z)
    failure = inverse_survival_time(RngStream(config.seed, _STREAM_FAILURE).uniform(n), eta, config.baseline_hazard)
    censoring = _censoring_times(config, RngStream(config.seed, _STREAM_CENSOR), n)
    time, event = _observe(failure, censoring)
    return Dataset(
        time=time,
        event=event,
        covariates=np.column_stack([x, z]),
        covariate_names=["x", "z"],
        provenance=config,
    )


def generate_frontdoor(config: ScenarioConfig) -> Dataset:
    """Cohort from the mediated DAG: U -> X -> Z, (Z, U) -> hazard."""
    if config.dag_kind != "frontdoor":
        raise InvalidArgumentError(f"generate_frontdoor needs dag_kind 'frontdoor', got {config.dag_kind!r}")
    coef = config.coefficients
    n = config.n_subjects
    u = RngStream(config.seed, _STREAM_Z_OR_U).normal(0.0, 1.0, n)
    x = coef.c_ux * u + RngStream(config.seed, _STREAM_X_NOISE).normal(0.0, coef.sigma_x, n)
    z = coef.alpha * x + RngStream(config.seed, _STREAM_Z_NOISE).normal(0.0, coef.sigma_z, n)
    eta = frontdoor_log_hazard(coef, z, u)
    failure = inverse_survival_time(RngStream(config.seed, _STREAM_FAILURE).uniform(n), eta, config.baseline_hazard)
    censoring = _censoring_times(config, RngStream(config.seed, _STREAM_CENSOR), n)
    time, event = _observe(failure, censoring)
    return Dataset(
        time=time,
        event=event,
        covariates=np.column_stack([x, z]),
        covariate_names=["x", "z"],
        u_latent=u,
        provenance=config,
    )


def generate(config: ScenarioConfig) -> Dataset:
    if config.dag_kind == "backdoor":
        return generate_backdoor(config)
    return generate_frontdoor(config)


def save_dataset(dataset: Dataset, path) -> None:
    """Write the cohort as CSV; floats carry 17 significant digits so the
    save/load round trip is value-exact."""
    columns = ["time", "event"] + list(dataset.covariate_names)
    if dataset.u_latent is not None:
        columns.append("u_latent")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for i in range(dataset.n):
            row = ["%.17g" % dataset.time[i], "1" if dataset.event[i] else "0"]
            row.extend("%.17g" % v for v in dataset.covariates[i])
            if dataset.u_latent is not None:
                row.append("%.17g" % dataset.u_latent[i])
            writer.writerow(row)


def load_dataset(path) -> Dataset:
    """Read a cohort CSV; raises ParseError with the offending line number,
    or ValidationError when values break the dataset invariants."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: file is empty") from None
        for required in ("time", "event"):
            if required not in header:
                raise ValidationError(f"{path}: missing required column '{required}'")
        names = [c for c in header if c not in ("time", "event", "u_latent")]
        has_u = "u_latent" in header
        index = {c: header.index(c) for c in header}
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}:{line_no}: expected {len(header)} fields, got {len(row)}")
            try:
                parsed = [float(v) for v in row]
            except ValueError as exc:
                raise ParseError(f"{path}:{line_no}: {exc}") from exc
            if parsed[index["event"]] not in (0.0, 1.0):
                raise ValidationError(f"{path}:{line_no}: event must be 0 or 1")
            rows.append(parsed)
        if not rows:
            raise ValidationError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=np.float64)
    return Dataset(
        time=data[:, index["time"]],
        event=data[:, index["event"]].astype(bool),
        covariates=data[:, [index[c] for c in names]] if names else np.empty((len(rows), 0)),
        covariate_names=names,
        u_latent=data[:, index["u_latent"]] if has_u else None,
        provenance=str(path),
    )
