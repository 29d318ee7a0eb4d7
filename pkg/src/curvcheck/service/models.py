"""Typed request and response bodies.

Chain specs come in two interchangeable JSON forms: explicit states/rates
(with an optional stationary measure) or a named family with parameters.
Responses all carry a ReportMeta block so any serialized report can be traced
back to the exact chain, seed, and tool version that produced it.
"""

from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

RateTriple = tuple[Union[str, int], Union[str, int], float]


class ChainSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    states: Optional[list[str]] = None
    rates: Optional[list[RateTriple]] = None
    pi: Optional[list[float]] = None
    family: Optional[str] = None
    params: Optional[dict[str, Any]] = None

    @model_validator(mode="after")
    def _exactly_one_form(self):
        explicit = self.states is not None or self.rates is not None
        if explicit and self.family is not None:
            raise ValueError("give either states/rates or family, not both")
        if not explicit and self.family is None:
            raise ValueError("chain spec needs states/rates or a family")
        if explicit and (self.states is None or self.rates is None):
            raise ValueError("explicit chain spec needs both states and rates")
        if self.family is None and self.params is not None:
            raise ValueError("params only apply to family specs")
        return self

    def as_build_dict(self) -> dict:
        if self.family is not None:
            return {"family": self.family, "params": dict(self.params or {})}
        out = {"states": list(self.states),
               "rates": [list(r) for r in self.rates]}
        if self.pi is not None:
            out["pi"] = list(self.pi)
        return out


class ReportMeta(BaseModel):
    spec_hash: str
    seed: int
    tool_version: str


class CertificateModel(BaseModel):
    kappa: float
    cdfun: str


# ---------------------------------------------------------------- requests

class ChainCheckRequest(BaseModel):
    chain: ChainSpec
    tol: float = Field(1e-10, gt=0)


class CurvatureRequest(BaseModel):
    chain: ChainSpec
    variant: Literal["upsilon", "be", "bakry_emery"] = "upsilon"
    state: Optional[str] = None
    seed: Optional[int] = None
    starts: int = Field(12, ge=1)


class CDVerifyRequest(BaseModel):
    chain: ChainSpec
    kappa: float
    cdfun: Optional[str] = None
    trials: int = Field(10000, ge=1)
    seed: Optional[int] = None
    threads: int = Field(1, ge=1)


class EntropyDecayRequest(BaseModel):
    chain: ChainSpec
    density: list[float]
    grid: str = "geom:t0=0.01,ratio=1.6,count=12"
    kappa: Optional[float] = None
    cdfun: Optional[str] = None


class DiameterRequest(BaseModel):
    chain: ChainSpec
    seed: Optional[int] = None
    threads: int = Field(1, ge=1)


SuiteName = Literal["ei", "ultra", "lip", "nash"]


class InequalitiesRequest(BaseModel):
    chain: ChainSpec
    growth: str
    suite: list[SuiteName] = ["ei", "ultra", "lip", "nash"]
    trials: int = Field(1000, ge=1)
    seed: Optional[int] = None


class ExampleRequest(BaseModel):
    family: str
    params: dict[str, Any] = {}


# --------------------------------------------------------------- responses

class LocalStatsModel(BaseModel):
    m1: list[float]
    m2: list[float]
    n_stat: list[float]
    m1_inf: float
    m1_sup: float


class ChainCheckResponse(BaseModel):
    meta: ReportMeta
    states: list[str]
    reversible: bool
    pi: list[float]
    stats: LocalStatsModel
    family: Optional[str] = None
    certificate: Optional[CertificateModel] = None


class KappaRow(BaseModel):
    state: str
    kappa: float
    evaluations: int


class CurvatureResponse(BaseModel):
    meta: ReportMeta
    variant: str
    rows: list[KappaRow]
    minimum: float


class CDVerifyResponse(BaseModel):
    meta: ReportMeta
    kappa: float
    cdfun: Optional[str]
    status: str
    worst_slack: float
    witness_state: Optional[str]
    witness_f: Optional[list[float]]
    trials: int


class TrajectoryRow(BaseModel):
    t: float
    lam: float
    lam_prime: float
    lam_pprime: float
    slack: Optional[float] = None


class EntropyDecayResponse(BaseModel):
    meta: ReportMeta
    rows: list[TrajectoryRow]
    kappa: Optional[float]
    cdfun: Optional[str]
    min_slack: Optional[float]
    ok: Optional[bool]
    clamped: bool


class PairRow(BaseModel):
    x: str
    y: str
    rho: float
    converged: bool


class DiameterResponse(BaseModel):
    meta: ReportMeta
    diameter: float
    pair: tuple[str, str]
    converged: bool
    bound: Optional[float]
    bound_ok: Optional[bool]
    pairs: list[PairRow]


class SuiteReport(BaseModel):
    kind: str
    passed: bool
    samples: int
    min_slack: float
    worst_sample: Optional[int] = None
    sweep: list[tuple[float, float]] = []
    params: dict[str, Any] = {}


class InequalitiesResponse(BaseModel):
    meta: ReportMeta
    growth: str
    suites: list[SuiteReport]
    passed: bool


class ExampleResponse(BaseModel):
    meta: ReportMeta
    family: str
    params: dict[str, Any]
    spec: dict[str, Any]
    certificate: Optional[CertificateModel]
    notes: str = ""
