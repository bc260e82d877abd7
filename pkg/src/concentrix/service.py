"""HTTP service wrapping the bound evaluators and experiment runner.

Start with ``concentrix --serve`` or ``uvicorn concentrix.service:app``.
The endpoints are stateless: bound evaluation is a pure function of the
request, and experiment runs are deterministic given the seed in the
request body.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import bounds, matcore, stats
from .errors import ConcentrixError, UsageError
from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment

app = FastAPI(
    title="concentrix",
    description="Spectral-norm concentration bounds with Monte Carlo verification",
    version="0.1.0",
)


class BoundPayload(BaseModel):
    value: float
    kind: str
    formula: str
    rawValue: float
    thetaStar: float | None = None
    epsilon: float | None = None
    valid: bool = True
    reason: str = ""

    @classmethod
    def from_report(cls, report: bounds.BoundReport) -> "BoundPayload":
        return cls(
            value=report.value,
            kind=report.kind,
            formula=report.formula,
            rawValue=report.raw_value,
            thetaStar=report.theta_star,
            epsilon=report.epsilon,
            valid=report.valid,
            reason=report.reason,
        )


class SeriesBoundRequest(BaseModel):
    v: float = Field(ge=0, description="matrix variance statistic")
    d1: int = Field(ge=1)
    d2: int = Field(ge=1)
    t: float | None = Field(default=None, description="tail threshold; omit for the mean bound")
    eigOnly: bool = False


class BernsteinRequest(BaseModel):
    v: float = Field(ge=0)
    L: float = Field(ge=0)
    d1: int = Field(ge=1)
    d2: int = Field(ge=1)
    t: float | None = None


class ChernoffRequest(BaseModel):
    muMin: float = Field(ge=0)
    muMax: float = Field(ge=0)
    L: float = Field(gt=0)
    dim: int = Field(ge=1)
    theta: float = 1.0
    eps: float | None = None


class IntrinsicBernsteinRequest(BaseModel):
    intDim: float = Field(ge=1)
    v: float = Field(ge=0)
    L: float = Field(ge=0)
    t: float | None = None


class MasterRequest(BaseModel):
    kind: str = Field(description="gaussianSeries | rademacherSeries | chernoff | bernstein")
    scale: float = Field(ge=0)
    L: float = 0.0
    dim: int = Field(ge=1)
    t: float | None = None
    theta: float | None = None


class MatrixRequest(BaseModel):
    entries: list[list[float]]


class MatrixStatsResponse(BaseModel):
    rows: int
    cols: int
    spectralNorm: float
    frobeniusNorm: float
    entrywiseL1: float
    schatten1: float
    stableRank: float
    intrinsicDim: float | None = None


class ExperimentRequest(BaseModel):
    experiment: str
    dim: int | None = None
    rows: int | None = None
    cols: int | None = None
    trials: int | None = None
    seed: int = 1
    eps: float | None = None
    tGrid: list[float] = Field(default_factory=list)


class ExperimentResponse(BaseModel):
    experiment: str
    passed: bool
    summary: list[str]
    report: dict


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except UsageError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    except ConcentrixError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": app.version}


@app.get("/experiments")
def list_experiments() -> dict:
    return {"experiments": sorted(EXPERIMENTS)}


@app.post("/experiments/run", response_model=ExperimentResponse)
def experiments_run(req: ExperimentRequest) -> ExperimentResponse:
    config = _guard(
        ExperimentConfig,
        experiment=req.experiment,
        dim=req.dim,
        rows=req.rows,
        cols=req.cols,
        trials=req.trials,
        seed=req.seed,
        eps=req.eps,
        t_grid=tuple(req.tGrid),
    )
    result = _guard(run_experiment, config)
    return ExperimentResponse(
        experiment=result.experiment,
        passed=result.passed,
        summary=result.summary,
        report=result.envelope(),
    )


@app.post("/bounds/series", response_model=BoundPayload)
def series_bound(req: SeriesBoundRequest) -> BoundPayload:
    if req.t is None:
        report = _guard(bounds.series_expectation_bound, req.v, req.d1, req.d2, req.eigOnly)
    else:
        report = _guard(bounds.series_tail_bound, req.v, req.d1, req.d2, req.t)
    return BoundPayload.from_report(report)


@app.post("/bounds/bernstein", response_model=BoundPayload)
def bernstein_bound(req: BernsteinRequest) -> BoundPayload:
    if req.t is None:
        report = _guard(bounds.bernstein_expectation, req.v, req.L, req.d1, req.d2)
    else:
        report = _guard(bounds.bernstein_tail, req.v, req.L, req.d1, req.d2, req.t)
    return BoundPayload.from_report(report)


@app.post("/bounds/chernoff")
def chernoff_bound(req: ChernoffRequest) -> dict:
    cstats = _guard(
        stats.ChernoffStats, mu_min=req.muMin, mu_max=req.muMax, L=req.L, dim=req.dim
    )
    lower, upper = _guard(bounds.chernoff_expectation, cstats, req.theta)
    payload = {
        "expectationLower": BoundPayload.from_report(lower).model_dump(),
        "expectationUpper": BoundPayload.from_report(upper).model_dump(),
    }
    if req.eps is not None:
        tail_lower, tail_upper = _guard(bounds.chernoff_tail, cstats, req.eps)
        payload["tailLower"] = BoundPayload.from_report(tail_lower).model_dump()
        payload["tailUpper"] = BoundPayload.from_report(tail_upper).model_dump()
    return payload


@app.post("/bounds/intrinsic-bernstein", response_model=BoundPayload)
def intrinsic_bernstein_bound(req: IntrinsicBernsteinRequest) -> BoundPayload:
    istats = _guard(stats.IntrinsicStats, int_dim=req.intDim, v=req.v, L=req.L)
    if req.t is None:
        report = _guard(bounds.intdim_bernstein_expectation, istats)
    else:
        report = _guard(bounds.intdim_bernstein, istats, req.t)
    return BoundPayload.from_report(report)


@app.post("/bounds/master", response_model=BoundPayload)
def master_bound(req: MasterRequest) -> BoundPayload:
    model = _guard(bounds.CgfModel, kind=req.kind, scale=req.scale, L=req.L)
    report = _guard(bounds.master_bound_minimize, model, req.dim, req.t, req.theta)
    return BoundPayload.from_report(report)


@app.post("/matrices/stats", response_model=MatrixStatsResponse)
def matrix_stats(req: MatrixRequest) -> MatrixStatsResponse:
    arr = _guard(matcore.as_matrix, req.entries)
    intdim = None
    if arr.shape[0] == arr.shape[1]:
        try:
            intdim = matcore.intrinsic_dim(arr)
        except ConcentrixError:
            intdim = None
    return MatrixStatsResponse(
        rows=arr.shape[0],
        cols=arr.shape[1],
        spectralNorm=matcore.spectral_norm(arr),
        frobeniusNorm=matcore.frobenius_norm(arr),
        entrywiseL1=matcore.entrywise_l1(arr),
        schatten1=matcore.schatten1(arr),
        stableRank=_guard(matcore.stable_rank, arr),
        intrinsicDim=intdim,
    )
