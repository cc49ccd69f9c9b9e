"""FastAPI service wrapping the selection toolkit.

Endpoints mirror the CLI subcommands: /select runs one selector on an
uploaded dataset, /simulate runs the Monte Carlo harness, /compare runs the
classification comparison pipeline.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..dataset import CLASSIFICATION, Dataset
from ..datagen import SimulationSpec, builtin_model_spec, run_monte_carlo
from ..errors import DataError, DropselectError, NumericalError
from ..evaluation import compare_pipeline
from ..selectors import SelectionConfig, run_selector
from . import schemas

# fixed coefficient used for the varying-model-size benchmark rows
TABLE_SIGNAL_VALUE = 2.5

app = FastAPI(title="dropselect", version=__version__)


@app.exception_handler(DataError)
async def _data_error(request: Request, exc: DataError):
    return JSONResponse(
        status_code=400, content={"error_kind": "data", "detail": str(exc)}
    )


@app.exception_handler(NumericalError)
async def _numerical_error(request: Request, exc: NumericalError):
    return JSONResponse(
        status_code=422, content={"error_kind": "numerical", "detail": str(exc)}
    )


@app.exception_handler(DropselectError)
async def _generic_error(request: Request, exc: DropselectError):
    return JSONResponse(
        status_code=400, content={"error_kind": "data", "detail": str(exc)}
    )


def _dataset_from_payload(payload: schemas.DatasetPayload) -> Dataset:
    return Dataset(
        X=payload.rows,
        target=payload.target,
        column_names=payload.columns,
        task=payload.task,
    )


def _config_from_options(options: schemas.SelectionOptions) -> SelectionConfig:
    return SelectionConfig(
        alpha=options.alpha,
        beta=options.beta,
        drop_beta=options.drop_beta,
        max_features=options.max_features,
        criterion=options.criterion,
        sigma2_override=options.sigma2,
        ridge=options.ridge,
        seed=options.seed,
    )


def _report_payload(report, column_names) -> schemas.SelectionReportPayload:
    return schemas.SelectionReportPayload(
        selected=[f + 1 for f in report.selected],
        selected_names=[column_names[f] for f in report.selected],
        steps=[
            schemas.StepPayload(
                kind=step.kind,
                features=[f + 1 for f in step.features],
                feature_names=[column_names[f] for f in step.features],
                gain=step.gain,
                value_after=step.value_after,
            )
            for step in report.steps
        ],
        backward_steps_taken=report.backward_steps_taken,
        criterion_evals=report.criterion_evals,
        wall_time_seconds=report.wall_time_seconds,
        final_criterion_value=report.final_criterion_value,
    )


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/select", response_model=schemas.ReportDocument)
def select(request: schemas.SelectRequest) -> schemas.ReportDocument:
    dataset = _dataset_from_payload(request.dataset)
    if request.options.criterion == "cp" and dataset.task == CLASSIFICATION:
        raise DataError("the cp criterion requires a numeric (regression) target")
    if request.options.criterion == "trace" and dataset.task != CLASSIFICATION:
        raise DataError("the trace criterion requires a label (classification) target")
    config = _config_from_options(request.options)
    initial = None
    if request.initial is not None:
        initial = [f - 1 for f in request.initial]
    report = run_selector(request.method, dataset, config, initial=initial)
    return schemas.ReportDocument(
        tool_version=__version__,
        command=f"select --method {request.method}",
        seed=request.options.seed,
        method=request.method,
        report=_report_payload(report, dataset.column_names),
    )


def _spec_from_request(req: schemas.SimulateRequest) -> SimulationSpec:
    if req.table == 1:
        if req.model_size is None:
            raise DataError("table 1 rows need --model-size")
        return SimulationSpec(
            n=req.n, p=req.p, model_size=req.model_size,
            signal_value=TABLE_SIGNAL_VALUE, replications=req.reps, seed=req.seed,
        )
    if req.table == 2:
        return builtin_model_spec(
            p=req.p, n=req.n, replications=req.reps, seed=req.seed,
            max_corr=req.max_corr,
        )
    if req.table == 3 or req.builtin_model:
        spec = builtin_model_spec(
            p=req.p, n=req.n, replications=req.reps, seed=req.seed,
            max_corr=req.max_corr,
        )
        return spec
    if req.model_size is None:
        raise DataError("specify --model-size or use the built-in model")
    return SimulationSpec(
        n=req.n, p=req.p, model_size=req.model_size,
        signal_value=TABLE_SIGNAL_VALUE, max_corr=req.max_corr,
        replications=req.reps, seed=req.seed,
    )


@app.post("/simulate", response_model=schemas.SimulateResponse)
def simulate(request: schemas.SimulateRequest) -> schemas.SimulateResponse:
    spec = _spec_from_request(request)
    config = SelectionConfig(
        alpha=request.alpha, beta=request.beta, drop_beta=request.drop_beta,
        criterion="cp", sigma2_override=request.sigma2,
    )
    summary = run_monte_carlo(spec, request.methods, config)
    return schemas.SimulateResponse(
        tool_version=__version__,
        command=f"simulate --p {spec.p} --reps {spec.replications}",
        seed=spec.seed,
        replications=summary.replications,
        n=spec.n,
        p=spec.p,
        max_corr=spec.max_corr,
        methods=[
            schemas.MethodSummaryPayload(
                method=m.method,
                mean_selected=m.mean_selected,
                mean_backward_steps=m.mean_backward_steps,
                mean_wall_time=m.mean_wall_time,
                mean_criterion_evals=m.mean_criterion_evals,
            )
            for m in summary.methods.values()
        ],
    )


@app.post("/compare", response_model=schemas.CompareResponse)
def compare(request: schemas.CompareRequest) -> schemas.CompareResponse:
    dataset = _dataset_from_payload(request.dataset)
    if dataset.task != CLASSIFICATION:
        raise DataError("compare requires a classification dataset (label target)")
    config = SelectionConfig(
        alpha=request.alpha, beta=request.beta, drop_beta=request.drop_beta,
        criterion="trace", ridge=request.ridge,
    )
    result = compare_pipeline(
        dataset, config, methods=request.methods,
        test_fraction=request.split, seed=request.seed,
        with_all_features=request.with_all_features,
        with_pca=request.with_pca, pca_target=request.pca_target,
    )
    return schemas.CompareResponse(
        tool_version=__version__,
        command=f"compare --methods {','.join(request.methods)}",
        seed=request.seed,
        train_samples=result.train_samples,
        test_samples=result.test_samples,
        rows=[
            schemas.CompareRowPayload(
                method=row.method,
                test_error=row.test_error,
                n_selected=row.n_selected,
                selected=[f + 1 for f in row.selected],
                selected_names=[dataset.column_names[f] for f in row.selected],
                wall_time_seconds=row.wall_time_seconds,
                criterion_evals=row.criterion_evals,
            )
            for row in result.rows
        ],
    )
