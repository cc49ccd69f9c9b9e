"""Pydantic request/response models for the HTTP service.

Feature indices on the wire are 1-based and carry column names, matching the
report format; internals are 0-based.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field

ENVIRONMENT_NOTE = "timing fields are machine-dependent and not comparable across machines"

MethodName = Literal["forward", "backward", "stepwise", "fb", "dfb"]
CriterionName = Literal["cp", "trace"]


class DatasetPayload(BaseModel):
    columns: list[str]
    rows: list[list[float]]
    target: Union[list[float], list[str]]
    task: Literal["regression", "classification"]


class SelectionOptions(BaseModel):
    alpha: float
    beta: float
    drop_beta: Optional[float] = None
    max_features: Optional[int] = None
    criterion: CriterionName = "cp"
    sigma2: Optional[float] = None
    ridge: float = 1e-8
    seed: Optional[int] = None


class SelectRequest(BaseModel):
    dataset: DatasetPayload
    method: MethodName
    options: SelectionOptions
    initial: Optional[list[int]] = Field(
        default=None, description="1-based initial feature set for method=backward"
    )


class StepPayload(BaseModel):
    kind: Literal["forward", "backward", "drop", "re-forward"]
    features: list[int]
    feature_names: list[str]
    gain: float
    value_after: float


class SelectionReportPayload(BaseModel):
    selected: list[int]
    selected_names: list[str]
    steps: list[StepPayload]
    backward_steps_taken: int
    criterion_evals: int
    wall_time_seconds: float
    final_criterion_value: float


class ReportDocument(BaseModel):
    tool_version: str
    command: str
    seed: Optional[int] = None
    method: str
    report: SelectionReportPayload
    environment_note: str = ENVIRONMENT_NOTE


class SimulateRequest(BaseModel):
    table: Optional[Literal[1, 2, 3]] = None
    n: int = 80
    p: int = 80
    max_corr: float = 0.0
    model_size: Optional[int] = None
    reps: int = 10
    seed: int = 0
    methods: list[MethodName] = ["dfb", "fb", "stepwise"]
    alpha: float = 0.01
    beta: float = 0.01
    drop_beta: Optional[float] = None
    sigma2: Optional[float] = 2.0
    builtin_model: bool = True


class MethodSummaryPayload(BaseModel):
    method: str
    mean_selected: float
    mean_backward_steps: float
    mean_wall_time: float
    mean_criterion_evals: float


class SimulateResponse(BaseModel):
    tool_version: str
    command: str
    seed: int
    replications: int
    n: int
    p: int
    max_corr: float
    methods: list[MethodSummaryPayload]
    environment_note: str = ENVIRONMENT_NOTE


class CompareRequest(BaseModel):
    dataset: DatasetPayload
    methods: list[MethodName] = ["dfb", "stepwise", "fb"]
    alpha: float = 0.05
    beta: float = 0.05
    drop_beta: Optional[float] = None
    ridge: float = 1e-8
    split: float = 0.3
    seed: int = 0
    with_all_features: bool = False
    with_pca: bool = False
    pca_target: float = 0.985


class CompareRowPayload(BaseModel):
    method: str
    test_error: float
    n_selected: int
    selected: list[int]
    selected_names: list[str]
    wall_time_seconds: float
    criterion_evals: int


class CompareResponse(BaseModel):
    tool_version: str
    command: str
    seed: int
    train_samples: int
    test_samples: int
    rows: list[CompareRowPayload]
    environment_note: str = ENVIRONMENT_NOTE


class ErrorResponse(BaseModel):
    error_kind: Literal["data", "numerical", "usage"]
    detail: str
