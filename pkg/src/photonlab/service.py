"""HTTP service exposing the experiment runner.

The service is a thin shell: configs validate to the same ExperimentConfig
the library uses, runs happen in-process, and artifacts come back
base64-encoded so remote callers need no shared filesystem.  The CLI talks
to this app through an in-process ASGI transport by default, so single-box
usage pays no network cost.
"""

from __future__ import annotations

import base64
import tempfile
from dataclasses import replace
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .experiments import (EXPERIMENT_SPECS, ConfigError, default_config,
                          run_experiment, validate_config)

API_VERSION = "1"


class ExperimentInfo(BaseModel):
    name: str
    description: str
    default_config: dict


class ValidationIssue(BaseModel):
    field: str
    message: str


class ValidateRequest(BaseModel):
    config: dict


class ValidateResponse(BaseModel):
    valid: bool
    errors: list[ValidationIssue] = Field(default_factory=list)


class RunRequest(BaseModel):
    config: dict
    seed: int | None = Field(default=None, ge=0,
                             description="overrides the config seed")
    include_artifacts: bool = False


class ArtifactFile(BaseModel):
    name: str
    content_base64: str


class RunResponse(BaseModel):
    report: dict
    all_passed: bool
    artifacts: list[ArtifactFile] = Field(default_factory=list)


def _issue(exc: ConfigError) -> dict:
    return {"field": exc.field, "message": exc.message}


def create_app() -> FastAPI:
    app = FastAPI(title="photonlab", version=API_VERSION,
                  description="Numerical experiments on the oscillator model "
                              "of the radiation field.")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "api_version": API_VERSION}

    @app.get("/experiments", response_model=list[ExperimentInfo])
    def experiments() -> list[ExperimentInfo]:
        return [ExperimentInfo(name=name, description=spec["description"],
                               default_config=default_config(name))
                for name, spec in EXPERIMENT_SPECS.items()]

    @app.post("/experiments/validate", response_model=ValidateResponse)
    def validate(req: ValidateRequest) -> ValidateResponse:
        try:
            validate_config(req.config)
        except ConfigError as e:
            return ValidateResponse(valid=False, errors=[ValidationIssue(**_issue(e))])
        return ValidateResponse(valid=True)

    @app.post("/experiments/run", response_model=RunResponse)
    def run(req: RunRequest) -> RunResponse:
        try:
            config = validate_config(req.config)
        except ConfigError as e:
            raise HTTPException(status_code=400, detail=_issue(e))
        if req.seed is not None:
            config = replace(config, seed=req.seed)

        artifacts: list[ArtifactFile] = []
        if req.include_artifacts:
            with tempfile.TemporaryDirectory() as tmp:
                report = run_experiment(config, out_dir=tmp)
                for name in report.artifacts:
                    payload = (Path(tmp) / name).read_bytes()
                    artifacts.append(ArtifactFile(
                        name=name,
                        content_base64=base64.b64encode(payload).decode("ascii")))
        else:
            report = run_experiment(config)
        return RunResponse(report=report.to_dict(),
                           all_passed=report.all_passed, artifacts=artifacts)

    return app


app = create_app()
