"""HTTP front end.

Domain failures map to two statuses so clients can gate on them the same way
the CLI maps exit codes: 422 for inadmissible input, 409 for computations
that ran but could not produce a trustworthy result. A falsified CD
condition is a successful verification and comes back as 200.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import InputError, MathError
from . import handlers, models


def create_app() -> FastAPI:
    app = FastAPI(title="curvcheck", version=__version__)

    @app.exception_handler(InputError)
    async def input_error(request: Request, exc: InputError):
        return JSONResponse(status_code=422, content={
            "kind": "input", "error": type(exc).__name__, "detail": str(exc)})

    @app.exception_handler(MathError)
    async def math_error(request: Request, exc: MathError):
        return JSONResponse(status_code=409, content={
            "kind": "math", "error": type(exc).__name__, "detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/chain/check", response_model=models.ChainCheckResponse)
    def chain_check(req: models.ChainCheckRequest):
        return handlers.handle_chain_check(req)

    @app.post("/curvature", response_model=models.CurvatureResponse)
    def curvature(req: models.CurvatureRequest):
        return handlers.handle_curvature(req)

    @app.post("/cd/verify", response_model=models.CDVerifyResponse)
    def cd_verify(req: models.CDVerifyRequest):
        return handlers.handle_cd_verify(req)

    @app.post("/entropy-decay", response_model=models.EntropyDecayResponse)
    def entropy_decay(req: models.EntropyDecayRequest):
        return handlers.handle_entropy_decay(req)

    @app.post("/diameter", response_model=models.DiameterResponse)
    def diameter(req: models.DiameterRequest):
        return handlers.handle_diameter(req)

    @app.post("/inequalities", response_model=models.InequalitiesResponse)
    def inequalities(req: models.InequalitiesRequest):
        return handlers.handle_inequalities(req)

    @app.post("/example", response_model=models.ExampleResponse)
    def example(req: models.ExampleRequest):
        return handlers.handle_example(req)

    return app


app = create_app()
