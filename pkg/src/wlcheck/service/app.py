"""HTTP face of the checker: one POST per command plus catalog and health."""

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import WlcheckError
from . import runners
from .schemas import CheckRequest, ConditionsRequest, CovarianceRequest


def create_app():
    app = FastAPI(title="wlcheck", version=__version__)

    @app.exception_handler(WlcheckError)
    async def _domain_error(request, exc):
        return JSONResponse(status_code=400,
                            content={"error": type(exc).__name__,
                                     "detail": str(exc)})

    @app.post("/check")
    def check(req: CheckRequest):
        return runners.run_check(req)

    @app.post("/conditions")
    def conditions(req: ConditionsRequest):
        return runners.run_conditions(req)

    @app.post("/covariance")
    def covariance(req: CovarianceRequest):
        return runners.run_covariance(req)

    @app.get("/catalog")
    def catalog():
        return runners.catalog_listing()

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    return app


app = create_app()
