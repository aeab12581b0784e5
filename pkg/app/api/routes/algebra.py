import time

from fastapi import APIRouter, Request
from starlette.concurrency import run_in_threadpool

from app.core.liealg import decompose, stabilizer
from app.core.reductive import canonical, connection_report
from app.middleware import limiter
from app.models.schemas import (
    AlgebraResponse,
    AltFormSchema,
    DecomposeRequest,
    DecompositionResponse,
    HolonomyRequest,
    HolonomyResponse,
    LieSubalgebraSchema,
    StabilizerRequest,
    gram_from_wire,
    matrix_to_wire,
)

router = APIRouter(
    prefix="/api/algebra",
    tags=["algebra"]
)


@router.post("/stabilizer", response_model=AlgebraResponse)
@limiter.limit("60/minute")
async def stabilizer_of_form(request: Request, body: StabilizerRequest):
    """Skew endomorphisms annihilating the given form."""
    start_time = time.time()
    form = body.form.to_form()
    gram = None if body.gram is None else gram_from_wire(body.gram, form.mode == "exact")
    g = await run_in_threadpool(stabilizer, form, gram)
    return AlgebraResponse(
        dimension=g.dimension,
        algebra=LieSubalgebraSchema.from_algebra(g),
        processingTime=time.time() - start_time,
    )


@router.post("/decompose", response_model=DecompositionResponse)
@limiter.limit("60/minute")
async def decompose_algebra(request: Request, body: DecomposeRequest):
    """Orthogonal splitting of R^n into irreducible summands."""
    start_time = time.time()
    g = body.algebra.to_algebra()
    rep = await run_in_threadpool(decompose, g, body.seed)
    return DecompositionResponse(
        dims=rep.dims,
        irreducible=rep.irreducible,
        isotypic=rep.isotypic,
        commutantDims=rep.commutant_dims,
        blocks=[matrix_to_wire(b) for b in rep.blocks],
        seed=rep.seed,
        processingTime=time.time() - start_time,
    )


@router.post("/holonomy", response_model=HolonomyResponse)
@limiter.limit("60/minute")
async def holonomy_of_connection(request: Request, body: HolonomyRequest):
    """Holonomy of an invariant connection; the canonical one when no Nomizu map is given."""
    start_time = time.time()
    model = body.model.to_model()
    lam = canonical(model) if body.nomizu is None else body.nomizu.to_nomizu()
    report = await run_in_threadpool(connection_report, model, lam)
    return HolonomyResponse(
        dimension=report.holonomy.dimension,
        holonomy=LieSubalgebraSchema.from_algebra(report.holonomy),
        metric=report.metric,
        torsionForm=None if report.torsion_form is None else AltFormSchema.from_form(report.torsion_form),
        processingTime=time.time() - start_time,
    )
