from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_serializer, model_validator

from app.core import linalg as la
from app.core.exterior import AltForm, CurvOperator, EucSpace
from app.core.liealg import LieSubalgebra
from app.core.reductive import NomizuMap, ReductiveModel

Mode = Literal["exact", "float"]


def _scalar_dict(num: Optional[int], den: Optional[int], val: Optional[float]) -> Dict[str, Any]:
    if val is not None:
        return {"val": val}
    return {"num": num, "den": 1 if den is None else den}


class _ScalarFields(BaseModel):
    num: Optional[int] = None
    den: Optional[int] = None
    val: Optional[float] = None

    @model_validator(mode="after")
    def _one_kind(self):
        if self.val is None and self.num is None:
            raise ValueError("entry needs either num/den or val")
        if self.val is not None and self.num is not None:
            raise ValueError("entry carries both num/den and val")
        if self.den == 0:
            raise ValueError("zero denominator")
        return self

    def to_scalar(self):
        if self.val is not None:
            return float(self.val)
        return Fraction(self.num, 1 if self.den is None else self.den)


class ScalarValue(_ScalarFields):
    """A rational ``{"num", "den"}`` or a float ``{"val"}``."""

    @model_serializer
    def _compact(self) -> Dict[str, Any]:
        return _scalar_dict(self.num, self.den, self.val)

    @classmethod
    def from_scalar(cls, x) -> "ScalarValue":
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            x = Fraction(int(x))
        return cls(**la.to_serializable(x))


class IndexedValue(_ScalarFields):
    """One nonzero entry of a sparse tensor, indices 1-based."""

    idx: List[int]

    @model_serializer
    def _compact(self) -> Dict[str, Any]:
        return {"idx": self.idx, **_scalar_dict(self.num, self.den, self.val)}

    @classmethod
    def at(cls, idx, x) -> "IndexedValue":
        return cls(idx=[int(i) + 1 for i in idx], **ScalarValue.from_scalar(x).model_dump())


Matrix = List[List[ScalarValue]]


def matrix_to_wire(a) -> Matrix:
    return [[ScalarValue.from_scalar(x) for x in row] for row in np.asarray(a)]


def matrix_from_wire(rows: Matrix, exact_mode: bool) -> np.ndarray:
    arr = np.array([[v.to_scalar() for v in row] for row in rows], dtype=object)
    return la.exact(arr) if exact_mode else la.as_float(arr)


def gram_from_wire(rows: Matrix, exact_mode: bool) -> np.ndarray:
    """A Gram matrix checked to be symmetric positive definite."""
    return EucSpace(len(rows), matrix_from_wire(rows, exact_mode)).gram


def _check_mode(mode: str, values) -> None:
    if mode == "exact" and any(v.val is not None for v in values):
        raise ValueError("float entry in an exact-mode payload")


# tensors


class AltFormSchema(BaseModel):
    dim: int = Field(..., ge=1)
    degree: int = Field(..., ge=0)
    mode: Mode = "exact"
    entries: List[IndexedValue] = []

    @model_validator(mode="after")
    def _indices(self):
        for n, entry in enumerate(self.entries):
            idx = entry.idx
            if len(idx) != self.degree:
                raise ValueError(f"entries[{n}]: {len(idx)} indices for a {self.degree}-form")
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise ValueError(f"entries[{n}]: indices {idx} are not strictly increasing")
            if idx and (idx[0] < 1 or idx[-1] > self.dim):
                raise ValueError(f"entries[{n}]: indices {idx} outside 1..{self.dim}")
        _check_mode(self.mode, self.entries)
        return self

    def to_form(self) -> AltForm:
        return AltForm(self.dim, self.degree, {tuple(i - 1 for i in e.idx): e.to_scalar() for e in self.entries},
                       self.mode)

    @classmethod
    def from_form(cls, alpha: AltForm) -> "AltFormSchema":
        return cls(dim=alpha.dim, degree=alpha.degree, mode=alpha.mode,
                   entries=[IndexedValue.at(k, c) for k, c in sorted(alpha.items())])


class SparseTensor(BaseModel):
    shape: List[int]
    entries: List[IndexedValue] = []

    @model_validator(mode="after")
    def _indices(self):
        for n, entry in enumerate(self.entries):
            if len(entry.idx) != len(self.shape) or any(not 1 <= i <= s for i, s in zip(entry.idx, self.shape)):
                raise ValueError(f"entries[{n}]: index {entry.idx} outside shape {self.shape}")
        return self

    def to_array(self, exact_mode: bool = True) -> np.ndarray:
        out = la.zeros(tuple(self.shape), exact_mode)
        for e in self.entries:
            x = e.to_scalar()
            out[tuple(i - 1 for i in e.idx)] = x if exact_mode else float(x)
        return out

    @classmethod
    def from_array(cls, arr) -> "SparseTensor":
        a = np.asarray(arr)
        return cls(shape=list(a.shape),
                   entries=[IndexedValue.at(idx, x) for idx, x in np.ndenumerate(a) if x != 0])


class LieSubalgebraSchema(BaseModel):
    dim: int = Field(..., ge=1)
    mode: Mode = "exact"
    basis: List[Matrix]
    gram: Optional[Matrix] = None

    @model_validator(mode="after")
    def _shapes(self):
        for n, m in enumerate(self.basis + ([self.gram] if self.gram is not None else [])):
            if len(m) != self.dim or any(len(row) != self.dim for row in m):
                raise ValueError(f"matrix {n} is not {self.dim}x{self.dim}")
            _check_mode(self.mode, [v for row in m for v in row])
        return self

    def to_algebra(self) -> LieSubalgebra:
        exact_mode = self.mode == "exact"
        gram = None if self.gram is None else gram_from_wire(self.gram, exact_mode)
        mats = [matrix_from_wire(m, exact_mode) for m in self.basis]
        return LieSubalgebra(self.dim, mats, gram if gram is not None else la.eye(self.dim, exact_mode))

    @classmethod
    def from_algebra(cls, g: LieSubalgebra) -> "LieSubalgebraSchema":
        return cls(dim=g.n, mode=g.mode, basis=[matrix_to_wire(b) for b in g.basis], gram=matrix_to_wire(g.gram))


class ReductiveModelSchema(BaseModel):
    """Bracket tables of h ⊕ m; ``rho`` has shape (dim h, dim m, dim m)."""

    name: str = ""
    mode: Mode = "exact"
    hh: SparseTensor
    rho: SparseTensor
    mmH: SparseTensor
    mmM: SparseTensor
    gram: Matrix

    def to_model(self) -> ReductiveModel:
        exact_mode = self.mode == "exact"
        rho = self.rho.to_array(exact_mode)
        return ReductiveModel(self.hh.to_array(exact_mode), list(rho), self.mmH.to_array(exact_mode),
                              self.mmM.to_array(exact_mode), gram_from_wire(self.gram, exact_mode), self.name)

    @classmethod
    def from_model(cls, model: ReductiveModel) -> "ReductiveModelSchema":
        dm = model.dim_m
        rho = np.array(model.rho) if model.rho else la.zeros((0, dm, dm), model.exact_mode)
        return cls(name=model.name, mode="exact" if model.exact_mode else "float",
                   hh=SparseTensor.from_array(model.hh), rho=SparseTensor.from_array(rho),
                   mmH=SparseTensor.from_array(model.mm_h), mmM=SparseTensor.from_array(model.mm_m),
                   gram=matrix_to_wire(model.gram))


class NomizuMapSchema(BaseModel):
    """Λ(X_i) stacked along the first axis."""

    name: str = ""
    mode: Mode = "exact"
    maps: SparseTensor

    def to_nomizu(self) -> NomizuMap:
        return NomizuMap(list(self.maps.to_array(self.mode == "exact")), self.name)

    @classmethod
    def from_nomizu(cls, lam: NomizuMap) -> "NomizuMapSchema":
        exact_mode = not lam.maps or la.is_exact(lam.maps[0])
        return cls(name=lam.name, mode="exact" if exact_mode else "float",
                   maps=SparseTensor.from_array(np.array(lam.maps)))


def tensor_to_wire(value) -> Any:
    """JSON form of anything a model bundle carries."""
    if isinstance(value, AltForm):
        return AltFormSchema.from_form(value).model_dump()
    if isinstance(value, CurvOperator):
        return SparseTensor.from_array(value.arr).model_dump()
    if isinstance(value, LieSubalgebra):
        return LieSubalgebraSchema.from_algebra(value).model_dump()
    if isinstance(value, NomizuMap):
        return NomizuMapSchema.from_nomizu(value).model_dump()
    if isinstance(value, ReductiveModel):
        return ReductiveModelSchema.from_model(value).model_dump()
    if isinstance(value, np.ndarray):
        return SparseTensor.from_array(value).model_dump()
    if isinstance(value, (list, tuple)):
        return [tensor_to_wire(v) for v in value]
    if isinstance(value, (Fraction, float, int, np.floating, np.integer)) and not isinstance(value, bool):
        return ScalarValue.from_scalar(value).model_dump()
    return value


# reports


class CitationSchema(BaseModel):
    """Topic heading and quoted statement a check verifies."""

    ref: str
    section: str
    quote: str


class CheckResultSchema(BaseModel):
    id: str
    suite: str
    status: Literal["pass", "fail", "skip"]
    residual: Optional[ScalarValue] = None
    tol: Optional[float] = None
    anchor: CitationSchema
    model: Optional[str] = None
    expected: Optional[str] = None
    observed: Optional[str] = None
    detail: str = ""

    @classmethod
    def from_result(cls, result) -> "CheckResultSchema":
        residual = None if result.residual is None else ScalarValue.from_scalar(result.residual)
        return cls(id=result.id, suite=result.suite, status=result.status, residual=residual, tol=result.tol,
                   anchor=CitationSchema(ref=result.anchor.ref, section=result.anchor.section,
                                         quote=result.anchor.quote),
                   model=result.model, expected=result.expected,
                   observed=result.observed, detail=result.detail)


class SuiteReportSchema(BaseModel):
    suite: str
    seed: int
    mode: Mode
    tol: Optional[float] = None
    version: str
    passed: int
    failed: int
    skipped: int
    checks: List[CheckResultSchema]
    cached: bool = False
    processingTime: Optional[float] = None

    @classmethod
    def from_report(cls, report) -> "SuiteReportSchema":
        return cls(suite=report.suite, seed=report.seed, mode=report.mode, tol=report.tol, version=report.version,
                   passed=report.passed, failed=report.failed, skipped=report.skipped,
                   checks=[CheckResultSchema.from_result(c) for c in report.checks])


class SuiteSummary(BaseModel):
    name: str
    checks: int


class ModelBundleSchema(BaseModel):
    name: str
    dim: int
    mode: Mode
    params: Dict[str, Any] = {}
    model: Optional[ReductiveModelSchema] = None
    tau: AltFormSchema
    tensors: Dict[str, Any] = {}
    notes: List[str] = []

    @classmethod
    def from_bundle(cls, bundle) -> "ModelBundleSchema":
        return cls(
            name=bundle.name,
            dim=bundle.dim,
            mode="exact" if bundle.exact_mode else "float",
            params={k: tensor_to_wire(v) for k, v in bundle.params.items()},
            model=None if bundle.model is None else ReductiveModelSchema.from_model(bundle.model),
            tau=AltFormSchema.from_form(bundle.tau),
            tensors={k: tensor_to_wire(v) for k, v in bundle.tensors.items()},
            notes=list(bundle.notes),
        )


class ModelSummary(BaseModel):
    name: str
    params: List[str]
    description: str


class Listing(BaseModel):
    suites: Dict[str, int]
    models: List[str]


# algebra requests


class StabilizerRequest(BaseModel):
    form: AltFormSchema
    gram: Optional[Matrix] = None

    @model_validator(mode="after")
    def _gram_shape(self):
        n = self.form.dim
        if self.gram is not None and (len(self.gram) != n or any(len(row) != n for row in self.gram)):
            raise ValueError(f"gram is not {n}x{n}")
        return self


class DecomposeRequest(BaseModel):
    algebra: LieSubalgebraSchema
    seed: Optional[int] = None


class HolonomyRequest(BaseModel):
    model: ReductiveModelSchema
    nomizu: Optional[NomizuMapSchema] = None


class AlgebraResponse(BaseModel):
    dimension: int
    algebra: LieSubalgebraSchema
    cached: bool = False
    processingTime: Optional[float] = None


class DecompositionResponse(BaseModel):
    dims: List[int]
    irreducible: List[bool]
    isotypic: List[List[int]]
    commutantDims: List[int]
    blocks: List[Matrix]
    seed: int
    processingTime: Optional[float] = None


class HolonomyResponse(BaseModel):
    dimension: int
    holonomy: LieSubalgebraSchema
    metric: bool
    torsionForm: Optional[AltFormSchema] = None
    processingTime: Optional[float] = None
