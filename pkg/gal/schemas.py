"""All Pydantic models"""

from fractions import Fraction
from typing import Annotated, Literal, Optional, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PlainSerializer,
    PlainValidator,
    TypeAdapter,
    WithJsonSchema,
    model_validator,
)

from gal.exact_arith import format_rational, parse_rational

RationalStr = Annotated[
    Fraction,
    PlainValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
    WithJsonSchema({"type": "string", "pattern": r"^-?\d+(/\d+)?$"}),
]

LawName = Literal[
    "witt-commutator",
    "jacobi",
    "anti-pre-lie",
    "pre-lie",
    "right-commutative",
    "novikov",
    "admissible-novikov",
    "module-axiom",
    "virasoro-central",
]


class TableEntry(BaseModel):
    m: int = Field(description="Index of the left factor W_m")
    n: int = Field(description="Index of the right factor W_n")
    value: RationalStr = Field(description="Coefficient of W_{m+n} in W_m∘W_n")


class SymbolicStructureSpec(BaseModel):
    kind: Literal["symbolic"] = "symbolic"
    expr: str = Field(description="Polynomial in n (left index), m (right index) and parameters")
    params: dict[str, RationalStr] = Field(default_factory=dict, description="Parameter bindings")
    formal: list[str] = Field(default_factory=list, description="Parameters left as indeterminates")


class TableStructureSpec(BaseModel):
    kind: Literal["table"] = "table"
    window: int = Field(description="Window radius N", gt=0)
    entries: list[TableEntry] = Field(default_factory=list, description="Values on every in-window pair")


StructureSpec = Annotated[Union[SymbolicStructureSpec, TableStructureSpec], Field(discriminator="kind")]
STRUCTURE_ADAPTER = TypeAdapter(StructureSpec)


class Violation(BaseModel):
    m: Optional[int] = None
    n: Optional[int] = None
    l: Optional[int] = None
    i: Optional[int] = None
    residual: RationalStr = Field(description="Nonzero residual of the equation instance")
    clause: Optional[str] = Field(default=None, description="Which equation of a combined law failed")


class LawReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    law: LawName
    window: int = Field(gt=0)
    checked: int = Field(default=0, ge=0, description="Equation instances evaluated on the window")
    skipped: int = Field(default=0, ge=0, description="Instances with an index outside the window")
    violations: list[Violation] = Field(default_factory=list)
    symbolic_residuals: Optional[list[str]] = Field(default=None, description="Canonical residual polynomials, when checked symbolically")
    passed: bool = Field(default=True, alias="pass")

    @model_validator(mode="after")
    def pass_matches_residuals(self):
        symbolic_clean = all(r == "0" for r in (self.symbolic_residuals or []))
        if self.passed != (not self.violations and symbolic_clean):
            raise ValueError("pass must hold exactly when there are no violations and all symbolic residuals are zero")
        return self


class FitResult(BaseModel):
    window: int
    gamma: Optional[RationalStr] = Field(default=None, description="Fitted family parameter")
    mismatch: Optional[Violation] = Field(default=None, description="First pair off the family line")


class IsoResult(BaseModel):
    window: int
    isomorphic: bool
    epsilon: Optional[Literal[1, -1]] = None


class DiagnosticsReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    window: int
    specializations: dict[str, list[Violation]] = Field(description="Nonzero residuals of each specialised identity")
    zero_indices: list[int] = Field(description="Window indices with φ(m,0) = 0")
    affine_indices: list[int] = Field(description="Window indices with φ(m,0) + 2m = φ(0,0)")
    passed: bool = Field(alias="pass")


class QTransformResult(BaseModel):
    direction: Literal["to_admissible", "to_novikov"]
    structure: StructureSpec
    window: int
    laws: dict[str, bool] = Field(description="Laws the transformed candidate passes on the window")


class FamilyModuleSpec(BaseModel):
    kind: Literal["family"] = "family"
    family: Literal["valpha", "vbeta", "valphabeta"]
    alpha: Optional[RationalStr] = None
    beta: Optional[RationalStr] = None

    @model_validator(mode="after")
    def parameters_present(self):
        needs = {"valpha": ("alpha",), "vbeta": ("beta",), "valphabeta": ("alpha", "beta")}[self.family]
        missing = [name for name in needs if getattr(self, name) is None]
        if missing:
            raise ValueError(f"family {self.family} requires {', '.join(missing)}")
        return self


class VAlphaModuleSpec(BaseModel):
    kind: Literal["valpha"] = "valpha"
    alpha: RationalStr


class VBetaModuleSpec(BaseModel):
    kind: Literal["vbeta"] = "vbeta"
    beta: RationalStr


class VAlphaBetaModuleSpec(BaseModel):
    kind: Literal["valphabeta"] = "valphabeta"
    alpha: RationalStr
    beta: RationalStr


class FromStructureModuleSpec(BaseModel):
    kind: Literal["from-structure"] = "from-structure"
    structure: StructureSpec


class ModuleTableEntry(BaseModel):
    m: int = Field(description="Index of the acting W_m")
    i: int = Field(description="Index of the basis vector v_i")
    value: RationalStr = Field(description="a(m,i) in W_m·v_i = a(m,i)v_{m+i}")


class TableModuleSpec(BaseModel):
    kind: Literal["table"] = "table"
    window: int = Field(gt=0)
    entries: list[ModuleTableEntry] = Field(default_factory=list, description="Nonzero coefficients; absent entries are zero")


ModuleSpec = Annotated[
    Union[
        FamilyModuleSpec,
        VAlphaModuleSpec,
        VBetaModuleSpec,
        VAlphaBetaModuleSpec,
        FromStructureModuleSpec,
        TableModuleSpec,
    ],
    Field(discriminator="kind"),
]
MODULE_ADAPTER = TypeAdapter(ModuleSpec)


class ModuleCheckResult(BaseModel):
    report: LawReport
    weights: dict[int, RationalStr] = Field(description="Weight a(0,i) of each in-window basis vector")


class IndecomposabilityReport(BaseModel):
    window: int
    indecomposable: bool
    components: list[list[int]] = Field(description="Connected components of the action graph, sorted")


class IntertwinerInfeasibility(BaseModel):
    reason: Literal["no-shift", "inconsistent", "forced-zero"]
    m: Optional[int] = Field(default=None, description="Acting index of the violated instance")
    i: Optional[int] = Field(default=None, description="Source index of the violated instance")
    index: Optional[int] = Field(default=None, description="Coefficient index that the instance constrains")
    expected: Optional[RationalStr] = Field(default=None, description="Value already fixed for c_index")
    found: Optional[RationalStr] = Field(default=None, description="Value the instance demands")


class IntertwinerWitness(BaseModel):
    window: int
    found: bool
    k: Optional[int] = Field(default=None, description="Shift with u_i -> c_i v_{i+k}")
    coefficients: Optional[dict[int, RationalStr]] = None
    free: list[int] = Field(default_factory=list, description="Indices whose coefficient was left free and set to 1")
    infeasible: Optional[IntertwinerInfeasibility] = None


class SearchLog(BaseModel):
    branches: int = 0
    pruned: int = 0


class ParametricSolution(BaseModel):
    free_parameters: list[str]
    relations: list[str] = Field(default_factory=list, description="Polynomial relations left among the free parameters")
    expr: str = Field(description="φ(m,n) in terms of the free parameters")


class SolveOutcome(BaseModel):
    mode: Literal["ansatz", "table"]
    status: Literal["complete", "underdetermined", "budget-exceeded"]
    solutions: list[StructureSpec] = Field(default_factory=list)
    parametric: list[ParametricSolution] = Field(default_factory=list)
    search_log: SearchLog = Field(default_factory=SearchLog)
    frontier: Optional[list[str]] = Field(default=None, description="Unresolved unknowns when the search stopped short")
    unique_from_window: Optional[int] = Field(default=None, description="Smallest radius with exactly one table")


class CentralRow(BaseModel):
    eq: Literal["cocycle", "associator", "zero-mode"]
    m: int
    n: Optional[int] = None
    coef: RationalStr


class CentralCertificate(BaseModel):
    rows: list[CentralRow]
    contradiction: RationalStr
    trace: list[str] = Field(default_factory=list, description="Pivot choices of the elimination")


class CentralSolveResult(BaseModel):
    gamma: RationalStr
    window: int
    feasible: bool
    psi: Optional[dict[int, RationalStr]] = None
    certificate: Optional[CentralCertificate] = None
