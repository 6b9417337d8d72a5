from typing_extensions import Any, Literal, NotRequired, TypedDict


class ComplexNumber(TypedDict):
    re: float
    im: float


ComplexMatrix = list[list[ComplexNumber]]


class TensorEntry(TypedDict):
    i: int
    j: int
    alpha: int
    beta: int
    re: float
    im: float


class MpoTensorFile(TypedDict):
    name: str
    d_out: int
    d_in: int
    bond: int
    entries: list[TensorEntry]


class StructureEntry(TypedDict):
    i: int
    j: int
    k: int
    re: float
    im: float


class StarSpec(TypedDict):
    matrix: ComplexMatrix
    conjugate: bool


PreBialgebraFile = TypedDict(
    "PreBialgebraFile",
    {
        "dim": int,
        "basis": list[str],
        "lambda": list[StructureEntry],
        "coLambda": NotRequired[list[StructureEntry]],
        "unit": NotRequired[list[ComplexNumber]],
        "counit": NotRequired[list[ComplexNumber]],
        "star": NotRequired[StarSpec],
        "adjoinedUnit": NotRequired[bool],
    },
)


class GroupFile(TypedDict):
    order: int
    mult: list[list[int]]
    labels: NotRequired[list[str]]


class CocycleEntry(TypedDict):
    g: int
    h: int
    k: int
    re: float
    im: float


class CocycleFile(TypedDict):
    values: list[CocycleEntry]
    normalized: bool


class FamilyFile(TypedDict):
    name: str
    group: GroupFile
    tensors: dict[str, MpoTensorFile]
    boundary: dict[str, list[list[int]]]


class FusionSolutionFile(TypedDict):
    a: int
    b: int
    c: int
    X: NotRequired[ComplexMatrix]
    X_inv: NotRequired[ComplexMatrix]
    Y: ComplexMatrix
    Y_rinv: ComplexMatrix
    hinted: bool


class FusionFile(TypedDict):
    family: str
    solutions: list[FusionSolutionFile]


class AssociatorEntry(TypedDict):
    a: int
    b: int
    c: int
    re: float
    im: float
    residual: NotRequired[float]


class AssociatorFile(TypedDict):
    omega: list[AssociatorEntry]
    normalized: NotRequired[list[AssociatorEntry]]
    cohomology_class: str
    class_index: int


class RepresentationFile(TypedDict):
    label: str
    dim: int
    matrices: list[ComplexMatrix]


class CatalogFile(TypedDict):
    modules: list[RepresentationFile]


class CheckResult(TypedDict):
    name: str
    status: Literal["pass", "fail", "error"]
    residual: float | None
    citation: str
    detail: NotRequired[str]


class Report(TypedDict):
    command: str
    config: dict[str, Any]
    checks: list[CheckResult]
    artifacts: list[str]
    data: NotRequired[dict[str, Any]]
