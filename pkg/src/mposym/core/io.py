"""JSON codecs for tensors, algebras, groups, cocycles, fusion data and representations.

Complex numbers are {"re", "im"} objects; values within 1e-15 of a multiple of
1/2 are written exactly. Multiway arrays are written as sparse entry lists.
"""

import json
import logging
from pathlib import Path

import numpy as np

from mposym.algebra.mpo_algebra import AssociatorTable, FusionSolution, MpoFamily
from mposym.algebra.prebialgebra import PreBialgebra
from mposym.algebra.rep_theory import Representation
from mposym.core.tensor import MpoTensor
from mposym.errors import InputError, ShapeError
from mposym.groups import FiniteGroup
from mposym.schemas import (
    AssociatorFile,
    CatalogFile,
    CocycleFile,
    ComplexMatrix,
    ComplexNumber,
    FamilyFile,
    FusionFile,
    FusionSolutionFile,
    GroupFile,
    MpoTensorFile,
    PreBialgebraFile,
    RepresentationFile,
    StructureEntry,
)

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-15


def _exact(x: float) -> float:
    half = round(2 * x) / 2
    return half if abs(x - half) <= EXACT_TOL else float(x)


def complex_to_json(z: complex) -> ComplexNumber:
    z = complex(z)
    return {"re": _exact(z.real), "im": _exact(z.imag)}


def complex_from_json(value: ComplexNumber) -> complex:
    try:
        return complex(float(value["re"]), float(value["im"]))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"not a complex number: {value!r}") from e


def matrix_to_json(M: np.ndarray) -> ComplexMatrix:
    return [[complex_to_json(z) for z in row] for row in np.asarray(M)]


def matrix_from_json(rows: ComplexMatrix) -> np.ndarray:
    M = np.array([[complex_from_json(z) for z in row] for row in rows], dtype=complex)
    if M.ndim != 2:
        raise InputError("matrix rows have unequal lengths")
    return M


def _structure_entries(T: np.ndarray) -> list[StructureEntry]:
    return [
        {"i": int(i), "j": int(j), "k": int(k), **complex_to_json(T[i, j, k])}
        for i, j, k in np.argwhere(np.abs(T) > 0)
    ]


def _structure_from_entries(entries: list[StructureEntry], n: int, what: str) -> np.ndarray:
    T = np.zeros((n, n, n), dtype=complex)
    for entry in entries:
        try:
            index = (int(entry["i"]), int(entry["j"]), int(entry["k"]))
        except KeyError as e:
            raise InputError(f"{what} entry misses index {e}") from e
        if min(index) < 0 or max(index) >= n:
            raise InputError(f"{what} entry {index} outside dimension {n}")
        T[index] += complex_from_json(entry)
    return T


def tensor_to_json(A: MpoTensor) -> MpoTensorFile:
    entries = [
        {"i": int(i), "j": int(j), "alpha": int(a), "beta": int(b), **complex_to_json(A.data[i, j, a, b])}
        for i, j, a, b in np.argwhere(np.abs(A.data) > 0)
    ]
    return {"name": A.name, "d_out": A.d_out, "d_in": A.d_in, "bond": A.bond, "entries": entries}


def tensor_from_json(data: MpoTensorFile) -> MpoTensor:
    try:
        shape = (int(data["d_out"]), int(data["d_in"]), int(data["bond"]), int(data["bond"]))
        A = np.zeros(shape, dtype=complex)
        for e in data["entries"]:
            index = (int(e["i"]), int(e["j"]), int(e["alpha"]), int(e["beta"]))
            if any(x < 0 or x >= n for x, n in zip(index, shape)):
                raise InputError(f"MPO tensor entry {index} outside shape {shape}")
            A[index] += complex_from_json(e)
    except (KeyError, IndexError, TypeError, ValueError) as e:
        raise InputError(f"malformed MPO tensor: {e}") from e
    return MpoTensor(A, name=data.get("name", ""))


def prebialgebra_to_json(P: PreBialgebra) -> PreBialgebraFile:
    out: PreBialgebraFile = {"dim": P.dim, "basis": list(P.labels), "lambda": _structure_entries(P.lam)}
    if P.delta is not None:
        out["coLambda"] = _structure_entries(P.delta)
    if P.unit is not None:
        out["unit"] = [complex_to_json(z) for z in P.unit]
    if P.counit is not None:
        out["counit"] = [complex_to_json(z) for z in P.counit]
    if P.star is not None:
        out["star"] = {"matrix": matrix_to_json(P.star), "conjugate": True}
    if P.adjoined_unit:
        out["adjoinedUnit"] = True
    return out


def prebialgebra_from_json(data: PreBialgebraFile) -> PreBialgebra:
    try:
        n = int(data["dim"])
        lam = _structure_from_entries(data["lambda"], n, "lambda")
    except KeyError as e:
        raise InputError(f"pre-bialgebra file misses {e}") from e
    delta = _structure_from_entries(data["coLambda"], n, "coLambda") if "coLambda" in data else None
    unit = np.array([complex_from_json(z) for z in data["unit"]]) if "unit" in data else None
    counit = np.array([complex_from_json(z) for z in data["counit"]]) if "counit" in data else None
    star = None
    if "star" in data:
        if not data["star"].get("conjugate", True):
            raise InputError("only antilinear star operations are supported")
        star = matrix_from_json(data["star"]["matrix"])
    return PreBialgebra(
        lam=lam,
        delta=delta,
        labels=tuple(data.get("basis", ())),
        unit=unit,
        counit=counit,
        star=star,
        adjoined_unit=bool(data.get("adjoinedUnit", False)),
    )


def group_to_json(G: FiniteGroup) -> GroupFile:
    return {"order": G.order, "mult": G.mult.tolist(), "labels": list(G.labels)}


def group_from_json(data: GroupFile) -> FiniteGroup:
    try:
        G = FiniteGroup(np.array(data["mult"], dtype=int), tuple(data.get("labels", ())))
    except KeyError as e:
        raise InputError(f"group file misses {e}") from e
    if "order" in data and G.order != int(data["order"]):
        raise InputError(f"declared order {data['order']} but table has order {G.order}")
    return G


def cocycle_to_json(values: np.ndarray, normalized: bool) -> CocycleFile:
    entries = [
        {"g": int(g), "h": int(h), "k": int(k), **complex_to_json(values[g, h, k])}
        for g, h, k in np.ndindex(values.shape)
    ]
    return {"values": entries, "normalized": bool(normalized)}


def cocycle_values_from_json(data: CocycleFile, group: FiniteGroup) -> np.ndarray:
    """Dense w(g, h, k); missing triples default to 1."""
    n = group.order
    values = np.ones((n, n, n), dtype=complex)
    try:
        for e in data["values"]:
            values[e["g"], e["h"], e["k"]] = complex_from_json(e)
    except (KeyError, IndexError) as e:
        raise InputError(f"malformed cocycle file: {e}") from e
    return values


def family_to_json(family: MpoFamily) -> FamilyFile:
    return {
        "name": family.name,
        "group": group_to_json(family.group),
        "tensors": {str(a): tensor_to_json(A) for a, A in family.tensors.items()},
        "boundary": {str(a): [list(p) for p in pairs] for a, pairs in family.boundary.items()},
    }


def family_from_json(data: FamilyFile) -> MpoFamily:
    try:
        group = group_from_json(data["group"])
        tensors = {int(a): tensor_from_json(t) for a, t in data["tensors"].items()}
        boundary = {int(a): [(int(m), int(n)) for m, n in pairs] for a, pairs in data["boundary"].items()}
    except (KeyError, ValueError) as e:
        raise InputError(f"malformed family file: {e}") from e
    return MpoFamily(group, tensors, boundary, name=data.get("name", ""))


def fusions_to_json(family: str, fusions: dict[tuple[int, int], FusionSolution]) -> FusionFile:
    solutions: list[FusionSolutionFile] = []
    for sol in fusions.values():
        entry: FusionSolutionFile = {
            "a": sol.a,
            "b": sol.b,
            "c": sol.c,
            "Y": matrix_to_json(sol.Y),
            "Y_rinv": matrix_to_json(sol.Y_rinv),
            "hinted": sol.hinted,
        }
        if sol.X is not None:
            entry["X"] = matrix_to_json(sol.X)
            entry["X_inv"] = matrix_to_json(sol.X_inv)
        solutions.append(entry)
    return {"family": family, "solutions": solutions}


def fusion_hints_from_json(data: FusionFile) -> dict[tuple[int, int], np.ndarray]:
    """Square X matrices, usable as solver hints."""
    hints = {}
    for sol in data.get("solutions", []):
        if "X" in sol:
            hints[(int(sol["a"]), int(sol["b"]))] = matrix_from_json(sol["X"])
    return hints


def fusions_from_json(data: FusionFile, family: MpoFamily | None = None) -> dict[tuple[int, int], FusionSolution]:
    """Fusion solutions written by ``fusions_to_json``, checked against ``family`` when given."""
    fusions = {}
    try:
        for sol in data["solutions"]:
            a, b, c = int(sol["a"]), int(sol["b"]), int(sol["c"])
            X = matrix_from_json(sol["X"]) if "X" in sol else None
            X_inv = matrix_from_json(sol["X_inv"]) if "X_inv" in sol else None
            fusions[(a, b)] = FusionSolution(
                a=a,
                b=b,
                c=c,
                Y=matrix_from_json(sol["Y"]),
                Y_rinv=matrix_from_json(sol["Y_rinv"]),
                X=X,
                X_inv=X_inv,
                hinted=bool(sol.get("hinted", False)),
            )
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed fusion file: {e}") from e
    if family is None:
        return fusions

    G = family.group
    missing = [(a, b) for a in range(G.order) for b in range(G.order) if (a, b) not in fusions]
    if missing:
        raise InputError(f"fusion file lacks the pairs {missing}")
    for (a, b), sol in fusions.items():
        if sol.c != G.mul(a, b):
            raise InputError(f"fusion ({a},{b}) targets {sol.c}, expected {G.mul(a, b)}")
        Dab = family.tensors[a].bond * family.tensors[b].bond
        Dc = family.tensors[sol.c].bond
        if sol.Y.shape != (Dc, Dab) or sol.Y_rinv.shape != (Dab, Dc):
            raise ShapeError(f"fusion ({a},{b}) has Y {sol.Y.shape}, expected {(Dc, Dab)}")
    return fusions


def catalog_from_json(data: CatalogFile, algebra: PreBialgebra) -> list[Representation]:
    """Reference modules listed under ``modules``."""
    try:
        modules = data["modules"]
    except (KeyError, TypeError) as e:
        raise InputError(f"malformed catalog file: {e}") from e
    return [representation_from_json(m, algebra) for m in modules]


def associator_to_json(table: AssociatorTable) -> AssociatorFile:
    return {
        "omega": [
            {"a": a, "b": b, "c": c, **complex_to_json(w), "residual": table.residuals.get((a, b, c), 0.0)}
            for (a, b, c), w in sorted(table.omega.items())
        ],
        "normalized": [{"a": a, "b": b, "c": c, **complex_to_json(w)} for (a, b, c), w in sorted(table.normalized.items())],
        "cohomology_class": table.cohomology_class,
        "class_index": table.class_index,
    }


def representation_to_json(rep: Representation) -> RepresentationFile:
    return {"label": rep.name, "dim": rep.dim, "matrices": [matrix_to_json(m) for m in rep.matrices]}


def representation_from_json(data: RepresentationFile, algebra: PreBialgebra) -> Representation:
    try:
        mats = np.stack([matrix_from_json(m) for m in data["matrices"]])
    except (KeyError, ValueError) as e:
        raise InputError(f"malformed representation file: {e}") from e
    return Representation(algebra, mats, name=data.get("label", ""))


def load_json(path: Path) -> dict:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise InputError(f"File not found: {path}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"Invalid JSON in {path}: {e}") from e


def write_json(data: dict, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, indent=2)
    logger.info(f"wrote {path}")
