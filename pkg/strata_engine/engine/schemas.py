import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class Report(BaseModel):
    """Base for every JSON report; serialization is deterministic."""

    model_config = ConfigDict(populate_by_name=True)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True, mode="json")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


class BettiReport(Report):
    lam: Optional[str] = Field(None, alias="lambda", description="Leaf partition lambda, if the space is X_{lambda,mu}.")
    family: Optional[str] = Field(None, description="Family Lambda, if the space is X_{Lambda,mu}.")
    mu: str = Field(..., description="Root partition mu.")
    f_vector: List[int] = Field(..., description="Cell counts per dimension.")
    betti: Dict[str, int] = Field(..., description="Reduced Betti numbers from -1 up to the top dimension.")
    euler: int = Field(..., description="Euler characteristic from the f-vector.")
    empty: bool = Field(False, description="The space is empty (beta_{-1} = 1).")


class DimensionComparison(Report):
    dim: int
    oracle_cells: int = Field(..., description="Orbits of dim-chains in the open interval.")
    forest_cells: int = Field(..., description="Forests of rank dim.")
    injective: bool
    surjective: bool
    faces_match: bool = Field(..., description="psi(face_i(cell)) = delete_level(psi(cell), i) for every oracle cell.")
    unmatched_forests: List[str] = Field(default_factory=list, description="Forests with no oracle preimage.")
    psi_collisions: List[str] = Field(default_factory=list, description="Forests hit by two distinct orbits.")


class OracleReport(Report):
    lam: str = Field(..., alias="lambda")
    mu: str
    n: int
    pi: Optional[str] = Field(None, description="Representative set partition of type mu, if reachable.")
    reachable: bool = Field(..., description="Some join of type-lambda set partitions has type mu.")
    dimensions: List[DimensionComparison] = Field(default_factory=list)
    bijective: bool
    oracle_betti: Dict[str, int]
    forest_betti: Dict[str, int]
    betti_equal: bool


class CollapseCertificate(Report):
    family: str
    mu: str
    k: int
    cells: int = Field(..., description="Cells of X_{Lambda,mu}.")
    matched: int = Field(..., description="Matched pairs (aleph matching plus cone matching of K).")
    critical: int = Field(..., description="Unmatched cells; 1 for a collapsible space.")
    K: Literal["simplex", "cone"]
    apex: str = Field(..., description="Critical vertex, in forest text form.")
    special_cells: int = Field(..., description="Cells of the subcomplex K.")
    acyclic: bool
    betti_zero: bool
    order: Optional[List[List[str]]] = Field(None, description="Elementary collapses, lower and upper cell.")


class ConeCertificate(Report):
    lam: str = Field(..., alias="lambda")
    mu: str
    apex: str
    cells: int
    matched: int
    critical: int
    cone: bool
    acyclic: bool
    betti_zero: bool


class Beta0Report(Report):
    lam: str = Field(..., alias="lambda")
    mu: str
    beta0_x: int = Field(..., description="Connected components of the forest model.")
    beta0_p: int = Field(..., description="Connected components of the comparability graph of P_{lambda,mu}.")
    p_elements: int
    equal: bool


class SigmaTerm(Report):
    mu: str
    shift: int = Field(..., description="2 l(mu) + 1")
    reachable: bool
    assumed: bool = Field(False, description="Reachability assumed above the oracle guard.")
    x_betti: Dict[str, int] = Field(default_factory=dict)


class SigmaReport(Report):
    lam: str = Field(..., alias="lambda")
    n: int
    source: Literal["forests", "oracle"] = "forests"
    terms: List[SigmaTerm]
    betti: Dict[str, int] = Field(..., description="Reduced Betti numbers of Sigma_lambda (nonzero entries).")
    assumed_reachable: bool = Field(False, description="Some mu was assumed reachable without the oracle.")
    vanishing_ok: bool


class ArnoldReport(Report):
    n_max: int
    cases: int
    deviations: List[str] = Field(default_factory=list)
    passed: bool


class PPosetReport(Report):
    lam: str = Field(..., alias="lambda")
    mu: str
    elements: int
    relations: int = Field(..., description="Comparable pairs.")
    components: int
    component_sizes: List[int]
    element_list: Optional[List[str]] = None
    component_list: Optional[List[List[str]]] = None


class CounterexampleReport(Report):
    lam: str = Field(..., alias="lambda")
    mu: str
    n: int
    p_elements: int
    beta0_p: int
    beta0_x: int
    x_f_vector: List[int]
    equal: bool
    disconnected: bool


class SweepReport(Report):
    command: str
    n: int
    count: int
    items: List[Dict[str, Any]] = Field(default_factory=list)
