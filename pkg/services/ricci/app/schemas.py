import math
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator


# Rewiring configuration
class RewireMethod(str, Enum):
    PIORF = "piorf"
    DIGL = "digl"
    SDRF = "sdrf"
    FOSR = "fosr"
    BORF = "borf"


class FormerSelector(str, Enum):
    """How rewiring sources are chosen."""
    ORC = "orc"
    DEGREE = "degree"
    RANDOM = "random"
    FORMAN = "forman"
    BETWEENNESS = "betweenness"


class LatterSelector(str, Enum):
    """Which node field picks the target of each source."""
    VELOCITY = "velocity"
    PRESSURE = "pressure"
    DENSITY = "density"
    RANDOM = "random"


class RewireAction(str, Enum):
    ADD = "add"
    REMOVE = "remove"
    BOTH = "both"


class EdgeDirection(str, Enum):
    BIDIRECTIONAL = "bidirectional"
    TO_SENDERS = "to_senders"
    TO_RECEIVERS = "to_receivers"


class TrajectoryMode(str, Enum):
    PER_FRAME = "per_frame"
    FIRST_FRAME = "first_frame"


class DiglParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    alpha: float = Field(0.01, gt=0.0, le=1.0, description="Teleport probability")
    eps: float = Field(0.4, ge=0.0, description="Diffusion threshold for new pairs")


class SdrfParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    max_iterations: int = Field(10, ge=1)


class FosrParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    initial_power: int = Field(5, ge=0, description="Power-iteration rounds before the first addition")
    max_iterations: int = Field(20, ge=1)


class BorfParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    batches: int = Field(10, ge=1)
    add_per_batch: int = Field(4, ge=0)
    remove_per_batch: int = Field(2, ge=0)


PARAMS_BY_METHOD = {
    RewireMethod.DIGL: DiglParams,
    RewireMethod.SDRF: SdrfParams,
    RewireMethod.FOSR: FosrParams,
    RewireMethod.BORF: BorfParams,
}

MethodParams = Union[DiglParams, SdrfParams, FosrParams, BorfParams]


class RewireConfig(BaseModel):
    """Settings for one rewiring run."""
    model_config = ConfigDict(frozen=True)

    method: RewireMethod = RewireMethod.PIORF
    pooling_ratio: float = Field(0.03, description="Fraction of nodes used as rewiring sources")
    former_selector: FormerSelector = FormerSelector.ORC
    latter_selector: LatterSelector = LatterSelector.VELOCITY
    action: RewireAction = RewireAction.ADD
    direction: EdgeDirection = EdgeDirection.BIDIRECTIONAL
    weighted: bool = False
    seed: int = Field(0, ge=0, le=2**64 - 1)
    method_params: Dict[str, Union[int, float]] = Field(default_factory=dict)
    budget_seconds: Optional[float] = Field(None, gt=0.0, description="Wall-time budget for iterative methods")

    @model_validator(mode="after")
    def check_method_fields(self):
        if self.method == RewireMethod.PIORF:
            if not 0.0 < self.pooling_ratio < 1.0:
                raise ValueError(f"pooling_ratio must lie strictly inside (0, 1), got {self.pooling_ratio}")
            if self.method_params:
                raise ValueError("piorf takes no method_params")
        else:
            try:
                self.resolved_params()
            except ValidationError as e:
                raise ValueError(f"invalid {self.method.value} parameters: {e}") from e
        return self

    def resolved_params(self) -> Optional[MethodParams]:
        params = PARAMS_BY_METHOD.get(self.method)
        if params is None:
            return None
        return params(**self.method_params)

    def source_count(self, node_count: int) -> int:
        # tolerance keeps decimal ratios such as 0.29 * 100 from flooring low
        return int(math.floor(self.pooling_ratio * node_count + 1e-9))


# Mesh generation
class Obstacle(BaseModel):
    model_config = ConfigDict(frozen=True)

    center_x: float
    center_y: float
    radius: float = Field(..., gt=0.0)


class MeshSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    nx: int = Field(40, ge=2, description="Cells along x")
    ny: int = Field(16, ge=2, description="Cells along y")
    domain: Tuple[float, float, float, float] = Field(
        (0.0, 2.5, 0.0, 1.0), description="x_min, x_max, y_min, y_max"
    )
    obstacle: Optional[Obstacle] = None
    refine_radius: Optional[float] = Field(None, ge=0.0)
    inflow_speed: float = Field(1.0, description="Free-stream speed U")
    frames: int = Field(1, ge=1)
    time_step: float = Field(0.01, gt=0.0)

    @field_validator("domain")
    @classmethod
    def check_domain(cls, value):
        x_min, x_max, y_min, y_max = value
        if not (x_max > x_min and y_max > y_min):
            raise ValueError("domain must satisfy x_min < x_max and y_min < y_max")
        return value


# Curvature and diagnostics reports
class CurvatureSummary(BaseModel):
    frame: int
    weighted: bool
    node_count: int
    edge_count: int
    min: Optional[float] = None
    p01: Optional[float] = None
    mean: Optional[float] = None


class Histogram(BaseModel):
    bin_edges: List[float]
    counts: List[int]


class DiagnosticsReport(BaseModel):
    node_count: int
    edge_count: int
    connected: bool
    component_count: int
    total_effective_resistance: Optional[float] = Field(None, description="Sum of R(u, v) over node pairs")
    curvature_histogram: Histogram
    degree_histogram: Dict[int, int]
    orc_degree_pearson: Optional[float] = None
    min_edge_curvature: Optional[float] = None
    p01_edge_curvature: Optional[float] = None
    mean_edge_curvature: Optional[float] = None
    high_degree_count: int = 0
    mean_velocity_gradient: float = 0.0


class ComparisonReport(BaseModel):
    before: DiagnosticsReport
    after: DiagnosticsReport
    deltas: Dict[str, Optional[float]]


class SourceProfile(BaseModel):
    source_count: int
    source_mean_gamma: Optional[float] = None
    graph_mean_gamma: Optional[float] = None
    source_mean_degree: Optional[float] = None
    graph_mean_degree: Optional[float] = None
    source_mean_velocity_gradient: Optional[float] = None
    graph_mean_velocity_gradient: Optional[float] = None


# File documents
class FrameDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    positions: List[Tuple[float, float]]
    cells: List[Tuple[int, int, int]]
    node_type: List[int]
    velocity: List[Tuple[float, float]]
    pressure: Optional[List[float]] = None
    density: Optional[List[float]] = None
    edges: Optional[List[Tuple[int, int]]] = Field(
        None, description="Full edge list, present when edges differ from the cell sides"
    )


class TrajectoryDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    version: Literal[1]
    static_mesh: bool
    frames: List[FrameDocument] = Field(..., min_length=1)


class FrameEdits(BaseModel):
    frame: int
    added: List[Tuple[int, int, EdgeDirection]]
    removed: List[Tuple[int, int]]
    stats: Dict[str, Any] = Field(default_factory=dict)


class EditLogDocument(BaseModel):
    method: RewireMethod
    mode: TrajectoryMode
    config: RewireConfig
    frames: List[FrameEdits]
