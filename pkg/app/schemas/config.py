"""Config Schema."""

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class StrictModel(BaseModel):
    """Base for config sections, rejects unknown keys."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class WindowConfig(StrictModel):
    """Window Config Class."""

    size: float = Field(500.0, gt=0)
    stride: float = Field(250.0, gt=0)
    member_cap: int = Field(128, ge=2)
    mask_ratio: float = Field(0.40, gt=0, lt=1)
    n_random: int = Field(32, ge=0)
    n_hard: int = Field(16, ge=0)
    n_global: int = Field(64, ge=0)
    polyline_buffer: float = Field(30.0, ge=0)
    polygon_buffer: float = Field(5.0, ge=0)
    global_buffer: float = Field(100.0, ge=0)
    heldout_fraction: float = Field(0.1, ge=0, lt=1)

    @model_validator(mode="after")
    def check_stride(self):
        """Stride must not exceed the window size."""
        if self.stride > self.size:
            raise ValueError("stride must satisfy 0 < stride <= size")
        return self


class ModelConfig(StrictModel):
    """Model Config Class."""

    d_sem: int = Field(64, ge=1)
    d_model: int = Field(32, ge=1)
    d_ff: int = Field(64, ge=1)
    n_layers: int = Field(3, ge=1)
    n_heads: int = Field(4, ge=1)
    dropout: float = Field(0.1, ge=0, lt=1)
    gate_bias: float = -2.0
    activation: Literal["silu", "relu"] = "silu"
    codebook_rows: int = Field(4096, ge=1)

    @model_validator(mode="after")
    def check_heads(self):
        """Model width must split evenly over heads."""
        if self.d_model % self.n_heads != 0:
            raise ValueError("d_model must be divisible by n_heads")
        return self


class LossConfig(StrictModel):
    """Loss Config Class."""

    tau_mgsm: float = Field(0.15, gt=0)
    tau_acc: float = Field(0.3, gt=0)
    decay_lambda: float = Field(20.0, gt=0)
    delta: float = Field(0.4, gt=0, lt=2)
    alpha_mgsm: float = Field(1.0, ge=0)
    alpha_geo: float = Field(1.0, ge=0)
    alpha_acc: float = Field(1.0, ge=0)
    alpha_rsr: float = Field(50.0, ge=0)
    alpha_topo: float = Field(0.5, ge=0)
    alpha_dist: float = Field(100.0, ge=0)
    bin_edges: List[float] = Field(
        default_factory=lambda: [0.0, 25.0, 50.0, 100.0, 200.0, 400.0, 800.0]
    )

    @model_validator(mode="after")
    def check_bins(self):
        """Bin edges start at 0 and strictly increase."""
        edges = self.bin_edges
        if len(edges) < 2 or edges[0] != 0.0:
            raise ValueError("bin_edges must start at 0 and hold at least two edges")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("bin_edges must be strictly increasing")
        return self


class TrainConfig(StrictModel):
    """Train Config Class."""

    learning_rate: float = Field(2e-4, gt=0)
    weight_decay: float = Field(0.01, ge=0)
    epochs: int = Field(100, ge=0)
    batch_windows: int = Field(16, ge=1)
    grad_clip_norm: float = Field(1.0, gt=0)
    eval_every: int = Field(10, ge=1)
    workers: int = Field(1, ge=1)
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    eps: float = Field(1e-8, gt=0)


class CityParams(StrictModel):
    """Synthetic city parameters."""

    extent: float = Field(1000.0, gt=0)
    road_spacing: float = Field(100.0, gt=0)
    primary_every: int = Field(5, ge=1)
    buildings_per_block: int = Field(3, ge=0, le=4)
    pois_per_building: int = Field(3, ge=0)
    building_poi_probability: float = Field(0.6, ge=0, le=1)
    street_poi_probability: float = Field(0.7, ge=0, le=1)
    n_zones: int = Field(8, ge=2, le=8)
    dominant_zone_share: float = Field(0.6, gt=0, lt=1)
    district_blocks: int = Field(2, ge=1)
    token_noise: float = Field(0.2, ge=0, le=1)
    empty_token_fraction: float = Field(0.1, ge=0, lt=1)
    speed_density_radius: float = Field(50.0, ge=0)
    speed_density_coef: float = Field(0.8, ge=0)
    speed_noise: float = Field(1.5, ge=0)

    @model_validator(mode="after")
    def check_spacing(self):
        """Road spacing must be smaller than the extent."""
        if self.road_spacing >= self.extent:
            raise ValueError("road_spacing must be smaller than extent")
        return self


class ProbeConfig(StrictModel):
    """Probe Config Class."""

    radius: float = Field(100.0, ge=0)
    learning_rate: float = Field(1e-2, gt=0)
    epochs: int = Field(200, ge=1)
    mask_target: bool = False
    random_context: bool = False
    neighbor_mean_feature: bool = True
    neighbor_radius: float = Field(100.0, ge=0)
    features: Literal["contextual", "semantic"] = "contextual"


class DataConfig(StrictModel):
    """Dataset ingestion options."""

    lonlat_origin: Optional[Tuple[float, float]] = None


class ExperimentConfig(StrictModel):
    """Root of every run configuration."""

    seed: int = 0
    window: WindowConfig = Field(default_factory=WindowConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    loss: LossConfig = Field(default_factory=LossConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    city: CityParams = Field(default_factory=CityParams)
    probe: ProbeConfig = Field(default_factory=ProbeConfig)
    data: DataConfig = Field(default_factory=DataConfig)
