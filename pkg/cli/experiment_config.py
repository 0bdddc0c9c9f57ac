"""
JSON experiment configuration
"""
import json
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, model_validator

from frontend.nonlinearity import NonlinearitySpec
from helper.exceptions import ConfigError
from normalform.birkhoff import NormalFormParams
from polynomial.lattice import LatticeConfig


class PotentialSection(BaseModel):
    m: float = Field(..., gt=0.5)
    seed: int = 0
    v: Optional[Dict[int, float]] = Field(None, description="Explicit v_j; overrides sampling when given")


class IntegrateSection(BaseModel):
    dt: Optional[float] = Field(None, gt=0.0, description="None uses 1e-3 * 2 pi / max|omega|")
    T: float = Field(1.0, gt=0.0)
    scheme: Literal["implicit_midpoint", "rk4_reference", "dop853"] = "implicit_midpoint"
    sample_every: int = Field(1, ge=1)
    record_modes: bool = False


class ExperimentSection(BaseModel):
    kind: Literal["trajectory", "stability"] = "trajectory"
    ladder: List[float] = Field(default_factory=list, description="Geometric norm radii for scaling")
    samples: int = Field(50, ge=1, description="Directions per rung (scaling) or potentials per cell (measure)")
    gammas: List[float] = Field(default_factory=list)
    Ns: List[int] = Field(default_factory=list)
    r: Optional[int] = Field(None, ge=1, description="Degree of scans and measure estimates")
    epsilon: List[float] = Field(default_factory=lambda: [1e-2])
    p: Optional[float] = Field(None, ge=0.0, description="Sobolev index (None uses nf.p, then 2)")
    threshold_factor: float = Field(2.0, gt=1.0)
    seed: int = 0
    n_states: int = Field(100, ge=1)
    max_mode: Optional[int] = Field(None, ge=1)


class ExperimentConfig(BaseModel):
    lattice: LatticeConfig
    potential: PotentialSection
    nonlinearity: NonlinearitySpec = Field(default_factory=NonlinearitySpec)
    nf: Optional[NormalFormParams] = None
    integrate: IntegrateSection = Field(default_factory=IntegrateSection)
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)

    @model_validator(mode="after")
    def _cross_checks(self):
        if self.nf is not None and self.nf.N > self.lattice.J:
            raise ValueError(f"nf.N={self.nf.N} exceeds lattice.J={self.lattice.J}")
        if any(N > self.lattice.J for N in self.experiment.Ns):
            raise ValueError(f"experiment.Ns must not exceed lattice.J={self.lattice.J}")
        return self

    @property
    def p(self) -> float:
        if self.experiment.p is not None:
            return self.experiment.p
        return self.nf.p if self.nf is not None else 2.0

    def require_nf(self) -> NormalFormParams:
        if self.nf is None:
            raise ConfigError("section required by this command", field="nf")
        return self.nf

    def degree(self) -> int:
        if self.experiment.r is not None:
            return self.experiment.r
        if self.nf is not None:
            return self.nf.top_degree
        raise ConfigError("set experiment.r or nf.r_star", field="experiment.r")

    def resolved(self) -> dict:
        return self.model_dump(mode="json")


def _pointer(error: ValidationError) -> str:
    first = error.errors()[0]
    return ".".join(str(part) for part in first["loc"]) or "<root>"


def parse_config(document: dict) -> ExperimentConfig:
    """Validate a config document, turning validation errors into ConfigError with a field pointer"""
    try:
        return ExperimentConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigError(e.errors()[0]["msg"], field=_pointer(e)) from e


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = json.load(handle)
    except FileNotFoundError as e:
        raise ConfigError(f"config file {path} not found") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON at line {e.lineno}: {e.msg}") from e
    return parse_config(document)
