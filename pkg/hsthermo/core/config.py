"""
Configuration management for hsthermo

Settings come from (highest precedence first) command-line flags, THERMO_*
environment variables, a YAML file loaded through dotyaml, and defaults.
"""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np
from dotyaml import load_config

from .errors import InvalidParameterError
from .models import QubitThermalModel
from .types import NmaxRule, OutputFormat, SweepMode, SweepSpec

logger = logging.getLogger(__name__)

ENV_PREFIX = "THERMO"
DEFAULT_CONFIG_FILE = Path(".hsthermo/config.yml")


def parse_float_list(text: str) -> List[float]:
    """Comma separated floats; 'inf' is accepted"""
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise InvalidParameterError(f"Cannot parse number list '{text}': {exc}") from exc


def parse_n_grid(text: str) -> List[int]:
    """Probe-number grid

    Accepted forms:
        "1,10,100"                explicit list
        "1:50"                    inclusive range
        "logspace:1:1000:60"      log-spaced integers, duplicates removed
    """
    text = text.strip()
    try:
        if text.startswith("logspace:"):
            _, start, stop, count = text.split(":")
            points = np.geomspace(int(start), int(stop), int(count))
            values = sorted({int(round(point)) for point in points})
        elif ":" in text:
            start, stop = text.split(":")
            values = list(range(int(start), int(stop) + 1))
        else:
            values = [int(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise InvalidParameterError(f"Cannot parse N grid '{text}': {exc}") from exc
    if not values or min(values) < 1:
        raise InvalidParameterError(f"N grid '{text}' must contain positive integers")
    return values


def _env(name: str, default: str) -> str:
    return os.getenv(f"{ENV_PREFIX}_{name}", default)


def _env_float(name: str, default: float) -> float:
    raw = _env(name, str(default))
    try:
        return float(raw)
    except ValueError as exc:
        raise InvalidParameterError(f"{ENV_PREFIX}_{name}='{raw}' is not a number") from exc


@dataclass
class ModelSettings:
    """Physical parameters of the worked example"""
    theta: float = 2.0
    xi: float = 400.0
    eta: float = 0.1
    kappa_s_over_g: float = 0.0
    omega_over_g: float = 1.0

    def to_model(self) -> QubitThermalModel:
        return QubitThermalModel(
            theta=self.theta,
            xi=self.xi,
            eta=self.eta,
            kappa_s_over_g=self.kappa_s_over_g,
            omega_over_g=self.omega_over_g,
        )


@dataclass
class SweepSettings:
    """Grids for the sweep command; strings use the parse_* formats"""
    n: str = "logspace:1:1000:60"
    xi: str = "100,200,300,400"
    eta: str = "0.1"
    theta: str = "2"
    mode: str = SweepMode.EXAMPLE_NOISE.value
    rho00: str = "0.5"
    sigma01: str = "0.5"


@dataclass
class NmaxSettings:
    tau: Optional[float] = None
    rule: str = NmaxRule.THRESHOLD.value


@dataclass
class OutputSettings:
    path: Optional[str] = None
    format: str = OutputFormat.CSV.value
    threads: int = 1


@dataclass
class ThermoConfig:
    """Configuration for hsthermo commands"""

    model: ModelSettings = field(default_factory=ModelSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    nmax: NmaxSettings = field(default_factory=NmaxSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    @staticmethod
    def load_yaml_config(config_path: Optional[str] = None) -> bool:
        """
        Load a YAML file into THERMO_* environment variables using dotyaml.

        Existing environment variables are left untouched. Without an explicit
        path, .hsthermo/config.yml is used when present.

        Returns:
            bool: True if a file was loaded
        """
        path = Path(config_path) if config_path else DEFAULT_CONFIG_FILE
        if not path.exists():
            if config_path:
                raise InvalidParameterError(f"Config file not found: {config_path}")
            return False
        try:
            load_config(str(path), prefix=ENV_PREFIX)
        except Exception as exc:
            raise InvalidParameterError(f"Cannot load config file {path}: {exc}") from exc
        logger.debug(f"Loaded configuration from {path}")
        return True

    @classmethod
    def from_env(cls, config_path: Optional[str] = None) -> "ThermoConfig":
        """Create configuration from .env, the YAML file and THERMO_* variables"""
        from dotenv import find_dotenv, load_dotenv

        load_dotenv(find_dotenv(usecwd=True), override=False)
        cls.load_yaml_config(config_path)

        model = ModelSettings(
            theta=_env_float("MODEL_THETA", 2.0),
            xi=_env_float("MODEL_XI", 400.0),
            eta=_env_float("MODEL_ETA", 0.1),
            kappa_s_over_g=_env_float("MODEL_KAPPA_S_OVER_G", 0.0),
            omega_over_g=_env_float("MODEL_OMEGA_OVER_G", 1.0),
        )
        sweep = SweepSettings(
            n=_env("SWEEP_N", SweepSettings.n),
            xi=_env("SWEEP_XI", SweepSettings.xi),
            eta=_env("SWEEP_ETA", SweepSettings.eta),
            theta=_env("SWEEP_THETA", SweepSettings.theta),
            mode=_env("SWEEP_MODE", SweepSettings.mode),
            rho00=_env("SWEEP_RHO00", SweepSettings.rho00),
            sigma01=_env("SWEEP_SIGMA01", SweepSettings.sigma01),
        )
        tau_raw = _env("NMAX_TAU", "")
        nmax = NmaxSettings(
            tau=_env_float("NMAX_TAU", 0.0) if tau_raw else None,
            rule=_env("NMAX_RULE", NmaxRule.THRESHOLD.value),
        )
        try:
            threads = int(_env("OUTPUT_THREADS", "1"))
        except ValueError as exc:
            raise InvalidParameterError(f"{ENV_PREFIX}_OUTPUT_THREADS must be an integer") from exc
        output = OutputSettings(
            path=_env("OUTPUT_PATH", "") or None,
            format=_env("OUTPUT_FORMAT", OutputFormat.CSV.value),
            threads=threads,
        )
        config = cls(model=model, sweep=sweep, nmax=nmax, output=output)
        config.validate()
        return config

    def validate(self) -> None:
        if self.output.format not in {fmt.value for fmt in OutputFormat}:
            raise InvalidParameterError(f"Unknown output format '{self.output.format}'")
        if self.sweep.mode not in {mode.value for mode in SweepMode}:
            raise InvalidParameterError(f"Unknown sweep mode '{self.sweep.mode}'")
        if self.nmax.rule not in {rule.value for rule in NmaxRule}:
            raise InvalidParameterError(f"Unknown N_max rule '{self.nmax.rule}'")
        if self.output.threads < 1:
            raise InvalidParameterError("threads must be at least 1")
        if self.nmax.tau is not None and not 0 < self.nmax.tau < 1:
            raise InvalidParameterError(f"tau must lie in (0, 1), got {self.nmax.tau}")
        self.model.to_model()

    def to_model(self) -> QubitThermalModel:
        return self.model.to_model()

    def to_sweep_spec(self) -> SweepSpec:
        return SweepSpec(
            n_values=parse_n_grid(self.sweep.n),
            xi_values=parse_float_list(self.sweep.xi),
            eta_values=parse_float_list(self.sweep.eta),
            theta_values=parse_float_list(self.sweep.theta),
            mode=SweepMode(self.sweep.mode),
            output_format=OutputFormat(self.output.format),
            output_path=self.output.path,
            kappa_s_over_g=self.model.kappa_s_over_g,
            rho00_values=parse_float_list(self.sweep.rho00),
            sigma01_values=parse_float_list(self.sweep.sigma01),
        )
