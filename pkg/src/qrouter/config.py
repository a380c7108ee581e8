"""Experiment configuration: JSON document -> validated ExperimentConfig.

Unknown keys are rejected by name; every field has a default so ``{}`` is a
valid document. The ``noise`` sub-document carries the synthetic-noise
toggles: per-qubit symmetric readout confusion probabilities and the per-CX
depolarizing rate.
"""

from dataclasses import dataclass

from .errors import ConfigError
from .experiment import VARIANTS
from .transpile import CouplingMap

DEFAULT_GAMMA_GRID = tuple(round(0.1 * k, 1) for k in range(11))

_NOISE_KEYS = {"readout_p01", "readout_p10", "depolarizing_per_cx"}
_TOP_KEYS = {
    "gamma_grid",
    "gamma_guess",
    "variant",
    "shots_per_setting",
    "repetitions",
    "base_seed",
    "noise",
    "mitigation",
    "error_correction",
    "transpile",
    "coupling_map",
    "output_dir",
}


@dataclass(frozen=True)
class ExperimentConfig:
    gamma_grid: tuple = DEFAULT_GAMMA_GRID
    gamma_guess: float = 0.5
    variant: str = "both-qubits"
    shots_per_setting: int = 100_000
    repetitions: int = 10
    base_seed: int = 12345
    readout_p01: float = 0.0
    readout_p10: float = 0.0
    depolarizing_per_cx: float = 0.0
    mitigation: bool = False
    error_correction: bool = True
    transpile: bool = False
    coupling_map: object = "jakarta"
    output_dir: str = "qrouter-results"

    def readout_pairs(self, n_qubits):
        """Per-qubit confusion pairs for the sampler, or None when ideal."""
        if self.readout_p01 == 0.0 and self.readout_p10 == 0.0:
            return None
        return ((self.readout_p01, self.readout_p10),) * n_qubits

    def resolved_coupling_map(self):
        if isinstance(self.coupling_map, CouplingMap):
            return self.coupling_map
        if self.coupling_map == "jakarta":
            return CouplingMap.jakarta()
        if isinstance(self.coupling_map, dict):
            return CouplingMap(self.coupling_map["n_physical"], tuple(
                tuple(e) for e in self.coupling_map["edges"]
            ))
        raise ConfigError(f"unresolvable coupling_map {self.coupling_map!r}")


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def parse_config(doc):
    """Validate a JSON-style dict and return an ExperimentConfig."""
    _require(isinstance(doc, dict), "config document must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    _require(not unknown, f"unknown config key(s): {sorted(unknown)}")

    noise = doc.get("noise", {})
    _require(isinstance(noise, dict), "noise must be an object")
    bad = set(noise) - _NOISE_KEYS
    _require(not bad, f"unknown noise key(s): {sorted(bad)}")

    grid = tuple(float(g) for g in doc.get("gamma_grid", DEFAULT_GAMMA_GRID))
    _require(len(grid) >= 1, "gamma_grid must be non-empty")
    _require(all(0.0 <= g <= 1.0 for g in grid), "gamma_grid values must lie in [0, 1]")

    gamma_guess = float(doc.get("gamma_guess", 0.5))
    _require(0.0 <= gamma_guess < 1.0, "gamma_guess must lie in [0, 1)")

    variant = doc.get("variant", "both-qubits")
    _require(variant in VARIANTS, f"variant must be one of {VARIANTS}")

    shots = int(doc.get("shots_per_setting", 100_000))
    _require(shots >= 1, "shots_per_setting must be >= 1")
    reps = int(doc.get("repetitions", 10))
    _require(reps >= 1, "repetitions must be >= 1")

    p01 = float(noise.get("readout_p01", 0.0))
    p10 = float(noise.get("readout_p10", 0.0))
    depol = float(noise.get("depolarizing_per_cx", 0.0))
    for name, v in (("readout_p01", p01), ("readout_p10", p10), ("depolarizing_per_cx", depol)):
        _require(0.0 <= v <= 1.0, f"noise.{name} must lie in [0, 1]")

    cmap = doc.get("coupling_map", "jakarta")
    cfg = ExperimentConfig(
        gamma_grid=grid,
        gamma_guess=gamma_guess,
        variant=variant,
        shots_per_setting=shots,
        repetitions=reps,
        base_seed=int(doc.get("base_seed", 12345)),
        readout_p01=p01,
        readout_p10=p10,
        depolarizing_per_cx=depol,
        mitigation=bool(doc.get("mitigation", False)),
        error_correction=bool(doc.get("error_correction", True)),
        transpile=bool(doc.get("transpile", False)),
        coupling_map=cmap,
        output_dir=str(doc.get("output_dir", "qrouter-results")),
    )
    cfg.resolved_coupling_map()  # fail fast on a bad map
    return cfg


def config_to_json(cfg):
    return {
        "gamma_grid": list(cfg.gamma_grid),
        "gamma_guess": cfg.gamma_guess,
        "variant": cfg.variant,
        "shots_per_setting": cfg.shots_per_setting,
        "repetitions": cfg.repetitions,
        "base_seed": cfg.base_seed,
        "noise": {
            "readout_p01": cfg.readout_p01,
            "readout_p10": cfg.readout_p10,
            "depolarizing_per_cx": cfg.depolarizing_per_cx,
        },
        "mitigation": cfg.mitigation,
        "error_correction": cfg.error_correction,
        "transpile": cfg.transpile,
        "coupling_map": cfg.coupling_map
        if not isinstance(cfg.coupling_map, CouplingMap)
        else {"n_physical": cfg.coupling_map.n_physical, "edges": [list(e) for e in cfg.coupling_map.edges]},
        "output_dir": cfg.output_dir,
    }
