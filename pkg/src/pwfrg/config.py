"""Run configuration: a flat ``key = value`` file plus command-line overrides."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigParse

PREDICTORS = ("none", "pwfrg", "mcculloch")
LANCZOS_MODES = ("converge", "single_step")
PADDINGS = ("singlet", "uniform")


@dataclass(frozen=True)
class RunConfig:
    J: float = 1.0
    delta: float = 0.0
    m_max: int = 64
    two_n_max: int = 100
    predictor: str = "pwfrg"
    lanczos_tol: float = 1e-12
    lanczos_max_iter: int = 500
    lanczos_mode: str = "converge"
    pinv_eps: float = 1e-8
    degeneracy_tol: float = 1e-10
    seed: int = 0
    sz_sector_restriction: bool = False
    output_path: str = "idmrg.csv"
    # state of the two spins added at each end by the PWFRG trial
    padding: str = "singlet"
    # second leg of compare-fidelity
    compare_predictor: str = "none"
    # single_step mode diagonalizes fully until a fidelity error at or below
    # this value has been seen; 1 switches right after the first prediction
    single_step_after_fidelity: float = 1e-3

    def __post_init__(self):
        def bad(name, why):
            raise ConfigParse(f"{name}: {why}", field=name)

        if not self.J > 0:
            bad("J", "must be positive")
        if not abs(self.delta) <= 1:
            bad("delta", "must lie in [-1, 1]")
        if self.m_max < 4:
            bad("m_max", "must be at least 4")
        if self.two_n_max < 8 or self.two_n_max % 2:
            bad("two_n_max", "must be even and at least 8")
        if self.predictor not in PREDICTORS:
            bad("predictor", f"must be one of {PREDICTORS}")
        if self.compare_predictor not in PREDICTORS:
            bad("compare_predictor", f"must be one of {PREDICTORS}")
        if self.lanczos_mode not in LANCZOS_MODES:
            bad("lanczos_mode", f"must be one of {LANCZOS_MODES}")
        if self.padding not in PADDINGS:
            bad("padding", f"must be one of {PADDINGS}")
        for name in ("lanczos_tol", "pinv_eps", "degeneracy_tol"):
            if not getattr(self, name) > 0:
                bad(name, "must be positive")
        if not 0 < self.single_step_after_fidelity <= 1:
            bad("single_step_after_fidelity", "must lie in (0, 1]")
        if self.lanczos_max_iter < 1:
            bad("lanczos_max_iter", "must be positive")

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def items(self):
        return [(f.name, getattr(self, f.name))
                for f in dataclasses.fields(self)]


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _convert(name, text):
    kind = _FIELDS[name].type
    text = text.strip()
    try:
        if kind == "bool":
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
    except ValueError:
        raise ConfigParse(f"{name}: cannot parse {text!r} as {kind}",
                          field=name) from None
    return text


def parse_pairs(pairs, source="<overrides>") -> dict:
    out = {}
    for lineno, raw in enumerate(pairs, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParse(f"{source}:{lineno}: expected key = value, "
                              f"got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigParse(f"{source}:{lineno}: unknown key {key!r}",
                              field=key)
        out[key] = _convert(key, value)
    return out


def load_config(path=None, overrides=()) -> RunConfig:
    values = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigParse(f"cannot read config {path}: {exc}") from None
        values.update(parse_pairs(text.splitlines(), str(path)))
    values.update(parse_pairs(overrides))
    return RunConfig(**values)


def dump_config(config: RunConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in config.items())
