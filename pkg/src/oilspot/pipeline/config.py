"""Pipeline configuration and the flat key-value config file.

Config files hold one `key = value` pair per line; '#' starts a comment.
Typing happens at the consumer: each option documents its expected type.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..imageproc.clahe import ClaheConfig
from ..imageproc.preprocess import PreprocessVariant


class ConfigError(ValueError):
    pass


def parse_config_file(path) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


@dataclass(frozen=True)
class PipelineConfig:
    checkpoint_path: str
    variant: PreprocessVariant = PreprocessVariant.ORIGINAL
    clahe: ClaheConfig = field(default_factory=ClaheConfig)
    detector: str = "fixture"          # "fixture" or "file:<path>"
    crop_margin: float = 0.1
    seed: int = 0

    def detector_kind(self) -> tuple[str, str | None]:
        if self.detector == "fixture":
            return "fixture", None
        if self.detector.startswith("file:"):
            return "file", self.detector[5:]
        raise ConfigError(f"unknown detector source {self.detector!r} "
                          "(expected 'fixture' or 'file:<path>')")

    @classmethod
    def from_mapping(cls, d: dict[str, str]) -> "PipelineConfig":
        if "checkpoint" not in d:
            raise ConfigError("config needs a 'checkpoint' entry")
        kw: dict = {"checkpoint_path": d["checkpoint"]}
        if "variant" in d:
            kw["variant"] = PreprocessVariant.parse(d["variant"])
        if "detector" in d:
            kw["detector"] = d["detector"]
        if "crop_margin" in d:
            kw["crop_margin"] = float(d["crop_margin"])
        if "seed" in d:
            kw["seed"] = int(d["seed"])
        grid_rows = int(d.get("clahe_grid_rows", 8))
        grid_cols = int(d.get("clahe_grid_cols", 8))
        clip = float(d.get("clahe_clip_limit", 2.0))
        kw["clahe"] = ClaheConfig(grid_rows, grid_cols, clip)
        return cls(**kw)


def validate_channels(variant: PreprocessVariant, input_channels: int) -> None:
    if variant.output_channels != input_channels:
        raise ConfigError(
            f"preprocess variant {variant.value!r} yields {variant.output_channels} "
            f"channel(s) but the checkpoint expects {input_channels}")
