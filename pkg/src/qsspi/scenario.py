"""Scenario configuration, presets, and the end-to-end run with its report."""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .acquisition import Mode, RunConfig, TallySet, run_experiment
from .adversary import AttackSpec, AttackVariant
from .optics import DetectorModel, SourceModel
from .pgm import write_pgm
from .reconstruction import render_8bit, spi_reconstruct
from .scene import GLYPH_NAMES, SceneProfile, builtin_glyph, load_scene_pgm
from .security import Analysis, analyze, verdict
from .tallyio import write_tallies


class ConfigError(ValueError):
    """Invalid scenario configuration; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _preset_table() -> dict[str, dict]:
    presets = {
        "no-attack": {"scene": "A", "attack": {"variant": "none"}},
        "full-deceive": {
            "scene": "A",
            "attack": {"variant": "full_intercept_resend", "fraud_scene": "D", "intensity_ratio": 1000},
        },
    }
    for ratio in (500, 1000, 2000):
        presets[f"partial-F8-{ratio}"] = {
            "scene": "F",
            "attack": {
                "variant": "partial_intercept_resend",
                "fraud_scene": "mirrored-L",
                "intensity_ratio": ratio,
            },
        }
    for ratio in (500, 1000, 2000):
        presets[f"partial-AD-{ratio}"] = {
            "scene": "A",
            "attack": {"variant": "partial_intercept_resend", "fraud_scene": "D", "intensity_ratio": ratio},
        }
    presets["random-pol"] = {
        "scene": "F",
        "attack": {"variant": "random_polarization", "fraud_scene": "mirrored-L", "intensity_ratio": 1000},
    }
    presets["jamming-1000x"] = {"scene": "A", "attack": {"variant": "jamming", "jam_power_ratio": 1000}}
    return presets


PRESETS = _preset_table()
# alternative spelling accepted on the command line
PRESET_ALIASES = {"partial-F8-ratio1000": "partial-F8-1000"}


def list_presets() -> list[str]:
    return list(PRESETS)


@dataclass(frozen=True)
class ScenarioConfig:
    run: RunConfig
    scene: SceneProfile
    name: str = "custom"
    output_dir: Path = Path("qsspi-out")
    repetitions: int = 5
    raw: dict = field(default_factory=dict, compare=False)


def _resolve_scene(value, field_name: str, side: int) -> SceneProfile:
    try:
        if isinstance(value, str):
            if value not in GLYPH_NAMES:
                raise ConfigError(field_name, f"unknown glyph {value!r}; expected one of {GLYPH_NAMES}")
            return builtin_glyph(value, side)
        if isinstance(value, dict) and "pgm" in value:
            scene = load_scene_pgm(value["pgm"], value.get("eta_pgm"))
            if scene.side != side:
                raise ConfigError(field_name, f"image side {scene.side} != 2**resolution_exponent ({side})")
            return scene
    except ConfigError:
        raise
    except (OSError, ValueError) as exc:
        raise ConfigError(field_name, str(exc)) from exc
    raise ConfigError(field_name, "expected a glyph name or {\"pgm\": path}")


def _build(cls, values: dict, field_name: str):
    if not isinstance(values, dict):
        raise ConfigError(field_name, "expected an object")
    known = cls.__dataclass_fields__
    for key in values:
        if key not in known:
            raise ConfigError(f"{field_name}.{key}", "unknown field")
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(field_name, str(exc)) from exc


def scenario_from_dict(data: dict, name: str = "custom") -> ScenarioConfig:
    """Validate a JSON-style dict; physical defaults fill missing keys."""
    allowed = {
        "name", "resolution_exponent", "mode", "seed", "repetitions", "scene",
        "source", "detector", "attack", "output_dir",
    }
    for key in data:
        if key not in allowed:
            raise ConfigError(key, "unknown field")
    n = data.get("resolution_exponent", 5)
    if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= 6:
        raise ConfigError("resolution_exponent", f"expected an integer in [1, 6], got {n!r}")
    side = 2**n
    mode = data.get("mode", "analytic")
    if mode not in (m.value for m in Mode):
        raise ConfigError("mode", f"expected 'analytic' or 'stochastic', got {mode!r}")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigError("seed", f"expected a 64-bit unsigned integer, got {seed!r}")
    reps = data.get("repetitions", 5)
    if not isinstance(reps, int) or isinstance(reps, bool) or reps < 1:
        raise ConfigError("repetitions", f"expected an integer >= 1, got {reps!r}")

    source = _build(SourceModel, data.get("source", {}), "source")
    detector = _build(DetectorModel, data.get("detector", {}), "detector")

    attack_data = dict(data.get("attack", {}))
    if not isinstance(data.get("attack", {}), dict):
        raise ConfigError("attack", "expected an object")
    variant = attack_data.get("variant", "none")
    if variant not in (v.value for v in AttackVariant):
        raise ConfigError("attack.variant", f"unknown attack variant {variant!r}")
    if "fraud_scene" in attack_data:
        attack_data["fraud_scene"] = _resolve_scene(attack_data["fraud_scene"], "attack.fraud_scene", side)
    attack = _build(AttackSpec, attack_data, "attack")

    if "scene" not in data:
        raise ConfigError("scene", "missing")
    scene = _resolve_scene(data["scene"], "scene", side)
    run = RunConfig(n, mode, seed, source, detector, attack)
    return ScenarioConfig(
        run=run,
        scene=scene,
        name=data.get("name", name),
        output_dir=Path(data.get("output_dir", "qsspi-out")),
        repetitions=reps,
        raw=dict(data),
    )


def preset_dict(name: str) -> dict:
    name = PRESET_ALIASES.get(name, name)
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}")
    return json.loads(json.dumps({"name": name, **PRESETS[name]}))


def load_scenario(path=None, preset=None, **overrides) -> ScenarioConfig:
    """Build a scenario from a JSON file and/or a preset, then apply overrides."""
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from exc
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be an object")
        if preset is not None:
            data = {**preset_dict(preset), **data}
    elif preset is not None:
        data = preset_dict(preset)
    else:
        raise ConfigError("config", "give a config file or a preset")
    data.update({k: v for k, v in overrides.items() if v is not None})
    return scenario_from_dict(data, name=data.get("name", "custom"))


def _fmt(value: float) -> str:
    return "nan" if isinstance(value, float) and math.isnan(value) else repr(float(value))


def _mean_std(values: list[float]) -> tuple[float, float]:
    if any(math.isnan(v) for v in values):
        return math.nan, math.nan
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return statistics.fmean(values), std


def run_report_lines(analysis: Analysis, prefix: str = "") -> list[str]:
    """Key-value lines for one run; depends only on the tallies."""
    lines = []
    for key, value in analysis.report.as_dict().items():
        text = value if isinstance(value, str) else _fmt(value)
        lines.append(f"{prefix}{key} = {text}")
    return lines


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    config: ScenarioConfig
    tallies: list[TallySet]
    analyses: list[Analysis]
    singles_image: np.ndarray | None
    report: str


def execute(config: ScenarioConfig) -> ScenarioResult:
    """Run every repetition and assemble the report without touching disk."""
    run = config.run
    tallies = []
    for rep in range(config.repetitions):
        if run.mode is Mode.ANALYTIC and tallies:
            tallies.append(tallies[0])
        else:
            tallies.append(run_experiment(run, config.scene, rep))
    analyses = [analyze(t) for t in tallies]

    singles_image = None
    if run.attack.variant is AttackVariant.JAMMING:
        singles_image = spi_reconstruct(tallies[0].masks(), tallies[0].singles)

    lines = [
        "# qsspi run report",
        f"scenario = {config.name}",
        f"mode = {run.mode.value}",
        f"seed = {run.rng_seed}",
        f"resolution_exponent = {run.resolution_exponent}",
        f"repetitions = {config.repetitions}",
        f"attack = {run.attack.variant.value}",
    ]
    for rep, analysis in enumerate(analyses):
        lines += run_report_lines(analysis, prefix=f"run.{rep}.")
    stats = {}
    for key in ("e_r", "e_d", "e_T"):
        mean, std = _mean_std([getattr(a.report, key) for a in analyses])
        stats[key] = mean
        lines.append(f"{key} = {_fmt(mean)} ({_fmt(std)})")
    lines.append(f"verdict = {verdict(stats['e_r'], stats['e_d'], stats['e_T']).value}")
    return ScenarioResult(config, tallies, analyses, singles_image, "\n".join(lines) + "\n")


def write_outputs(result: ScenarioResult, png: bool = False) -> list[Path]:
    """Write images of the first repetition, its tallies, and the report."""
    out = Path(result.config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    first = result.analyses[0]
    images = {
        "G_all": first.g_all,
        "G_cor": first.g_cor,
        "G_mask": first.g_mask,
        "trustworthy": first.trustworthy,
    }
    if result.singles_image is not None:
        images["classical_singles"] = result.singles_image
    written = []
    for stem, image in images.items():
        data = render_8bit(image)
        path = out / f"{stem}.pgm"
        write_pgm(path, data)
        written.append(path)
        if png:
            from PIL import Image

            png_path = out / f"{stem}.png"
            Image.fromarray(data, mode="L").save(png_path, optimize=False)
            written.append(png_path)
    tally_path = out / "tallies.txt"
    write_tallies(tally_path, result.tallies[0])
    report_path = out / "report.txt"
    report_path.write_text(result.report)
    return written + [tally_path, report_path]


def run_scenario(config: ScenarioConfig, png: bool = False) -> ScenarioResult:
    result = execute(config)
    write_outputs(result, png=png)
    return result
