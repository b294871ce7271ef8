"""Run configuration: flat key=value files with typed defaults.

Every tunable constant of the system appears here with its default, so
studies can sweep them from the command line without code changes.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from . import image, mapping, registration, robust


@dataclass
class VoConfig:
    """All knobs of the odometry pipeline and its studies."""

    camera: str = "fr2"  # intrinsics preset name or a path to a file
    extractor: str = "smoothed_gradient5"
    gradient_threshold: float = image.DEFAULT_GRADIENT_THRESHOLD
    gaussian_sigma: float = image.DEFAULT_GAUSSIAN_SIGMA
    weight_kind: str = "t_distribution"
    huber_k: float = robust.HUBER_K
    tukey_c: float = robust.TUKEY_C
    cauchy_c: float = robust.CAUCHY_C
    l1_epsilon: float = robust.L1_EPSILON
    tdist_nu: float = robust.DEFAULT_NU
    tdist_sigma0: float = robust.DEFAULT_SIGMA
    sigma_min: float = robust.SIGMA_MIN
    disparity_threshold: float = 20.0
    velocity_decay: float = 0.9
    max_iterations: int = registration.DEFAULT_MAX_ITERS
    step_tolerance: float = registration.DEFAULT_STEP_TOL
    n_min_points: int = mapping.N_MIN_POINTS
    depth_scale: float = 5000.0
    depth_gap_base: float = mapping.DEPTH_GAP_BASE
    depth_gap_rel: float = mapping.DEPTH_GAP_REL
    max_dt: float = 0.02
    motion_model: bool = True
    coarse_to_fine: bool = False
    discard_blur_frames: bool = False
    cardinality_jump: float = 0.5
    deterministic: bool = False
    rpe_delta: float = 1.0
    rpe_tolerance: float = 0.02

    def __post_init__(self):
        if not (0.0 <= self.velocity_decay <= 1.0):
            raise ValueError("velocity_decay must lie in [0, 1]")
        if self.disparity_threshold <= 0:
            raise ValueError("disparity_threshold must be positive")


def _parse_value(name: str, text: str, target_type: type):
    if target_type is bool:
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"cannot parse boolean {name}={text!r}")
    return target_type(text)


def load_config(path) -> VoConfig:
    """Parse a flat `key = value` file ('#' starts a comment)."""
    types = {f.name: f.type for f in fields(VoConfig)}
    defaults = VoConfig()
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, text = line.partition("=")
            key = key.strip()
            if key not in types:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _parse_value(
                key, text.strip(), type(getattr(defaults, key))
            )
    return VoConfig(**values)


def save_config(config: VoConfig, path) -> None:
    with open(path, "w") as fh:
        for f in fields(VoConfig):
            fh.write(f"{f.name} = {getattr(config, f.name)}\n")
