# -*- coding: utf-8 -*-

"""
运行配置与场景包的加载。

配置文件为 JSON，按节读入数据类；任意层级的未知键都会抛出 ConfigError 并给出点分路径。
优先级：命令行参数 > 环境变量 (PROBE_*) > 配置文件 > 数据类默认值。
"""

import dataclasses
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple

from core.errors import ConfigError
from geometry.area import DiskRegion
from geometry.curves import CURVE_KINDS, CurveSpec, Placement
from geometry.needle import NeedleSpec
from geometry.scene import BOUNDARY_CONDITIONS, Component, Impedance, ObstacleScene

MODES = ("forward-check", "needle-fit", "indicator-series", "side-a-field", "side-b-field", "verify-suite")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
DEFAULT_CONFIG_PATH = "config/settings.json"
ENV_PREFIX = "PROBE_"


# -----------------------------------------------------------------------------
# 1. 定义配置数据类 (Data Classes)
# -----------------------------------------------------------------------------

@dataclass
class RunSection:
    mode: str = "side-b-field"
    output_dir: str = "output"
    seed: int = 0
    # 默认使用全部可用核
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)
    log_level: str = "INFO"


@dataclass
class SolverSection:
    M_outer: int = 256
    M_obstacle: int = 128
    condition_ceiling: float = 1e8
    tip_margin: float = 0.01
    upsample: int = 4


@dataclass
class ScheduleSection:
    n_max: int = 10
    eps0: float = 0.4
    q: float = 0.7
    M0: int = 8
    M_step: int = 4
    alpha0: float = 1e-6
    alpha_ratio: float = 0.5


@dataclass
class FittingSection:
    spacing: float = 0.04
    # Fourier–Bessel 展开中心，为 None 时取 Ω 的质心
    center: Optional[Tuple[float, float]] = None


@dataclass
class IndicatorSection:
    formulation: str = "direct"
    method: str = "boundary"
    window: int = 3
    tau_rel: float = 0.02
    g_min: float = 1.3
    a_min: float = 0.0
    front_threshold: Optional[float] = None


@dataclass
class GridSection:
    x_min: float = -0.9
    x_max: float = 0.9
    y_min: float = -0.9
    y_max: float = 0.9
    h: float = 0.05
    margin: float = 0.02


@dataclass
class CompactSetSection:
    name: str
    center: Tuple[float, float]
    radius: float


@dataclass
class ProbeSection:
    tip: Tuple[float, float] = (0.3, 0.0)
    # 针顶点列表，为 None 时使用从最近外边界点出发的直线针
    needle: Optional[Tuple[Tuple[float, float], ...]] = None
    detours: Tuple[Tuple[Tuple[float, float], ...], ...] = ()
    compact_sets: Tuple[CompactSetSection, ...] = ()


@dataclass
class ThresholdSection:
    growth: float = 10.0
    decay: float = 0.2
    convergence_rel: float = 0.05
    identity_gap: float = 1e-3
    stability: float = 0.1
    divergence_factor: float = 10.0
    nullity: float = 1e-8
    separation: float = 0.2


@dataclass
class VerifySection:
    scenarios: Tuple[str, ...] = ("data/scenarios/concentric.json", "data/scenarios/two_disks.json",
                                  "data/scenarios/empty.json", "data/scenarios/kite.json")
    # 为空时执行全部校验
    checks: Tuple[str, ...] = ()
    thresholds: ThresholdSection = field(default_factory=ThresholdSection)


def _default_scene() -> ObstacleScene:
    return ObstacleScene(
        outer=CurveSpec(kind="circle", radius=1.0),
        components=(Component(curve=CurveSpec(kind="circle", radius=0.4), impedance=Impedance(constant=1 + 1j)),),
        boundary_condition="impedance", k=2.0,
    )


@dataclass
class RunConfig:
    run_config: RunSection = field(default_factory=RunSection)
    scene: ObstacleScene = field(default_factory=_default_scene)
    solver: SolverSection = field(default_factory=SolverSection)
    needle_schedule: ScheduleSection = field(default_factory=ScheduleSection)
    fitting: FittingSection = field(default_factory=FittingSection)
    indicator: IndicatorSection = field(default_factory=IndicatorSection)
    grid: GridSection = field(default_factory=GridSection)
    probe: ProbeSection = field(default_factory=ProbeSection)
    verify: VerifySection = field(default_factory=VerifySection)


# -----------------------------------------------------------------------------
# 2. 辅助函数：键检查与类型转换
# -----------------------------------------------------------------------------

def _join(path: str, key) -> str:
    if isinstance(key, int):
        return f"{path}[{key}]"
    return f"{path}.{key}" if path else str(key)


def _check_keys(raw: Any, allowed, path: str):
    if not isinstance(raw, Mapping):
        raise ConfigError(f"应为 JSON 对象，收到 {type(raw).__name__}。", path or None)
    for key in raw:
        if key not in allowed:
            raise ConfigError(f"未知的配置项 '{key}'。", _join(path, key))


def _freeze(value):
    """JSON 列表转为（嵌套）元组，保证配置对象可比较、可哈希。"""
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def _number(raw: Mapping, key: str, path: str, default, positive: bool = False, integer: bool = False):
    value = raw.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"应为数值，收到 {value!r}。", _join(path, key))
    if integer and int(value) != value:
        raise ConfigError(f"应为整数，收到 {value!r}。", _join(path, key))
    if positive and not value > 0:
        raise ConfigError(f"必须为正，收到 {value!r}。", _join(path, key))
    return int(value) if integer else float(value)


def _point(value, path: str) -> Tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2 or \
            not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise ConfigError(f"应为二维坐标 [x, y]，收到 {value!r}。", path)
    return float(value[0]), float(value[1])


def _complex(value, path: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"复数应写成 [实部, 虚部]，收到 {value!r}。", path)


def _flag(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"应为布尔值 true/false，收到 {value!r}。", path)
    return value


def _optional_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"应为数值或 null，收到 {value!r}。", path)
    return float(value)


# 默认值为 None 的字段：字段名 -> 非空时的解析函数
OPTIONAL_FIELD_PARSERS = {
    "center": _point,
    "front_threshold": _optional_number,
}


def _simple_section(cls, raw: Any, path: str):
    """字段全为标量/列表的配置节：检查未知键并按默认值的类型转换。"""
    raw = {} if raw is None else raw
    names = [f.name for f in dataclasses.fields(cls)]
    _check_keys(raw, names, path)
    defaults = cls()
    kwargs = {}
    for name in names:
        default = getattr(defaults, name)
        if name not in raw:
            continue
        value = raw[name]
        if isinstance(default, bool):
            kwargs[name] = _flag(value, _join(path, name))
        elif isinstance(default, int):
            kwargs[name] = _number(raw, name, path, default, integer=True)
        elif isinstance(default, float):
            kwargs[name] = _number(raw, name, path, default)
        elif isinstance(default, str):
            if not isinstance(value, str):
                raise ConfigError(f"应为字符串，收到 {value!r}。", _join(path, name))
            kwargs[name] = value
        elif default is None:
            parser = OPTIONAL_FIELD_PARSERS[name]
            kwargs[name] = None if value is None else parser(value, _join(path, name))
        else:
            kwargs[name] = _freeze(value)
    return cls(**kwargs)


# -----------------------------------------------------------------------------
# 3. 场景解析
# -----------------------------------------------------------------------------

def parse_placement(raw: Any, path: str) -> Placement:
    raw = {} if raw is None else raw
    _check_keys(raw, ("offset", "rotation", "scale"), path)
    return Placement(
        offset=_point(raw.get("offset", [0.0, 0.0]), _join(path, "offset")),
        rotation=_number(raw, "rotation", path, 0.0),
        scale=_number(raw, "scale", path, 1.0, positive=True),
    )


def parse_curve(raw: Any, path: str) -> CurveSpec:
    _check_keys(raw, ("kind", "center", "radius", "semi_axes", "rotation", "coefficients", "placement"), path)
    kind = raw.get("kind")
    if kind not in CURVE_KINDS:
        raise ConfigError(f"未知曲线类型 {kind!r}，可选: {CURVE_KINDS}", _join(path, "kind"))
    semi_axes = raw.get("semi_axes", [1.0, 1.0])
    axes = _point(semi_axes, _join(path, "semi_axes"))
    if kind == "ellipse" and not min(axes) > 0:
        raise ConfigError(f"椭圆半轴必须为正，收到 {semi_axes!r}。", _join(path, "semi_axes"))
    coefficients = tuple(tuple(float(c) for c in row) for row in raw.get("coefficients", []))
    if kind == "fourier" and (len(coefficients) < 2 or any(len(row) != 4 for row in coefficients)):
        raise ConfigError("fourier 曲线需要至少两组 [a_m, b_m, c_m, d_m] 系数。", _join(path, "coefficients"))
    return CurveSpec(
        kind=kind,
        center=_point(raw.get("center", [0.0, 0.0]), _join(path, "center")),
        radius=_number(raw, "radius", path, 1.0, positive=(kind == "circle")),
        semi_axes=axes,
        rotation=_number(raw, "rotation", path, 0.0),
        coefficients=coefficients,
        placement=parse_placement(raw.get("placement"), _join(path, "placement")),
    )


def parse_impedance(raw: Any, path: str) -> Impedance:
    _check_keys(raw, ("constant", "fourier"), path)
    fourier = tuple(_complex(v, _join(_join(path, "fourier"), i)) for i, v in enumerate(raw.get("fourier", [])))
    if fourier and len(fourier) % 2 == 0:
        raise ConfigError("λ 的 Fourier 系数个数必须为奇数 (m = -L..L)。", _join(path, "fourier"))
    return Impedance(constant=_complex(raw.get("constant", [0.0, 1.0]), _join(path, "constant")), fourier=fourier)


def parse_scene(raw: Any, path: str = "scene") -> ObstacleScene:
    _check_keys(raw, ("domain", "obstacles", "boundary_condition", "k", "clearance_margin", "min_imag_impedance",
                      "allow_real_impedance"), path)
    if "domain" not in raw:
        raise ConfigError("缺少外边界 domain。", _join(path, "domain"))
    bc = raw.get("boundary_condition", "impedance")
    if bc not in BOUNDARY_CONDITIONS:
        raise ConfigError(f"未知边界条件 {bc!r}，可选: {BOUNDARY_CONDITIONS}", _join(path, "boundary_condition"))
    components = []
    for j, item in enumerate(raw.get("obstacles", [])):
        item_path = _join(_join(path, "obstacles"), j)
        _check_keys(item, ("curve", "placement", "impedance"), item_path)
        impedance = item.get("impedance")
        if bc == "impedance" and impedance is None:
            raise ConfigError("阻抗场景中每个障碍物都需要 impedance。", _join(item_path, "impedance"))
        components.append(Component(
            curve=parse_curve(item.get("curve"), _join(item_path, "curve")),
            placement=parse_placement(item.get("placement"), _join(item_path, "placement")),
            impedance=parse_impedance(impedance, _join(item_path, "impedance")) if impedance is not None else None,
        ))
    return ObstacleScene(
        outer=parse_curve(raw["domain"], _join(path, "domain")),
        components=tuple(components),
        boundary_condition=bc,
        k=_number(raw, "k", path, 2.0, positive=True),
        clearance_margin=_number(raw, "clearance_margin", path, 0.02, positive=True),
        min_imag_impedance=_number(raw, "min_imag_impedance", path, 1e-3),
        allow_real_impedance=_flag(raw.get("allow_real_impedance", False), _join(path, "allow_real_impedance")),
    )


def _complex_to_json(value: complex) -> List[float]:
    return [float(value.real), float(value.imag)]


def curve_to_dict(curve: CurveSpec) -> Dict[str, Any]:
    return {"kind": curve.kind, "center": list(curve.center), "radius": curve.radius,
            "semi_axes": list(curve.semi_axes), "rotation": curve.rotation,
            "coefficients": [list(row) for row in curve.coefficients],
            "placement": placement_to_dict(curve.placement)}


def placement_to_dict(placement: Placement) -> Dict[str, Any]:
    return {"offset": list(placement.offset), "rotation": placement.rotation, "scale": placement.scale}


def scene_to_dict(scene: ObstacleScene) -> Dict[str, Any]:
    obstacles = []
    for component in scene.components:
        item: Dict[str, Any] = {"curve": curve_to_dict(component.curve),
                                "placement": placement_to_dict(component.placement)}
        if component.impedance is not None:
            item["impedance"] = {"constant": _complex_to_json(component.impedance.constant),
                                 "fourier": [_complex_to_json(a) for a in component.impedance.fourier]}
        obstacles.append(item)
    return {"domain": curve_to_dict(scene.outer), "obstacles": obstacles,
            "boundary_condition": scene.boundary_condition, "k": scene.k,
            "clearance_margin": scene.clearance_margin, "min_imag_impedance": scene.min_imag_impedance,
            "allow_real_impedance": scene.allow_real_impedance}


# -----------------------------------------------------------------------------
# 4. 各配置节解析
# -----------------------------------------------------------------------------

def _polyline(value, path: str) -> Tuple[Tuple[float, float], ...]:
    if not isinstance(value, (list, tuple)) or len(value) < 2:
        raise ConfigError("针至少需要两个顶点。", path)
    return tuple(_point(p, _join(path, i)) for i, p in enumerate(value))


def parse_compact_sets(raw: Any, path: str) -> Tuple[CompactSetSection, ...]:
    sets = []
    for i, item in enumerate(raw or []):
        item_path = _join(path, i)
        _check_keys(item, ("name", "center", "radius"), item_path)
        if "name" not in item:
            raise ConfigError("紧集需要 name。", _join(item_path, "name"))
        sets.append(CompactSetSection(name=str(item["name"]),
                                      center=_point(item.get("center"), _join(item_path, "center")),
                                      radius=_number(item, "radius", item_path, None, positive=True)))
    return tuple(sets)


def parse_probe_section(raw: Any, path: str = "probe") -> ProbeSection:
    raw = {} if raw is None else raw
    _check_keys(raw, ("tip", "needle", "detours", "compact_sets"), path)
    needle = raw.get("needle")
    return ProbeSection(
        tip=_point(raw.get("tip", [0.3, 0.0]), _join(path, "tip")),
        needle=_polyline(needle, _join(path, "needle")) if needle is not None else None,
        detours=tuple(_polyline(d, _join(_join(path, "detours"), i)) for i, d in enumerate(raw.get("detours", []))),
        compact_sets=parse_compact_sets(raw.get("compact_sets"), _join(path, "compact_sets")),
    )


def parse_verify_section(raw: Any, path: str = "verify") -> VerifySection:
    raw = {} if raw is None else raw
    _check_keys(raw, ("scenarios", "checks", "thresholds"), path)
    defaults = VerifySection()
    return VerifySection(
        scenarios=tuple(str(s) for s in raw.get("scenarios", defaults.scenarios)),
        checks=tuple(str(c) for c in raw.get("checks", [])),
        thresholds=_simple_section(ThresholdSection, raw.get("thresholds"), _join(path, "thresholds")),
    )


def _validate(config: RunConfig):
    run = config.run_config
    if run.mode not in MODES:
        raise ConfigError(f"未知模式 {run.mode!r}，可选: {MODES}", "run_config.mode")
    if run.threads < 1:
        raise ConfigError(f"线程数必须 >= 1，收到 {run.threads}。", "run_config.threads")
    if run.log_level not in LOG_LEVELS:
        raise ConfigError(f"未知日志级别 {run.log_level!r}，可选: {LOG_LEVELS}", "run_config.log_level")
    for name in ("M_outer", "M_obstacle"):
        value = getattr(config.solver, name)
        if value < 16 or value % 2:
            raise ConfigError(f"离散节点数必须为 >= 16 的偶数，收到 {value}。", f"solver.{name}")
    if config.solver.upsample < 1:
        raise ConfigError("上采样倍数必须 >= 1。", "solver.upsample")
    if config.fitting.spacing <= 0:
        raise ConfigError("匹配点间距必须为正。", "fitting.spacing")
    if config.fitting.center is not None:
        _point(config.fitting.center, "fitting.center")
    if config.indicator.formulation not in ("direct", "scattered"):
        raise ConfigError(f"未知的指示项公式 {config.indicator.formulation!r}。", "indicator.formulation")
    if config.indicator.method not in ("boundary", "area"):
        raise ConfigError(f"未知的积分方式 {config.indicator.method!r}。", "indicator.method")
    if config.indicator.window < 2:
        raise ConfigError("趋势判定窗口至少为 2。", "indicator.window")
    grid = config.grid
    if not grid.h > 0:
        raise ConfigError(f"网格步长必须为正，收到 {grid.h}。", "grid.h")
    if not (grid.x_max > grid.x_min and grid.y_max > grid.y_min):
        raise ConfigError("网格范围为空。", "grid")


def parse_run_config(raw: Any) -> RunConfig:
    """
    把 JSON 对象解析为 RunConfig。

    Raises:
        ConfigError: 未知键、类型错误或取值非法，field 为点分路径。
    """
    _check_keys(raw, [f.name for f in dataclasses.fields(RunConfig)], "")
    fitting = _simple_section(FittingSection, raw.get("fitting"), "fitting")
    if fitting.center is not None:
        fitting = dataclasses.replace(fitting, center=_point(fitting.center, "fitting.center"))
    config = RunConfig(
        run_config=_simple_section(RunSection, raw.get("run_config"), "run_config"),
        scene=parse_scene(raw["scene"]) if "scene" in raw else _default_scene(),
        solver=_simple_section(SolverSection, raw.get("solver"), "solver"),
        needle_schedule=_simple_section(ScheduleSection, raw.get("needle_schedule"), "needle_schedule"),
        fitting=fitting,
        indicator=_simple_section(IndicatorSection, raw.get("indicator"), "indicator"),
        grid=_simple_section(GridSection, raw.get("grid"), "grid"),
        probe=parse_probe_section(raw.get("probe")),
        verify=parse_verify_section(raw.get("verify")),
    )
    _validate(config)
    return config


def config_to_dict(config: RunConfig) -> Dict[str, Any]:
    """有效配置（默认值已展开）的 JSON 表示，重新解析后与原对象相等。"""
    data = {f.name: dataclasses.asdict(getattr(config, f.name)) for f in dataclasses.fields(config)
            if f.name != "scene"}
    data["scene"] = scene_to_dict(config.scene)
    return json.loads(json.dumps(data))


# -----------------------------------------------------------------------------
# 5. 主函数：文件加载与覆盖
# -----------------------------------------------------------------------------

def _read_json(path: str) -> Any:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError:
        logging.error(f"配置文件未找到，请检查路径: {path}")
        raise ConfigError(f"文件不存在: {path}")
    except json.JSONDecodeError as e:
        logging.error(f"配置文件 {path} JSON 格式无效。")
        raise ConfigError(f"JSON 格式无效 ({path}): {e}")


def load_run_config(path: str) -> RunConfig:
    logging.info(f"开始加载配置文件: {path}")
    config = parse_run_config(_read_json(path))
    logging.info(f"配置加载完成：模式 {config.run_config.mode}，障碍物 {len(config.scene.components)} 个。")
    return config


def apply_overrides(config: RunConfig, overrides: Mapping[str, Any]) -> RunConfig:
    """用 out / threads / seed / mode 覆盖 run_config 节（值为 None 的项忽略）。"""
    mapping = {"out": "output_dir", "threads": "threads", "seed": "seed", "mode": "mode"}
    changes = {}
    for key, name in mapping.items():
        value = overrides.get(key)
        if value is None:
            continue
        if name in ("threads", "seed"):
            try:
                value = int(value)
            except (TypeError, ValueError):
                raise ConfigError(f"应为整数，收到 {value!r}。", f"run_config.{name}")
        changes[name] = value
    if not changes:
        return config
    updated = dataclasses.replace(config, run_config=dataclasses.replace(config.run_config, **changes))
    _validate(updated)
    return updated


def env_overrides(environ: Mapping[str, str]) -> Dict[str, Optional[str]]:
    return {key: environ.get(ENV_PREFIX + key.upper()) for key in ("config", "out", "threads", "seed", "mode")}


def resolve_run_config(flags: Mapping[str, Any], environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    按优先级合并：命令行参数 > 环境变量 > 配置文件 > 默认值。

    Args:
        flags: 命令行参数，键为 config / out / threads / seed / mode，未给出的为 None。
        environ: 环境变量映射，默认为 os.environ。
    """
    env = env_overrides(os.environ if environ is None else environ)
    path = flags.get("config") or env["config"] or DEFAULT_CONFIG_PATH
    config = load_run_config(path)
    config = apply_overrides(config, {k: v for k, v in env.items() if k != "config"})
    return apply_overrides(config, {k: v for k, v in flags.items() if k != "config"})


# -----------------------------------------------------------------------------
# 6. 场景包
# -----------------------------------------------------------------------------

def _compact_regions(sets: Tuple[CompactSetSection, ...]) -> Tuple[Tuple[str, DiskRegion], ...]:
    return tuple((s.name, DiskRegion(center=s.center, radius=s.radius)) for s in sets)


def parse_scenario(raw: Any, path: str):
    """场景包中的一个场景，转为 checks.report.Scenario。"""
    from checks.report import Probe, Ray, Scenario
    from indicator.classify import ProbeOptions
    from indicator.divergence import DivergenceThresholds
    from indicator.reconstruct import GridSpec
    from needles.schedule import default_schedule

    _check_keys(raw, ("name", "scene", "solver", "needle_schedule", "fitting", "indicator", "probes", "rays",
                      "boundedness_grid", "seed"), path)
    if "name" not in raw:
        raise ConfigError("场景需要 name。", _join(path, "name"))
    scene = parse_scene(raw.get("scene"), _join(path, "scene"))
    solver = _simple_section(SolverSection, raw.get("solver"), _join(path, "solver"))
    schedule = _simple_section(ScheduleSection, raw.get("needle_schedule"), _join(path, "needle_schedule"))
    fitting = _simple_section(FittingSection, raw.get("fitting"), _join(path, "fitting"))
    indicator = _simple_section(IndicatorSection, raw.get("indicator"), _join(path, "indicator"))
    options = ProbeOptions(
        schedule=default_schedule(**dataclasses.asdict(schedule)),
        center=_point(fitting.center, _join(path, "fitting.center")) if fitting.center is not None else None,
        spacing=fitting.spacing,
        thresholds=DivergenceThresholds(indicator.window, indicator.tau_rel, indicator.g_min, indicator.a_min),
        formulation=indicator.formulation,
    )
    probes = []
    for i, item in enumerate(raw.get("probes", [])):
        item_path = _join(_join(path, "probes"), i)
        _check_keys(item, ("name", "tip", "needle", "compact_sets"), item_path)
        needle = item.get("needle")
        probes.append(Probe(
            name=str(item.get("name", f"probe_{i}")),
            tip=_point(item.get("tip"), _join(item_path, "tip")),
            needle=NeedleSpec(_polyline(needle, _join(item_path, "needle"))) if needle is not None else None,
            compact_sets=_compact_regions(parse_compact_sets(item.get("compact_sets"), _join(item_path, "compact_sets"))),
        ))
    rays = []
    for i, item in enumerate(raw.get("rays", [])):
        item_path = _join(_join(path, "rays"), i)
        _check_keys(item, ("component", "t", "distances"), item_path)
        component = _number(item, "component", item_path, 1, integer=True)
        if not 1 <= component <= len(scene.components):
            raise ConfigError(f"射线的障碍物编号 {component} 超出范围。", _join(item_path, "component"))
        distances = tuple(float(d) for d in item.get("distances", (0.2, 0.1, 0.05, 0.02)))
        rays.append(Ray(component=component, t=_number(item, "t", item_path, 0.0), distances=distances))
    grid = raw.get("boundedness_grid")
    boundedness = None
    if grid is not None:
        g = _simple_section(GridSection, grid, _join(path, "boundedness_grid"))
        boundedness = GridSpec(g.x_min, g.x_max, g.y_min, g.y_max, g.h, g.margin)
    return Scenario(
        name=str(raw["name"]), scene=scene, M_outer=solver.M_outer, M_obstacle=solver.M_obstacle,
        condition_ceiling=solver.condition_ceiling, tip_margin=solver.tip_margin, options=options,
        probes=tuple(probes), rays=tuple(rays), boundedness_grid=boundedness,
        seed=_number(raw, "seed", path, 0, integer=True),
    )


def load_scenario_pack(path: str) -> List:
    """读取场景包文件 {"scenarios": [...]}，返回 Scenario 列表。"""
    raw = _read_json(path)
    _check_keys(raw, ("scenarios",), path)
    scenarios = [parse_scenario(item, _join(f"{path}:scenarios", i)) for i, item in enumerate(raw.get("scenarios", []))]
    logging.info(f"场景包 {path} 加载完成，共 {len(scenarios)} 个场景。")
    return scenarios
