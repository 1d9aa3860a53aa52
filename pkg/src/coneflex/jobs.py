"""JSON job files, pipelines and residual reports."""
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

MODES = ("cone-discrete", "cyl-discrete", "cone-smooth", "cyl-smooth")
VERBS = ("synth", "flex", "verify", "smooth", "export")

KEYS = {"mode", "selector", "params", "n", "sweep", "grid", "profile", "I", "pencil",
        "tolerances", "outputs", "seed"}
REQUIRED = {
    "cone-discrete": {"selector", "params"},
    "cyl-discrete": {"params"},
    "cone-smooth": {"profile", "grid"},
    "cyl-smooth": {"profile", "grid"},
}
PARAM_KEYS = {
    "cone-discrete": ({"m", "s1", "s3", "t1"}, {"t2_root", "s2_root", "d1"}),
    "cyl-discrete": ({"s1", "s2", "s3", "t1"}, {"t2_root", "t3_root", "spacing", "normalized", "d2"}),
}
SUBKEYS = {
    "selector": {"u", "v", "mn"},
    "sweep": {"samples", "d1_range", "d2_range", "I_range"},
    "grid": {"start", "stop", "step"},
    "profile": {"kind", "params"},
    "outputs": {"report", "summary", "frames", "mesh", "config"},
}

DEFAULT_TOL = {
    "D1": 1e-10, "D2": 1e-10, "isometry": 1e-10, "period4": 1e-9,
    "alpha_planarity": 1e-9, "beta_planarity": 1e-9, "mirror": 1e-10, "germ_mirror": 1e-10,
    "pencil_planarity": 1e-8, "side_pairing": 1e-9, "closure": 1e-9,
    "K_residual": 1e-6, "torsion": 1e-5, "plane": 1e-6, "drift": 1e-9,
    "cyl_residual": 1e-8, "base_plane": 1e-12,
}
DEFAULT_OUT = {"report": "report.csv", "summary": "summary.csv", "frames": "frames",
               "mesh": "mesh.obj", "config": "config.json"}


class JobError(ValueError):
    pass


@dataclass
class JobConfig:
    mode: str
    selector: dict = None
    params: dict = field(default_factory=dict)
    n: int = 12
    sweep: dict = field(default_factory=dict)
    grid: dict = None
    profile: dict = None
    I: float = None
    pencil: list = None
    tolerances: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    seed: int = 0

    def tol(self, name):
        return self.tolerances.get(name, DEFAULT_TOL.get(name))

    def out(self, name):
        return self.outputs.get(name, DEFAULT_OUT[name])


def parse_number(x):
    """Numbers stay as they are; strings like '1/2' become Fractions."""
    if isinstance(x, bool):
        raise JobError("boolean where a number was expected: %r" % (x,))
    if isinstance(x, (int, float)):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise JobError("not a number: %r" % (x,))
    raise JobError("not a number: %r" % (x,))


def validate_job(data):
    if not isinstance(data, dict):
        raise JobError("job must be a JSON object")
    unknown = sorted(set(data) - KEYS)
    if unknown:
        raise JobError("unknown keys: %s" % ", ".join(unknown))
    mode = data.get("mode")
    if mode not in MODES:
        raise JobError("mode must be one of %s, got %r" % (", ".join(MODES), mode))
    missing = sorted(REQUIRED[mode] - set(data))
    if missing:
        raise JobError("missing keys for mode %s: %s" % (mode, ", ".join(missing)))
    for key, allowed in SUBKEYS.items():
        if key in data:
            if not isinstance(data[key], dict):
                raise JobError("%s must be an object" % key)
            bad = sorted(set(data[key]) - allowed)
            if bad:
                raise JobError("unknown keys in %s: %s" % (key, ", ".join(bad)))
    if mode in PARAM_KEYS:
        need, opt = PARAM_KEYS[mode]
        params = data.get("params", {})
        bad = sorted(set(params) - need - opt)
        if bad:
            raise JobError("unknown keys in params for mode %s: %s" % (mode, ", ".join(bad)))
        miss = sorted(need - set(params))
        if miss:
            raise JobError("missing keys in params for mode %s: %s" % (mode, ", ".join(miss)))
    elif data.get("params"):
        raise JobError("params not used by mode %s" % mode)
    if mode == "cone-discrete":
        sel = data["selector"]
        miss = sorted({"u", "v", "mn"} - set(sel))
        if miss:
            raise JobError("missing keys in selector: %s" % ", ".join(miss))
    if mode in ("cone-smooth", "cyl-smooth"):
        if "I" not in data and "I_range" not in data.get("sweep", {}):
            raise JobError("mode %s needs I or sweep.I_range" % mode)
        if "kind" not in data["profile"]:
            raise JobError("missing keys in profile: kind")
        miss = sorted({"start", "stop", "step"} - set(data["grid"]))
        if miss:
            raise JobError("missing keys in grid: %s" % ", ".join(miss))
        if not data["grid"]["step"] > 0:
            raise JobError("grid.step must be positive")
    for name, v in data.get("tolerances", {}).items():
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
            raise JobError("tolerance %s must be a positive number, got %r" % (name, v))
    n = data.get("n", 12)
    if not isinstance(n, int) or n < 3:
        raise JobError("n must be an integer >= 3")
    if "seed" in data and not isinstance(data["seed"], int):
        raise JobError("seed must be an integer")
    samples = data.get("sweep", {}).get("samples", 1)
    if not isinstance(samples, int) or samples < 1:
        raise JobError("sweep.samples must be a positive integer")


def job_from_dict(data):
    validate_job(data)
    d = dict(data)
    if "params" in d:
        d["params"] = {k: (v if k in ("normalized",) or k.endswith("_root") else parse_number(v))
                       for k, v in d["params"].items()}
    return JobConfig(**d)


def parse_job(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise JobError("invalid JSON in %s: %s" % (path, exc))
    return job_from_dict(data)


# ------------------------------------------------------------------ reports

@dataclass
class ResidualReport:
    rows: list = field(default_factory=list)      # (parameter, name, value)
    thresholds: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def add(self, param, name, value):
        value = float(value)
        if math.isnan(value):
            return
        self.rows.append((float(param), name, value))

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: (r[0], r[1]))

    def maxima(self):
        out = {}
        for _, name, v in self.rows:
            out[name] = max(out.get(name, -math.inf), abs(v))
        return out

    def failures(self):
        return sorted(name for name, v in self.maxima().items()
                      if self.thresholds.get(name) is not None and not v <= self.thresholds[name])

    @property
    def passed(self):
        return not self.failures()

    def to_csv(self):
        lines = ["parameter,residual,value,threshold,pass"]
        for p, name, v in self.sorted_rows():
            t = self.thresholds.get(name)
            ok = "" if t is None else ("1" if abs(v) <= t else "0")
            lines.append("%.17g,%s,%.17g,%s,%s" % (p, name, v, "" if t is None else "%.17g" % t, ok))
        return "\n".join(lines) + "\n"

    def summary_csv(self):
        lines = ["residual,max,threshold,pass"]
        for name, v in sorted(self.maxima().items()):
            t = self.thresholds.get(name)
            ok = "" if t is None else ("1" if v <= t else "0")
            lines.append("%s,%.17g,%s,%s" % (name, v, "" if t is None else "%.17g" % t, ok))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- pipelines

class StageError(RuntimeError):
    pass


def _stage(module, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except (ValueError, ArithmeticError, AssertionError) as exc:
        raise StageError("%s: %s" % (module, exc)) from exc


def _grid(cfg):
    g = cfg.grid
    start, stop, step = float(g["start"]), float(g["stop"]), float(g["step"])
    n = int(round((stop - start) / step))
    return start + step * np.arange(n + 1)


def _range(cfg, key, default):
    lo, hi = cfg.sweep.get(key, default)
    k = cfg.sweep.get("samples", 20)
    return [float(lo)] if k == 1 else list(np.linspace(float(lo), float(hi), k))


def _lambdas(cfg):
    if cfg.pencil is not None:
        return [float(x) for x in cfg.pencil]
    rng = np.random.default_rng(cfg.seed)
    lam = rng.uniform(-3.0, 3.0, 10)
    return [float(x if abs(x - 1.0) > 0.1 else x + 0.5) for x in lam]


def _jsonable(v):
    return str(v) if isinstance(v, Fraction) else (repr(v) if not isinstance(v, (int, float)) else v)


def _config_record(config):
    from dataclasses import fields
    out = {}
    for f in fields(config):
        v = getattr(config, f.name)
        out[f.name] = {"float": float(v), "exact": _jsonable(v)} if not isinstance(v, float) else {"float": v}
    return out


def _write_text(path, text):
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _cone_discrete(cfg, verb, out_dir, report):
    from .bricard import build_strip, flex_sweep, pencil_section, perturb_strip, verify_antiparallelogram
    from .discrete_cone import BranchSelector, synthesize_config
    from .mesh import export_obj

    sel = _stage("discrete_cone", BranchSelector, int(cfg.selector["u"]), int(cfg.selector["v"]),
                 str(cfg.selector["mn"]))
    p = cfg.params
    config = _stage("discrete_cone", synthesize_config, sel, p["m"], p["s1"], p["s3"], p["t1"],
                    p.get("t2_root", 0), p.get("s2_root", 0))
    _write_text(os.path.join(out_dir, cfg.out("config")),
                json.dumps(_config_record(config), indent=2, sort_keys=True) + "\n")
    if verb == "synth":
        return [os.path.join(out_dir, cfg.out("config"))]
    d1_ref = float(p.get("d1", 0.4))
    strip = _stage("bricard_builder", build_strip, config, sel, cfg.n, d1_ref)
    if verb == "export":
        path = os.path.join(out_dir, cfg.out("mesh"))
        return export_obj(strip.mesh(), path)
    lambdas = _lambdas(cfg)
    d1s = _range(cfg, "d1_range", (-3.0, 3.0))
    samples, notes = _stage("bricard_builder", flex_sweep, strip, d1s, lambdas)
    report.notes.extend(notes)
    for d1, s, _, rep in samples:
        for k, v in rep.items():
            if k in ("delta1", "delta2", "flat"):
                continue
            report.add(d1, k, v)
        ap = verify_antiparallelogram(s)
        if not rep["flat"]:
            report.add(d1, "side_pairing", ap["side_pairing"])
            report.add(d1, "crossed", 0.0 if ap["crossed_pair"] else 1.0)
        report.add(d1, "closure", ap["closure"])
    report.thresholds["crossed"] = 0.5
    # negative control: t2 perturbed by 1e-3 must break closure
    bad = _stage("bricard_builder", perturb_strip, strip, 1e-3)
    # must fail by more than 1e-4: ratio <= 1 passes
    report.add(d1_ref, "negative_control_ratio", 1e-4 / max(bad["period4"], 1e-300))
    report.thresholds["negative_control_ratio"] = 1.0
    report.notes.append("negative control (t2 * (1 + 1e-3)) period-4 deviation %.3g" % bad["period4"])
    files = []
    if verb == "flex":
        files = export_obj([m for _, _, m, _ in samples], os.path.join(out_dir, cfg.out("frames")))
    return files


def _cyl_discrete(cfg, verb, out_dir, report):
    from .discrete_cylinder import build_prism_strip, synthesize_cylinder
    from .mesh import export_obj

    p = cfg.params
    config = _stage("discrete_cylinder", synthesize_cylinder, p["s1"], p["s2"], p["s3"], p["t1"],
                    p.get("t2_root", 0), p.get("t3_root", 0), float(p.get("spacing", 1.0)))
    _write_text(os.path.join(out_dir, cfg.out("config")),
                json.dumps(_config_record(config), indent=2, sort_keys=True) + "\n")
    if verb == "synth":
        return [os.path.join(out_dir, cfg.out("config"))]
    normalized = bool(p.get("normalized", False))
    if verb == "export":
        strip = _stage("discrete_cylinder", build_prism_strip, config, cfg.n,
                       float(p.get("d2", 0.2)), normalized)
        return export_obj(strip.mesh(), os.path.join(out_dir, cfg.out("mesh")))
    meshes = []
    for d2 in _range(cfg, "d2_range", (-0.5, 0.5)):
        try:
            strip = _stage("discrete_cylinder", build_prism_strip, config, cfg.n, d2, normalized)
        except StageError as exc:
            report.notes.append("d2=%.17g skipped: %s" % (d2, exc))
            continue
        for k, v in strip.residuals().items():
            report.add(d2, k, v)
        meshes.append(strip.mesh())
    if verb == "flex":
        return export_obj(meshes, os.path.join(out_dir, cfg.out("frames")))
    return []


def _I_values(cfg):
    if "I_range" in cfg.sweep:
        return _range(cfg, "I_range", None)
    return [float(cfg.I)]


def _cone_smooth(cfg, verb, out_dir, report):
    from .mesh import export_obj
    from .profiles import make_profile
    from .smooth_cone import K_residual, cone_mesh, cone_section_planarity, kappa_from_profile

    phi = _stage("profiles", make_profile, cfg.profile["kind"], cfg.profile.get("params"))
    g = _grid(cfg)
    meshes = []
    for I in _I_values(cfg):
        k = _stage("smooth_cone", kappa_from_profile, phi, I, g)
        kv = k(g)
        report.add(I, "K_residual", K_residual(phi, k, k.prime, g))
        r = _stage("smooth_cone", cone_section_planarity, k, phi, g)
        for name in ("torsion", "plane", "drift"):
            report.add(I, name, r[name])
        report.add(I, "kappa_min", float(np.min(kv)))
        report.add(I, "kappa_max", float(np.max(kv)))
        report.notes.extend("I=%.17g: %s" % (I, d) for d in r["degenerate"])
        meshes.append(cone_mesh(r["frames"], phi=phi))
    if verb in ("flex", "export"):
        return export_obj(meshes, os.path.join(out_dir, cfg.out("frames")))
    return []


def _cyl_smooth(cfg, verb, out_dir, report):
    from .mesh import export_obj
    from .profiles import make_profile
    from .smooth_cylinder import cyl_residual, cylinder_mesh, cylinder_section_planarity, kappa_planar

    phi = _stage("profiles", make_profile, cfg.profile["kind"], cfg.profile.get("params"))
    g = _grid(cfg)
    meshes = []
    for I in _I_values(cfg):
        k = _stage("smooth_cylinder", kappa_planar, phi, I, g)
        if len(k.grid) < len(g):
            report.notes.append("I=%.17g: grid trimmed to [%.17g, %.17g]" % (I, k.grid[0], k.grid[-1]))
        kv = k.values()
        report.add(I, "cyl_residual", cyl_residual(phi, k, k.prime, k.grid))
        r = _stage("smooth_cylinder", cylinder_section_planarity, k, phi, k.grid)
        for name in ("torsion", "plane", "base_plane"):
            report.add(I, name, r[name])
        report.add(I, "kappa_min", float(np.min(kv)))
        report.add(I, "kappa_max", float(np.max(kv)))
        meshes.append(cylinder_mesh(r["frames"], phi))
    if verb in ("flex", "export"):
        return export_obj(meshes, os.path.join(out_dir, cfg.out("frames")))
    return []


PIPELINES = {
    "cone-discrete": _cone_discrete,
    "cyl-discrete": _cyl_discrete,
    "cone-smooth": _cone_smooth,
    "cyl-smooth": _cyl_smooth,
}


def run_job(cfg, verb="verify", out_dir="."):
    """Run one job; returns (report, written files).

    The report and its summary are written to out_dir for every verb except
    synth and export."""
    if verb not in VERBS:
        raise JobError("unknown verb %r" % (verb,))
    if verb == "smooth" and cfg.mode not in ("cone-smooth", "cyl-smooth"):
        raise JobError("verb smooth needs a smooth mode, got %s" % cfg.mode)
    os.makedirs(out_dir, exist_ok=True)
    report = ResidualReport()
    report.thresholds = {name: cfg.tol(name) for name in DEFAULT_TOL}
    report.thresholds.update(cfg.tolerances)
    files = PIPELINES[cfg.mode](cfg, verb, out_dir, report)
    if verb not in ("synth", "export"):
        rp = os.path.join(out_dir, cfg.out("report"))
        sp = os.path.join(out_dir, cfg.out("summary"))
        _write_text(rp, report.to_csv())
        _write_text(sp, report.summary_csv())
        files = list(files) + [rp, sp]
    return report, files
