"""Run configuration and the staged verification driver behind the CLI."""
import json
import os
from dataclasses import asdict, dataclass
from dataclasses import field as dfield

import numpy as np

from .bounds import _grad_modulus, interior_estimate, lipschitz_pipeline, local_sup
from .elliptic import GrowthParams, ellipticity_audit, field_from_config, growth_audit
from .errors import AlphaExhaustedError, ConfigError, ConvergenceError, DegenerateError, InfeasibleLambdaError
from .lab import TestMapSpec, generate_map
from .qc import ZERO_EXCLUSION, mori_audit, polar_audit, qc_modulus, radial_operator_identity
from .report import report_from_slack, write_csv, write_json

EXIT_CODES = {
    "ok": 0,
    "ellipticity": 1,
    "growth": 2,
    "polar": 3,
    "mori": 4,
    "identity": 5,
    "alpha_exhausted": 6,
    "lambda_infeasible": 7,
    "final_bound": 8,
    "generation": 9,
    "config": 10,
}

IDENTITY_EXCLUSION = 0.3

EXIT_HELP = """exit codes:
   0  all audited inequalities hold and empirical_max_grad <= C_global
   1  coefficient field exceeds its declared Lambda / LipL
   2  growth condition |L[w]| <= B|grad w|^2 + Gamma fails
   3  polar factorisation inequalities fail
   4  Mori distortion bounds fail
   5  radial operator identity residual above 100 h^2
   6  cut-off precondition fails for every alpha (alpha exhausted)
   7  no feasible lambda in the interior estimate
   8  empirical gradient exceeds C_global
   9  map generation or FD solver failure
  10  invalid configuration"""


@dataclass
class Tolerances:
    polar: float = 1e-6
    mori: float = 1e-9
    identity_h: float = 1e-3

    def __post_init__(self):
        if min(self.polar, self.mori, self.identity_h) <= 0:
            raise ConfigError("tolerances must be positive")


@dataclass
class RunConfig:
    """Everything one verification run needs; built from a JSON document."""

    map: dict
    field: dict = dfield(default_factory=lambda: {"family": "identity"})
    growth: dict = dfield(default_factory=dict)
    tolerances: Tolerances = dfield(default_factory=Tolerances)
    seed: int = 0
    n_samples: int = 10000
    n_ellipticity: int = 800
    n_identity: int = 200
    r_min: float = 0.05
    r_max: float = 0.95
    grid: dict = dfield(default_factory=lambda: {"n_r": 96, "n_theta": 256})
    interior_points: list = dfield(default_factory=lambda: [[0.0, 0.0], [0.5, 0.0]])
    output_json: str = None
    output_csv: str = None

    @classmethod
    def from_dict(cls, d, base_dir="."):
        d = dict(d)
        if "map" not in d:
            raise ConfigError("config needs a 'map' section")
        out = d.pop("output", {}) or {}
        tol = d.pop("tolerances", {}) or {}
        known = set(cls.__dataclass_fields__) - {"tolerances", "output_json", "output_csv"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        try:
            cfg = cls(tolerances=Tolerances(**tol), **d)
        except TypeError as e:
            raise ConfigError(str(e)) from None
        cfg.output_json = _resolve(out.get("json"), base_dir)
        cfg.output_csv = _resolve(out.get("csv"), base_dir)
        if not 0 <= cfg.r_min < cfg.r_max <= 1:
            raise ConfigError("need 0 <= r_min < r_max <= 1")
        if cfg.n_samples < 2 or cfg.n_ellipticity < 2:
            raise ConfigError("sample counts must be at least 2")
        return cfg

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from None
        return cls.from_dict(d, os.path.dirname(os.path.abspath(path)))

    def params(self):
        try:
            return GrowthParams(float(self.growth.get("B", 0.0)), float(self.growth.get("Gamma", 0.0)))
        except ValueError as e:
            raise ConfigError(str(e)) from None

    def to_dict(self):
        return asdict(self)


def _resolve(path, base):
    if path is None:
        return None
    path = path if os.path.isabs(path) else os.path.join(base, path)
    parent = os.path.dirname(path) or "."
    if not os.path.isdir(parent):
        raise ConfigError(f"output directory {parent} does not exist")
    return path


def disk_samples(rng, n, r_min=0.0, r_max=1.0):
    """``n`` points uniform in area on the annulus ``r_min <= |z| <= r_max``."""
    r = np.sqrt(rng.uniform(r_min**2, r_max**2, n))
    return r * np.exp(2j * np.pi * rng.uniform(size=n))


@dataclass
class RunResult:
    exit_code: int
    stage: str
    report: dict
    rows: list = dfield(default_factory=list)


def _build(cfg):
    fld = field_from_config(cfg.field)
    params = cfg.params()
    spec = TestMapSpec.from_dict(cfg.map)
    return fld, params, spec


def audit_stages(sample, fld, params, cfg, rng):
    """Run the inequality audits in order; returns a list of ``(stage, report)``."""
    tol = cfg.tolerances
    out = []
    zc = disk_samples(rng, cfg.n_ellipticity, 0.0, 1.0)
    ell = ellipticity_audit(fld, zc)
    out.append(("ellipticity", ell))

    z = disk_samples(rng, cfg.n_samples, cfg.r_min, cfg.r_max)
    out.append(("growth", growth_audit(sample, fld, params, z)))

    zp = z[np.abs(sample(z)) > 1.2 * ZERO_EXCLUSION]
    K = sample.K
    out.append(("polar", polar_audit(sample, K, zp, tol=tol.polar)))

    z1, z2 = disk_samples(rng, cfg.n_samples), disk_samples(rng, cfg.n_samples)
    zm = disk_samples(rng, cfg.n_samples)
    out.append(("mori", mori_audit(sample, K, sample.a, (z1, z2), zm, tol=tol.mori)))

    # the stencil error of L[rho] grows like |w|^-3, so keep away from the zero
    zi = z[np.abs(sample(z)) > IDENTITY_EXCLUSION][: cfg.n_identity]
    h = tol.identity_h
    lhs, rhs = radial_operator_identity(sample, fld, zi, h)
    tol_h = 100 * h**2
    rep = report_from_slack("radial operator identity residual <= 100 h^2", tol_h - np.abs(lhs - rhs), zi)
    rep.extra["max_residual"] = float(np.max(np.abs(lhs - rhs)))
    rep.extra["h"] = h
    out.append(("identity", rep))
    return out


def run_verification(cfg, stages="pipeline"):
    """Execute generate -> audits -> pipeline and write the configured artifacts.

    ``stages`` is ``"audit"`` (audits only), ``"interior"`` (audits skipped,
    interior estimates at ``cfg.interior_points``) or ``"pipeline"``.
    """
    rng = np.random.default_rng(cfg.seed)
    report = {"config": cfg.map, "field": cfg.field, "growth": cfg.growth, "seed": cfg.seed, "stages": {}}
    try:
        fld, params, spec = _build(cfg)
    except (ConfigError, ValueError, KeyError) as e:
        return _finish(cfg, RunResult(EXIT_CODES["config"], "config", {**report, "error": str(e)}))
    try:
        sample = generate_map(spec)
    except ConfigError as e:
        return _finish(cfg, RunResult(EXIT_CODES["config"], "config", {**report, "error": str(e)}))
    except (ConvergenceError, DegenerateError) as e:
        return _finish(cfg, RunResult(EXIT_CODES["generation"], "generation", {**report, "error": str(e)}))
    report["map"] = {"kind": sample.kind, "K": sample.K, "a": sample.a,
                     "params": {k: v for k, v in sample.params.items() if k != "coeffs"}}

    if stages == "interior":
        return _finish(cfg, _interior(sample, fld, params, cfg, report))

    for name, rep in audit_stages(sample, fld, params, cfg, rng):
        report["stages"][name] = rep.to_dict()
        if not rep.passed:
            report["pass"] = False
            return _finish(cfg, RunResult(EXIT_CODES[name], name, report))
    if stages == "audit":
        report["pass"] = True
        return _finish(cfg, RunResult(0, "ok", report))

    try:
        res = lipschitz_pipeline(sample, fld, params, sample.K, sample.a, **cfg.grid)
    except AlphaExhaustedError as e:
        report["alpha_curve"] = e.curve
        report["error"] = str(e)
        report["pass"] = False
        return _finish(cfg, RunResult(EXIT_CODES["alpha_exhausted"], "alpha_exhausted", report))
    except InfeasibleLambdaError as e:
        report["error"] = str(e)
        report["pass"] = False
        return _finish(cfg, RunResult(EXIT_CODES["lambda_infeasible"], "lambda_infeasible", report))
    report.update(res.report)
    report["constants"].update(_flat_constants(res))
    code = 0 if res.passed else EXIT_CODES["final_bound"]
    return _finish(cfg, RunResult(code, "ok" if res.passed else "final_bound", report, res.rows))


def _flat_constants(res):
    if not res.interior:
        return {}
    w = max(res.interior, key=lambda e: e.gradient_bound)
    return {"lambda": w.lam, "A0": w.A0, "B0": w.B0, "C0": w.C0, "mu1": w.mu1,
            "C0_coef": w.C0_coef, "C1_coef": w.C1_coef}


def _interior(sample, fld, params, cfg, report):
    """Interior estimate per component at each configured base point."""
    rows, out = [], []
    modulus = lambda t: qc_modulus(t, sample.K, sample.a)
    try:
        for p in cfg.interior_points:
            a = complex(p[0], p[1])
            rho = 1 - abs(a)
            for i in (0, 1):
                u = sample.component(i)
                M = local_sup(u, a, rho)
                est = interior_estimate(a, fld.Lambda, fld.LipL, params.B, params.Gamma, modulus, M, rho_a=rho)
                g = float(_grad_modulus(u, np.array([a]))[0])
                b = est.bound(M)
                rows.append((a, g, b))
                d = est.to_dict()
                d.update({"component": i, "grad_fd": g, "bound_local": b, "pass": g <= b})
                out.append(d)
    except InfeasibleLambdaError as e:
        report["error"] = str(e)
        return RunResult(EXIT_CODES["lambda_infeasible"], "lambda_infeasible", report)
    report["interior"] = out
    ok = all(d["pass"] for d in out)
    report["pass"] = ok
    return RunResult(0 if ok else EXIT_CODES["final_bound"], "ok" if ok else "final_bound", report, rows)


def _finish(cfg, result):
    result.report["exit_code"] = result.exit_code
    result.report["stage"] = result.stage
    if cfg.output_json:
        write_json(result.report, cfg.output_json)
    if cfg.output_csv and result.rows:
        write_csv(result.rows, cfg.output_csv)
    return result
