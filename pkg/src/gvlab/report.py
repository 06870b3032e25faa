"""Run configurations, reports and convergence sweeps.

Reports are plain dicts with a fixed key order, serialized by hand so every
float carries 17 significant digits and two runs of one config give the same
bytes.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import scenarios as S
from .checks import ACCEPTANCE, REGISTRY, CheckResult, _le, probe
from .geometry import PairError, frenet, frenet_residuals, second_fundamental
from .gv import eta, gv_direct, gv_reinhart_wood

VERBS = ("gv", "critical", "variation", "jacobi", "frenet", "sweep", "list-scenarios")
SWEEP_AXES = ("grid", "dt", "amplitude")
REPORT_FIELDS = ("scenario", "grid", "gv_direct", "gv_rw", "residual_norms", "variations",
                 "checks", "timestamp")


class ConfigError(ValueError):
    """Bad verb, scenario, check name or option value."""


@dataclass
class RunConfig:
    verb: str = "gv"
    scenario: str = "contact"
    grid: tuple[int, int, int] = (64, 64, 64)
    checks: tuple[str, ...] = ()
    tol_scale: float = 1.0
    dt: float = 1e-3
    timestamp: bool = True
    seed: int = 0
    kinds: tuple[str, ...] = ("scale", "shift", "tilt")
    sweep_axis: str = "grid"
    sweep_values: tuple[float, ...] = ()
    sweep_param: str = ""
    params: dict = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if self.verb not in VERBS:
            raise ConfigError(f"unknown verb {self.verb!r}; choose from {', '.join(VERBS)}")
        if self.scenario not in S.CATALOG:
            raise ConfigError(f"unknown scenario {self.scenario!r}; known: {', '.join(sorted(S.CATALOG))}")
        if len(self.grid) != 3 or min(self.grid) < 8:
            raise ConfigError(f"grid needs three sizes of at least 8, got {self.grid}")
        if self.tol_scale <= 0 or self.dt <= 0:
            raise ConfigError("tol-scale and dt must be positive")
        for k in self.kinds:
            if k not in ("scale", "shift", "tilt"):
                raise ConfigError(f"unknown variation kind {k!r}")
        self.checks = tuple(resolve_check(c) for c in self.checks)
        if self.verb == "sweep":
            if self.sweep_axis not in SWEEP_AXES:
                raise ConfigError(f"sweep axis must be one of {', '.join(SWEEP_AXES)}")
            if len(self.sweep_values) < 3:
                raise ConfigError("a sweep needs at least three values to estimate an order")
            if self.sweep_axis == "amplitude" and not self.sweep_param:
                raise ConfigError("an amplitude sweep needs sweep_param (a scenario parameter name)")
        return self


def resolve_check(name: str) -> str:
    """Accept a registry name or an acceptance number."""
    name = name.strip()
    if name.isdigit() and int(name) in ACCEPTANCE:
        return ACCEPTANCE[int(name)]
    if name in REGISTRY or name == "truth":
        return name
    raise ConfigError(f"unknown check {name!r}; known: truth, {', '.join(REGISTRY)} or 1-{len(ACCEPTANCE)}")


# --- serialization ---------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return "%.17g" % x


def _encode(o, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(o, (bool, np.bool_)):
        return "true" if o else "false"
    if o is None:
        return "null"
    if isinstance(o, (int, np.integer)):
        return str(int(o))
    if isinstance(o, (float, np.floating)):
        return _fmt_float(float(o))
    if isinstance(o, str):
        import json
        return json.dumps(o)
    if isinstance(o, dict):
        if not o:
            return "{}"
        items = [f'{pad}{_encode(str(k), indent, 0)}: {_encode(v, indent, level + 1)}' for k, v in o.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(o, (list, tuple)):
        if not o:
            return "[]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in o) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(o).__name__}")


def render_json(report: dict, indent: int = 2) -> str:
    return _encode(report, indent, 0) + "\n"


# --- report pieces ---------------------------------------------------------------------

def _norm(f: np.ndarray) -> float:
    return float(np.max(np.abs(f))) if np.size(f) else 0.0


def _empty_report(cfg: RunConfig) -> dict:
    rep = {k: None for k in REPORT_FIELDS}
    rep.update(scenario=cfg.scenario, grid=list(cfg.grid), residual_norms={}, variations=[], checks=[])
    if cfg.timestamp:
        rep["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    else:
        del rep["timestamp"]
    return rep


def _gv_fields(sc: S.Scenario, rep: dict):
    periodic = sc.grid.fully_periodic
    rep["gv_direct"] = gv_direct(sc.pair) if periodic else None
    try:
        rw = gv_reinhart_wood(sc.cp, sc.k_min)
    except PairError:
        return None
    rep["gv_rw"] = rw.gv_rw if periodic else None
    rep["residual_norms"]["rw_pointwise"] = rw.residual_max
    rep["residual_norms"]["frenet_mask_fraction"] = rw.mask_fraction
    return rw


def _critical_fields(sc: S.Scenario, rep: dict):
    from .critical import el_report, rectifying_plane_check
    er = el_report(sc.cp, sc.k_min, sc.mask_margin)
    rn = rep["residual_norms"]
    for key, val in er.norms.items():
        rn[key] = val
    rn["integrable"] = er.integrable
    fd = frenet(sc.cp, sc.k_min)
    if fd.valid.any():
        rc = rectifying_plane_check(sc.cp, fd, second_fundamental(sc.cp, fd))
        rn["rectifying"] = {"verdict": rc.verdict, "max_violation": rc.max_violation,
                            "worst_index": list(rc.worst_index), "tcal_min": rc.tcal_min}


def _frenet_fields(sc: S.Scenario, rep: dict):
    fd = frenet(sc.cp, sc.k_min)
    rn = rep["residual_norms"]
    rn["frenet_mask_fraction"] = fd.mask_fraction
    if fd.valid.any():
        for key, val in frenet_residuals(sc.cp, fd).items():
            rn[f"frenet_{key}"] = _norm(np.where(fd.valid, val, 0.0))
        rn["k_max"] = float(fd.k.max())
        rn["tau_max"] = _norm(np.where(fd.valid, fd.tau, 0.0))


def _variation_rows(sc: S.Scenario, cfg: RunConfig) -> list[dict]:
    from .variations import (finite_difference_variation, first_variation, frenet_variation_formulas,
                             observed_dt_order, second_variation)
    dp = sc.pair
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for kind in cfg.kinds:
        vs = probe(dp, kind, rng, second=True)
        vs1 = type(vs)(kind, vs.generator)
        a1, a2 = first_variation(dp, vs1), second_variation(dp, vs)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            f1 = finite_difference_variation(dp, vs1, cfg.dt, 1)
            f2 = finite_difference_variation(dp, vs, 10 * cfg.dt, 2)
            o1 = observed_dt_order(dp, vs1, a1, 20 * cfg.dt, 1, 1e-9 * max(1.0, abs(a1)))[2]
            o2 = observed_dt_order(dp, vs, a2, 100 * cfg.dt, 2, 1e-7 * max(1.0, abs(a2)))[2]
        frenet_val = None
        if sc.metric is not None and sc.grid.fully_periodic and (kind == "scale" or sc.k_min > 1e-6):
            try:
                frenet_val = frenet_variation_formulas(sc.cp, vs1, frenet(sc.cp, sc.k_min))
            except PairError:
                frenet_val = None
        for order, an, fdr, o in ((1, a1, f1, o1), (2, a2, f2, o2)):
            rows.append({"kind": kind, "order": order, "analytic": an, "fd": fdr.raw,
                         "richardson": fdr.richardson, "dt": fdr.dt, "observed_order": o,
                         "frenet": frenet_val if order == 1 else None})
    return rows


def _jacobi_fields(cfg: RunConfig, rep: dict):
    from .calculus import ChartGrid
    from .checks import random_jacobi_spec
    from .jacobi import build_jacobi_field
    grid = ChartGrid.chart(cfg.grid, 1.0)
    rng = np.random.default_rng(cfg.seed)
    jr = build_jacobi_field(random_jacobi_spec(grid, rng), 1e-6 * cfg.tol_scale)
    rn = rep["residual_norms"]
    rn["jacobi_D"] = jr.D_max
    rn["jacobi_D_exact"] = jr.D_exact_max
    rn["jacobi_constraints"] = jr.constraints_max
    rn["jacobi_coefficients"] = [float(np.max(np.abs(r))) for r in jr.coefficient_residuals]
    rep["checks"].append(_group("jacobi_field", [_le("jacobi_field.D", jr.D_max, 1e-6 * cfg.tol_scale)]))


def truth_checks(sc: S.Scenario, rep: dict, tol_scale: float) -> list[CheckResult]:
    """What each scenario's analytic description promises, checked on this grid."""
    name, out = sc.name, []
    gv = rep.get("gv_direct")
    if gv is None and sc.grid.fully_periodic:
        gv = gv_direct(sc.pair)
    if name in ("contact", "foliation", "warped", "twisted_product", "integrable", "rectifying"):
        out.append(_le("truth.gv_zero", abs(gv), 1e-8 * tol_scale))
    if name in ("contact", "foliation", "contact_chart"):
        out.append(_le("truth.eta_zero", eta(sc.pair).max_norm(), 1e-12 * tol_scale))
    if name == "tilted":
        rw = gv_reinhart_wood(sc.cp, sc.k_min)
        out.append(_le("truth.rw_gap", abs(rw.gv_direct - rw.gv_rw),
                       1e-4 * max(1.0, abs(rw.gv_direct)) * tol_scale, "loose bound; 96^3 meets 1e-6"))
    if name in ("quadratic_chart", "cubic_chart"):
        from .critical import lt3_residual
        r = lt3_residual(sc.pair).comps[0]
        target = 6 * sc.params["cubic"]
        out.append(_le("truth.lt3_dx1", _norm(r - target), 1e-6 * tol_scale, f"expected {target:g}"))
    return out


def _group(name: str, rows: list[CheckResult]) -> dict:
    return {"check": name, "passed": all(r.passed for r in rows), "results": [r.as_dict() for r in rows]}


# --- entry points ----------------------------------------------------------------------

def list_scenarios() -> list[dict]:
    out = []
    for name in sorted(S.CATALOG):
        sc = S.build(name, 8)
        out.append({"name": name, "truth": sc.truth, "periodic": sc.grid.fully_periodic,
                    "integrable": sc.integrable, "params": sc.params})
    return out


def run(cfg: RunConfig) -> dict:
    """Execute one verb and the requested checks; returns the report dict."""
    cfg.validate()
    if cfg.verb == "list-scenarios":
        return {"scenarios": list_scenarios()}
    if cfg.verb == "sweep":
        raise ConfigError("sweeps produce a table; call sweep()")
    rep = _empty_report(cfg)
    if cfg.verb == "jacobi":
        rep["scenario"] = "random_quadratic_chart"
        _jacobi_fields(cfg, rep)
    else:
        try:
            sc = S.build(cfg.scenario, cfg.grid, **cfg.params)
        except TypeError as exc:
            raise ConfigError(f"bad scenario parameters: {exc}") from None
        if sc.grid.fully_periodic:
            _gv_fields(sc, rep)
        if cfg.verb == "critical":
            _critical_fields(sc, rep)
        elif cfg.verb == "frenet":
            _frenet_fields(sc, rep)
        elif cfg.verb == "variation":
            rep["variations"] = _variation_rows(sc, cfg)
        if not cfg.checks:
            rows = truth_checks(sc, rep, cfg.tol_scale)
            if rows:
                rep["checks"].append(_group("truth", rows))
    for name in cfg.checks:
        if name == "truth":
            if cfg.verb == "jacobi":
                continue
            rows = truth_checks(sc, rep, cfg.tol_scale)
        else:
            rows = REGISTRY[name](tol_scale=cfg.tol_scale)
        rep["checks"].append(_group(name, rows))
    return rep


def all_passed(rep: dict) -> bool:
    return all(c["passed"] for c in rep.get("checks", []))


def _sweep_point(cfg: RunConfig, value: float) -> tuple[float, float]:
    """(quantity, error) for one point of a sweep."""
    from .variations import finite_difference_variation, first_variation
    axis = cfg.sweep_axis
    params = dict(cfg.params)
    n = cfg.grid
    if axis == "grid":
        n = int(value)
    elif axis == "amplitude":
        params[cfg.sweep_param] = value
    sc = S.build(cfg.scenario, n, **params)
    if axis == "dt":
        dp = sc.pair
        vs = probe(dp, cfg.kinds[0], np.random.default_rng(cfg.seed))
        an = first_variation(dp, vs)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            raw = finite_difference_variation(dp, vs, value, 1).raw
        return raw, abs(raw - an)
    if axis == "amplitude":
        from .calculus import exterior_d, wedge
        w = sc.pair.omega
        q = wedge(w, exterior_d(w)).comps[0]
        return float(np.min(q)), float(np.max(np.abs(q)))
    if sc.metric is not None or sc.grid.fully_periodic:
        rw = gv_reinhart_wood(sc.cp, sc.k_min)
        return rw.gv_direct, abs(rw.gv_direct - rw.gv_rw)
    from .critical import lt3_residual
    return float("nan"), lt3_residual(sc.pair).max_norm()


def sweep(cfg: RunConfig) -> list[dict]:
    """One row per axis value with the tracked error and log2 observed orders.

    grid: |gv_direct - gv_rw| (lt3 residual on bounded charts); dt: first-variation
    FD error of a seeded probe; amplitude: min and max of omega ^ d omega.
    """
    cfg.verb = "sweep"
    cfg.validate()
    rows = []
    for v in cfg.sweep_values:
        q, e = _sweep_point(cfg, v)
        rows.append({"axis": cfg.sweep_axis, "value": float(v), "quantity": q, "error": e,
                     "observed_order": float("nan")})
    for prev, cur in zip(rows, rows[1:]):
        r = prev["value"] / cur["value"] if cfg.sweep_axis == "dt" else cur["value"] / prev["value"]
        if prev["error"] > 0 and cur["error"] > 0 and r > 0 and r != 1:
            cur["observed_order"] = math.log(prev["error"] / cur["error"]) / math.log(r)
    return rows


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = list(rows[0]) if rows else []
    w.writerow(cols)
    for r in rows:
        w.writerow(["%.17g" % v if isinstance(v, float) else v for v in r.values()])
    return buf.getvalue()
