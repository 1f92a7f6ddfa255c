"""Command line front end: ``varconv analyze|bounds|oracle|compare|catalog``."""
from __future__ import annotations

import argparse
import contextlib
import datetime as _dt
import json
import math
import random
import sys
import time
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, kernels
from .catalog import ANCHORS, CATALOG, CatalogError, builtin, load_spec
from .criteria import NotTiltStable, bound_report, test_neighborhood, test_pointbased
from .graph import PreconditionError, Window, check_anchor, closedness_probe, default_resolution, localization
from .oracles import (
    build_affine_minorant,
    check_monotone,
    check_quadratic_growth,
    estimate_prox_regularity,
    tilt_probe,
    varco_empirical,
)
from .scderiv import hausdorff_dz, sc_derivative, sc_derivative_numeric
from .subspace import check_pw_axioms

DEFAULTS = {"eps": 0.25, "s": [0.0]}
ORACLE_KEYS = ("growth", "monotone", "plain", "prox", "tilt", "minorant",
               "varco_empirical", "numeric_sc", "neighborhood", "closedness")
TILT_RESOLUTION = {1: 401, 2: 401, 3: 41, 4: 17}


class ConfigError(ValueError):
    """Invalid analysis config; the message carries line/field diagnostics."""


# ---------------------------------------------------------------------------
# config


def _schema():
    return json.loads(resources.files("varconv").joinpath("schemas/config.json").read_text())


def _line_of(text, path):
    """Best-effort line number of a JSON path inside the source text."""
    pos = 0
    for elem in path:
        if isinstance(elem, str):
            k = text.find(f'"{elem}"', pos)
            if k >= 0:
                pos = k
    return text.count("\n", 0, pos) + 1


def _vec(v):
    return [float(t) for t in np.atleast_1d(np.asarray(v, dtype=float))]


def parse_config(source, overrides=None):
    """Load, validate and complete an analysis config (path, JSON text or dict)."""
    base_dir = Path(".")
    if isinstance(source, dict):
        raw, text = dict(source), json.dumps(source, indent=1)
    else:
        p = Path(source)
        if p.exists():
            text = p.read_text()
            base_dir = p.parent
        else:
            text = str(source)
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    for k, v in (overrides or {}).items():
        if v is not None:
            raw[k] = v
    errors = sorted(jsonschema.Draft202012Validator(_schema()).iter_errors(raw), key=lambda e: list(e.path))
    if errors:
        msgs = []
        for e in errors:
            field = "/".join(str(t) for t in e.path) or "<root>"
            msgs.append(f"line {_line_of(text, list(e.path))}, field {field}: {e.message}")
        raise ConfigError("; ".join(msgs))
    fn = raw["function"]
    try:
        if isinstance(fn, str):
            f = builtin(fn)
        elif "file" in fn:
            f = load_spec(base_dir / fn["file"])
        else:
            f = load_spec(fn)
    except (CatalogError, OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"field function: {exc}") from exc
    xbar, xstar = _vec(raw["anchor"]), _vec(raw["subgradient"])
    if len(xbar) != f.dim or len(xstar) != f.dim:
        raise ConfigError(f"field anchor/subgradient: expected dimension {f.dim}")
    try:
        check_anchor(f, xbar, xstar)
    except PreconditionError as exc:
        raise ConfigError(f"field subgradient: invalid anchor pair: {exc}") from exc
    cfg = dict(raw)
    cfg["eps"] = float(raw.get("eps", DEFAULTS["eps"]))
    cfg["s"] = [float(s) for s in raw.get("s", DEFAULTS["s"])]
    cfg["resolution"] = int(raw.get("resolution", default_resolution(f.dim)))
    cfg["u_radius"] = float(raw.get("u_radius", cfg["eps"]))
    cfg["v_radius"] = float(raw.get("v_radius", cfg["eps"]))
    cfg["plain_v_radius"] = float(raw.get("plain_v_radius", cfg["v_radius"]))
    fbar = f.evaluate(xbar)
    cfg["rho"] = float(raw.get("rho", fbar + cfg["eps"]))
    if not cfg["rho"] > fbar:
        raise ConfigError(f"field rho: must exceed f(anchor) = {fbar}")
    cfg["oracles"] = {k: bool(raw.get("oracles", {}).get(k, True)) for k in ORACLE_KEYS}
    tilt = raw.get("tilt", {})
    cfg["tilt"] = {
        "gamma": float(tilt.get("gamma", 0.5)),
        "v_radius": float(tilt.get("v_radius", 0.2)),
        "resolution": int(tilt.get("resolution", TILT_RESOLUTION.get(f.dim, 17))),
    }
    cfg["output"] = {"path": raw.get("output", {}).get("path"), "format": raw.get("output", {}).get("format", "json")}
    cfg["xbar"], cfg["xstar"], cfg["f"] = xbar, xstar, f
    return cfg


# ---------------------------------------------------------------------------
# report helpers


def _num(value, op):
    if isinstance(value, NotTiltStable):
        return {"value": "not-tilt-stable", "op": op, "reason": value.reason}
    v = float(value)
    if math.isinf(v):
        return {"value": "inf" if v > 0 else "-inf", "op": op}
    return {"value": v, "op": op}


def _pair(p):
    return {"P": p.P.tolist(), "W": p.W.tolist()}


def _plain(obj):
    """Make nested witnesses JSON-serializable."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "P") and hasattr(obj, "W"):
        return _pair(obj)
    if isinstance(obj, Window):
        return {"u_radius": obj.u_radius, "v_radius": obj.v_radius, "rho": obj.rho}
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _oracle(res, op):
    return {
        "passed": bool(res.passed),
        "margin": _num(res.margin, op),
        "normalized_margin": _num(res.normalized_margin, op),
        "level": res.level,
        "witness": _plain(res.witness),
    }


class _Timer:
    def __init__(self):
        self.times = {}

    @contextlib.contextmanager
    def __call__(self, name):
        t = time.perf_counter()
        yield
        self.times[name] = round(time.perf_counter() - t, 6)


def _config_echo(cfg):
    keep = ("function", "anchor", "subgradient", "eps", "u_radius", "v_radius", "plain_v_radius",
            "rho", "resolution", "s", "oracles", "tilt")
    return {k: cfg[k] for k in keep if k in cfg}


def run_analysis(cfg, sections=("bounds", "oracles")):
    """Execute the pipeline and return the report as an ordered dict."""
    f, xbar, xstar = cfg["f"], cfg["xbar"], cfg["xstar"]
    eps, res = cfg["eps"], cfg["resolution"]
    fbar = f.evaluate(xbar)
    win = Window(xbar, xstar, cfg["u_radius"], cfg["v_radius"], cfg["rho"])
    toggles = cfg["oracles"]
    timer = _Timer()
    rep = {"version": __version__, "input": _config_echo(cfg), "function": f.to_dict(),
           "anchor": {"x": xbar, "xstar": xstar, "fval": _num(fbar, "evaluate")}}

    with timer("sc_derivative"):
        S = sc_derivative(f, xbar, xstar)
    rep["pwset"] = {
        "provenance": S.provenance, "op": "sc_derivative",
        "pairs": [dict(_pair(p), axioms=check_pw_axioms(p.P, p.W)["passed"]) for p in S],
    }
    br = bound_report(S)
    rep["bounds"] = {
        "varco_bound": _num(br.varco, "varco_bound"),
        "tilt_bound": _num(br.tilt, "tilt_bound"),
        "varco_pair": _pair(br.varco_pair),
        "tilt_pair": _pair(br.tilt_pair),
        "flags": sorted(set(br.flags)),
    }
    checks = []
    verdicts = []
    for s in cfg["s"]:
        row = {"s": s}
        if "bounds" in sections:
            pb = test_pointbased(S, s)
            row["pointbased"] = {"passed": pb.passed, "boundary": pb.boundary,
                                 "margin": _num(pb.margin, "test_pointbased")}
            if toggles["neighborhood"]:
                with timer(f"test_neighborhood[s={s}]"):
                    nb = test_neighborhood(f, xbar, xstar, s, win, res)
                row["neighborhood"] = {"passed": nb.passed, "margin": _num(nb.margin, "test_neighborhood"),
                                       "witness": _plain(nb.witness)}
        if "oracles" in sections:
            if toggles["growth"]:
                with timer(f"check_quadratic_growth[s={s}]"):
                    row["growth"] = _oracle(check_quadratic_growth(f, xbar, xstar, s, win, res),
                                            "check_quadratic_growth")
            if toggles["monotone"]:
                with timer(f"check_monotone[s={s}]"):
                    row["monotone_attentive"] = _oracle(check_monotone(f, xbar, xstar, s, eps, "attentive", res),
                                                        "check_monotone")
            if toggles["plain"]:
                with timer(f"check_monotone_plain[s={s}]"):
                    row["monotone_plain"] = _oracle(
                        check_monotone(f, xbar, xstar, s, eps, "plain", res, v_radius=cfg["plain_v_radius"]),
                        "check_monotone")
        verdicts.append(row)
        if "pointbased" in row and not row["pointbased"]["boundary"]:
            ref = row["pointbased"]["passed"]
            for key in ("growth", "monotone_attentive"):
                if key in row:
                    ok = row[key]["passed"] == ref
                    checks.append({"name": f"pointbased vs {key} at s={s}", "status": "ok" if ok else "FAIL",
                                   "detail": f"pointbased={ref}, {key}={row[key]['passed']}"})
    rep["verdicts"] = verdicts

    if "oracles" in sections:
        if toggles["varco_empirical"]:
            vb = br.varco
            lo, hi = (vb - 4.0, vb + 4.0) if math.isfinite(vb) else (-4.0, 8.0)
            with timer("varco_empirical"):
                b = varco_empirical(f, xbar, xstar, eps, res, lo, hi)
            rep["varco_empirical"] = {"s_pass": _num(b.s_pass, "varco_empirical"),
                                      "s_fail": _num(b.s_fail, "varco_empirical"),
                                      "one_sided": b.one_sided}
            if math.isfinite(vb):
                ok = b.s_pass - 1e-3 <= vb <= b.s_fail + 1e-3
            else:
                ok = b.one_sided == "upper"
            checks.append({"name": "varco_empirical vs varco_bound", "status": "ok" if ok else "FAIL",
                           "detail": f"bracket [{b.s_pass}, {b.s_fail}], bound {vb}"})
        if toggles["prox"]:
            with timer("estimate_prox_regularity"):
                pr = estimate_prox_regularity(f, xbar, xstar, win, res)
            rep["prox_parameter"] = dict(_num(pr.value, "estimate_prox_regularity"), witness=_plain(pr.witness))
        if toggles["tilt"]:
            t = cfg["tilt"]
            with timer("tilt_probe"):
                tp = tilt_probe(f, xbar, t["gamma"], t["v_radius"], t["resolution"], xstar=xstar)
            rep["tilt_probe"] = {
                "tilt_stable_supported": tp.tilt_stable, "multivalued": tp.multivalued, "jump": tp.jump,
                "lipschitz": _num(tp.lipschitz, "tilt_probe"), "reason": tp.reason,
                "gamma": t["gamma"], "v_radius": t["v_radius"], "resolution": t["resolution"],
            }
            tb = br.tilt
            if isinstance(tb, NotTiltStable):
                ok = not tp.tilt_stable
            else:
                ok = tp.tilt_stable and abs(tp.lipschitz - tb) <= 0.05 * tb + 1e-6
            checks.append({"name": "tilt_bound vs tilt_probe", "status": "ok" if ok else "FAIL",
                           "detail": f"bound {tb!r}, probe {tp.reason}, lipschitz {tp.lipschitz:.6g}"})
        g = localization(f, xbar, xstar, eps, "attentive", res)
        if toggles["minorant"] and len(g):
            with timer("build_affine_minorant"):
                mc = build_affine_minorant(g)
            rep["minorant"] = {"holds": mc.holds, "max_excess": _num(mc.max_excess, "build_affine_minorant"),
                               "excess_at": mc.excess_at, "graph_gap": _num(mc.graph_gap, "build_affine_minorant")}
            certified = br.varco > 0 or any(
                r["s"] == 0.0 and r.get("growth", {}).get("passed") and r.get("monotone_attentive", {}).get("passed")
                for r in verdicts)
            if certified:
                checks.append({"name": "certified convexity vs minorant", "status": "ok" if mc.holds else "FAIL",
                               "detail": f"max excess {mc.max_excess:.3g}"})
        if toggles["numeric_sc"]:
            with timer("sc_derivative_numeric"):
                N = sc_derivative_numeric(g, xbar, xstar)
            d = hausdorff_dz(S, N)
            rep["sc_numeric"] = {"pairs": [_pair(p) for p in N], "hausdorff_dz": _num(d, "hausdorff_dz")}
            checks.append({"name": "sc_derivative_numeric vs sc_derivative", "status": "ok" if d <= 1e-6 else "FAIL",
                           "detail": f"d_Z-Hausdorff {d:.3g}"})
        if toggles["closedness"]:
            with timer("closedness_probe"):
                cp = closedness_probe(g)
            rep["closedness"] = {"passed": cp["passed"],
                                 "max_fval_deviation": _num(cp["max_fval_deviation"], "closedness_probe"),
                                 "flagged": cp["flagged"][:5]}
    rep["cross_checks"] = checks
    rep["summary"] = _summary(rep, br.varco)
    rep["meta"] = {"timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
                   "kernel_backend": kernels.BACKEND, "timings": timer.times}
    return rep


def _summary(rep, varco):
    lines = []
    for row in rep["verdicts"]:
        s = row["s"]
        name = "convex" if s == 0 else f"{s:g}-convex"
        pb = row.get("pointbased")
        oracles = [row[k]["passed"] for k in ("growth", "monotone_attentive") if k in row]
        if pb is not None and pb["boundary"]:
            if oracles:
                tag = "variationally " + name if all(oracles) else "not variationally " + name
                lines.append(f"s={s:g}: {tag} at bound")
            else:
                lines.append(f"s={s:g}: at bound (oracles needed to decide)")
        else:
            ok = pb["passed"] if pb is not None else (all(oracles) if oracles else None)
            if ok is not None:
                lines.append(f"s={s:g}: {'' if ok else 'not '}variationally {name}")
    fails = [c["name"] for c in rep["cross_checks"] if c["status"] == "FAIL"]
    return {"verdicts": lines, "varco": _num(varco, "varco_bound"),
            "disagreements": len(fails), "status": "FAIL" if fails else "ok"}


def run_compare(cfg):
    """Attentive vs plain side by side."""
    f, xbar, xstar, eps, res = cfg["f"], cfg["xbar"], cfg["xstar"], cfg["eps"], cfg["resolution"]
    out = {"version": __version__, "input": _config_echo(cfg), "modes": {}}
    for mode in ("attentive", "plain"):
        vr = cfg["v_radius"] if mode == "attentive" else cfg["plain_v_radius"]
        g = localization(f, xbar, xstar, eps, mode, res, v_radius=vr)
        S = sc_derivative(f, xbar, xstar, mode)
        cp = closedness_probe(g)
        row = {"points": len(g), "v_radius": vr,
               "pwset": [_pair(p) for p in S],
               "closedness": {"passed": cp["passed"], "flagged": cp["flagged"][:5]},
               "monotone": []}
        for s in cfg["s"]:
            r = check_monotone(f, xbar, xstar, s, eps, mode, res, v_radius=vr if mode == "plain" else None)
            row["monotone"].append(dict(_oracle(r, "check_monotone"), s=s))
        out["modes"][mode] = row
    out["cross_checks"] = []
    out["summary"] = {"status": "ok", "disagreements": 0}
    out["meta"] = {"timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}
    return out


# ---------------------------------------------------------------------------
# output


def emit_report(report, fmt="json", path=None):
    """Write the report (stable field order) to ``path`` or return the text."""
    text = json.dumps(report, indent=2) + "\n" if fmt == "json" else format_text(report)
    if path:
        Path(path).write_text(text)
    return text


def _fmt(v):
    if isinstance(v, dict) and "value" in v:
        v = v["value"]
    return f"{v:.10g}" if isinstance(v, float) else str(v)


def format_text(rep):
    out = [f"varconv {rep.get('version')}"]
    if "anchor" in rep:
        out.append(f"function : {json.dumps(rep['input']['function'])}")
        out.append(f"anchor   : x = {rep['anchor']['x']}, x* = {rep['anchor']['xstar']}")
    if "pwset" in rep:
        out.append(f"pwset    : {len(rep['pwset']['pairs'])} pair(s), {rep['pwset']['provenance']}")
        for p in rep["pwset"]["pairs"]:
            out.append(f"  P = {p['P']}  W = {p['W']}")
    if "bounds" in rep:
        out.append(f"varco    : {_fmt(rep['bounds']['varco_bound'])}")
        out.append(f"tilt     : {_fmt(rep['bounds']['tilt_bound'])}")
    if "verdicts" in rep:
        cols = ["pointbased", "neighborhood", "growth", "monotone_attentive", "monotone_plain"]
        out.append("")
        out.append("s          " + " ".join(f"{c:>19s}" for c in cols))
        for row in rep["verdicts"]:
            cells = []
            for c in cols:
                if c not in row:
                    cells.append(f"{'-':>19s}")
                    continue
                tag = "pass" if row[c]["passed"] else "FAIL"
                if c == "pointbased" and row[c]["boundary"]:
                    tag += " (bound)"
                cells.append(f"{tag:>19s}")
            out.append(f"{row['s']:<10g} " + " ".join(cells))
    for key, label in (("varco_empirical", "varco_empirical"), ("prox_parameter", "prox r"),
                       ("tilt_probe", "tilt_probe"), ("minorant", "minorant"), ("sc_numeric", "sc_numeric")):
        if key in rep:
            r = rep[key]
            if key == "varco_empirical":
                out.append(f"{label:9s}: [{_fmt(r['s_pass'])}, {_fmt(r['s_fail'])}]")
            elif key == "prox_parameter":
                out.append(f"{label:9s}: {_fmt(r)}")
            elif key == "tilt_probe":
                out.append(f"{label:9s}: {r['reason']}, lipschitz {_fmt(r['lipschitz'])}")
            elif key == "minorant":
                out.append(f"{label:9s}: {'holds' if r['holds'] else 'FAILS'} (max excess {_fmt(r['max_excess'])})")
            else:
                out.append(f"{label:9s}: d_Z-Hausdorff {_fmt(r['hausdorff_dz'])}")
    if "modes" in rep:
        for mode, row in rep["modes"].items():
            mono = ", ".join(f"s={m['s']:g}: {'pass' if m['passed'] else 'FAIL'}" for m in row["monotone"])
            out.append(f"{mode:9s}: {row['points']} points, {len(row['pwset'])} pair(s), "
                       f"closedness {'pass' if row['closedness']['passed'] else 'FLAGGED'}, monotone {mono}")
    if rep.get("cross_checks"):
        out.append("")
        out.append("cross-checks:")
        for c in rep["cross_checks"]:
            out.append(f"  [{c['status']:>4s}] {c['name']}: {c['detail']}")
    if "summary" in rep:
        for line in rep["summary"].get("verdicts", []):
            out.append(f"verdict  : {line}")
        out.append(f"status   : {rep['summary']['status']}")
    return "\n".join(out) + "\n"


@contextlib.contextmanager
def _no_randomness():
    """Make any use of the global random generators fail loudly."""
    def deny(*_a, **_k):
        raise RuntimeError("randomness used in a --seedless run")

    saved = (np.random.default_rng, np.random.random, np.random.rand, np.random.seed, random.random)
    np.random.default_rng = np.random.random = np.random.rand = np.random.seed = deny
    random.random = deny
    try:
        yield
    finally:
        (np.random.default_rng, np.random.random, np.random.rand, np.random.seed, random.random) = saved


def _catalog_listing():
    rows = []
    for name, desc in CATALOG.items():
        anchors = [a for key, lst in ANCHORS.items() if key.split("(")[0] == name.split("(")[0] for a in
                   [(key, x, v) for x, v in lst]]
        rows.append({"name": name, "description": desc,
                     "anchors": [{"entry": k, "x": x, "xstar": v} for k, x, v in anchors]})
    return rows


def build_parser():
    p = argparse.ArgumentParser(prog="varconv", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("analyze", "criteria and oracles"), ("bounds", "criteria only"),
                        ("oracle", "oracles only"), ("compare", "attentive vs plain side by side")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config_path", nargs="?", help="analysis config (JSON)")
        sp.add_argument("--config", dest="config_opt", help="analysis config (JSON)")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("json", "text"), help="report format (default json)")
        sp.add_argument("--resolution", type=int, help="grid points per axis")
        sp.add_argument("--eps", type=float, help="localization radius")
        sp.add_argument("--s", type=float, action="append", help="s value to test (repeatable)")
        sp.add_argument("--seedless", action="store_true", help="fail if any randomness is used")
    cp = sub.add_parser("catalog", help="list builtin functions")
    cp.add_argument("--format", choices=("json", "text"), default="text")
    cp.add_argument("--out")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "catalog":
        rows = _catalog_listing()
        if args.format == "json":
            text = json.dumps(rows, indent=2) + "\n"
        else:
            text = "".join(
                f"{r['name']:20s} {r['description']}\n"
                + "".join(f"{'':20s}   anchor {a['entry']}: x={a['x']}, x*={a['xstar']}\n" for a in r["anchors"])
                for r in rows)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    source = args.config_opt or args.config_path
    if not source:
        print("varconv: a config file is required", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(source, {"resolution": args.resolution, "eps": args.eps, "s": args.s})
    except ConfigError as exc:
        print(f"varconv: config error: {exc}", file=sys.stderr)
        return 2
    guard = _no_randomness() if args.seedless else contextlib.nullcontext()
    with guard:
        if args.command == "compare":
            rep = run_compare(cfg)
        else:
            sections = {"analyze": ("bounds", "oracles"), "bounds": ("bounds",), "oracle": ("oracles",)}
            rep = run_analysis(cfg, sections[args.command])
    fmt = args.format or cfg["output"]["format"]
    path = args.out or cfg["output"]["path"]
    text = emit_report(rep, fmt, path)
    if not path:
        sys.stdout.write(text)
    return 1 if rep["summary"]["disagreements"] else 0


if __name__ == "__main__":
    sys.exit(main())
