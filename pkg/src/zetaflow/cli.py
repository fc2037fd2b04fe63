"""Command-line front end: config loading, JSON envelopes, SVG plots.

One command, one config document (TOML or JSON, auto-detected by extension),
one JSON envelope on stdout.  Envelopes are deterministic byte-for-byte for
a fixed config and tool version; wall-clock data is deliberately excluded.

Exit codes: 0 success, 1 usage/validation error, 2 domain error (the error
name is recorded in the envelope).
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import DomainError, ConfigError, EmptyGeometry

try:
    import tomllib
except ModuleNotFoundError:                     # Python 3.10
    import tomli as tomllib


# -- config helpers -------------------------------------------------------

def _load_config(path):
    ext = os.path.splitext(path)[1].lower()
    with open(path, "rb") as f:
        if ext == ".toml":
            return tomllib.load(f)
        if ext == ".json":
            return json.load(f)
    raise ConfigError(f"unsupported config extension {ext!r} (use .toml or .json)")


def _require(cfg, allowed, required, where):
    unknown = set(cfg) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = set(required) - set(cfg)
    if missing:
        raise ConfigError(f"missing keys in {where}: {sorted(missing)}")


def _as_complex(v, where):
    if isinstance(v, dict):
        _require(v, {"re", "im"}, set(), where)
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    if isinstance(v, (int, float)):
        return complex(v)
    raise ConfigError(f"{where}: expected a complex value")


def _c_json(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _potential(cfg):
    from .potential import HoloPotential
    _require(cfg, {"num_vars", "terms"}, {"num_vars", "terms"}, "potential")
    coeffs = {}
    for t in cfg["terms"]:
        _require(t, {"exp", "re", "im"}, {"exp"}, "potential.terms[]")
        coeffs[tuple(t["exp"])] = complex(t.get("re", 0.0), t.get("im", 0.0))
    return HoloPotential(int(cfg["num_vars"]), coeffs)


def _phase(cfg, key="zeta"):
    from .potential import Phase
    v = cfg[key]
    if isinstance(v, dict) and "angle" in v:
        return Phase.from_angle(float(v["angle"]))
    z = _as_complex(v, key)
    if abs(z) == 0:
        raise ConfigError(f"{key} must be nonzero")
    return Phase(z / abs(z))


def _decimate(samples, keep=400):
    n = len(samples)
    if n <= keep:
        return list(samples)
    step = max(1, n // keep)
    out = list(samples[::step])
    if not np.isclose(out[-1], samples[-1]):
        out.append(samples[-1])
    return out


# -- command handlers -----------------------------------------------------

def _perturbed(cfg, warnings):
    """Apply the opt-in random linear perturbation (degenerate inputs are
    hard errors by default; this flag is the user-visible escape hatch)."""
    W = _potential(cfg["potential"])
    scale = float(cfg.get("perturb", 0.0))
    if scale:
        import random
        rng = random.Random(cfg.get("seed", 0))
        from .potential import HoloPotential
        coeffs = dict(W.coefficients)
        for k in range(W.num_vars):
            e = tuple(1 if i == k else 0 for i in range(W.num_vars))
            delta = complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))
            coeffs[e] = coeffs.get(e, 0.0) + delta
            warnings.append(
                f"applied random linear perturbation {delta!r} to exponent {e}")
        W = HoloPotential(W.num_vars, coeffs)
    return W


def _cmd_lg_crit(cfg):
    from .potential import find_critical_points
    _require(cfg, {"potential", "seed", "perturb"}, {"potential"}, "config")
    warnings = []
    W = _perturbed(cfg, warnings)
    cps = find_critical_points(W)
    return {"critical_points": [
        {"id": p.id, "position": [_c_json(z) for z in p.position],
         "value": _c_json(p.value), "hessian_det": _c_json(p.hessian_det)}
        for p in cps]}, None, warnings


def _cmd_lg_solitons(cfg):
    from .potential import find_critical_points
    from .solitons import build_bps_matrix
    _require(cfg, {"potential", "seed", "perturb", "samples"},
             {"potential"}, "config")
    warnings = []
    W = _perturbed(cfg, warnings)
    cps = find_critical_points(W)
    mat, records = build_bps_matrix(W, cps)
    payload = {
        "mu_matrix": [[int(x) for x in row] for row in mat.mu],
        "phases": [[_c_json(mat.phase_table[i, j]) for j in range(len(cps))]
                   for i in range(len(cps))],
        "solitons": [
            {"source": r.source, "target": r.target, "sign": r.sign,
             "energy": r.energy, "phase": _c_json(complex(r.phase)),
             **({"samples": [_c_json(z) for z in _decimate(r.samples, 200)]}
                if cfg.get("samples") else {})}
            for r in records],
    }
    geometry = [(f"soliton-{r.source}-{r.target}-{k}", _decimate(r.samples))
                for k, r in enumerate(records)]
    markers = [(f"p{p.id}", p.z) for p in cps] if W.num_vars == 1 else []
    return payload, ("solitons", geometry, markers), warnings


def _cmd_lg_thimble(cfg):
    from .potential import find_critical_points
    from .flow import trace_thimble, thimble_image_distance
    _require(cfg, {"potential", "point_id", "zeta", "seed"},
             {"potential", "point_id", "zeta"}, "config")
    W = _potential(cfg["potential"])
    zeta = _phase(cfg)
    cps = find_critical_points(W)
    pid = int(cfg["point_id"])
    p = next((c for c in cps if c.id == pid), None)
    if p is None:
        raise ConfigError(f"point_id {pid} not among critical points")
    th = trace_thimble(W, p, zeta, critical_points=cps)
    payload = {
        "point_id": pid, "zeta": _c_json(complex(zeta)),
        "ray_angles": list(th.ray_angles),
        "terminations": [r.termination for r in th.rays],
        "image_distance": thimble_image_distance(W, p, zeta, th),
        "contour": [_c_json(z) for z in _decimate(th.contour)],
    }
    geometry = [("thimble", _decimate(th.contour))]
    markers = [(f"p{c.id}", c.z) for c in cps]
    return payload, ("thimble", geometry, markers)


def _cmd_periods_stokes(cfg):
    from .potential import find_critical_points
    from .periods import PeriodConfig, stokes_matrix
    _require(cfg, {"potential", "eps", "seed"}, {"potential"}, "config")
    W = _potential(cfg["potential"])
    pc = PeriodConfig()
    if "eps" in cfg:
        eps = float(cfg["eps"])
        if eps <= 0:
            raise ConfigError("eps must be positive")
        pc.eps = eps
    cps = find_critical_points(W)
    return stokes_matrix(W, cps, pc), None


def _fs_config(cfg):
    from .polygons import CriticalValueConfig
    vals = []
    for v in cfg["values"]:
        _require(v, {"id", "re", "im"}, {"id"}, "values[]")
        vals.append((int(v["id"]), complex(v.get("re", 0.0), v.get("im", 0.0))))
    zeta = _as_complex(cfg["zeta"], "zeta")
    return CriticalValueConfig(vals, zeta / abs(zeta),
                               int(cfg.get("denominator", 10**6)))


def _fs_mu(cfg):
    mu = {}
    for a, b, m in cfg["mu"]:
        mu[(int(a), int(b))] = int(m)
        mu[(int(b), int(a))] = -int(m)
    return mu


def _cmd_fs_homs(cfg):
    from .polygons import build_hom
    _require(cfg, {"values", "zeta", "denominator", "mu", "seed"},
             {"values", "zeta", "mu"}, "config")
    vcfg = _fs_config(cfg)
    mu = _fs_mu(cfg)
    order = vcfg.ordering()
    table = {}
    polys = {}
    for p in order:
        for q in order:
            if p == q:
                continue
            hom = build_hom(vcfg, mu, p, q)
            table[f"{p}->{q}"] = hom.rank
            polys[f"{p}->{q}"] = sorted(
                list(qq.vertex_ids) for qq in hom.summands)
    payload = {"ordering": order, "ranks": table, "polygons": polys}
    values = {i: vcfg.raw[i] for i in vcfg.ids}
    allpolys = [tuple(p) for ps in polys.values() for p in ps]
    return payload, ("polygons", values, allpolys, vcfg.zeta_raw)


def _cmd_fs_mutate(cfg):
    from .polygons import DirectedCategory, mutate_collection
    _require(cfg, {"values", "zeta", "denominator", "mu", "pair",
                   "direction", "seed"},
             {"values", "zeta", "mu", "pair"}, "config")
    vcfg = _fs_config(cfg)
    cat = DirectedCategory(vcfg, _fs_mu(cfg))
    t_before, _ = cat.total_product()
    pair = tuple(int(x) for x in cfg["pair"])
    new = mutate_collection(cat, pair, cfg.get("direction", "ccw"))
    t_after, _ = new.total_product()
    return {
        "ordering_before": cat.ordering,
        "ordering_after": new.ordering,
        "mu_after": sorted([a, b, m] for (a, b), m in new.mu.items() if a < b),
        "product_invariant": t_before == t_after,
        "zeta_after": _c_json(new.cfg.zeta_raw),
    }, None


def _qd(cfg):
    from .network import QuadraticDifferential
    coeffs = [_as_complex(c, "poly[]") for c in cfg["poly"]]
    return QuadraticDifferential(coeffs)


def _cmd_sw_trace(cfg):
    from .network import launch, critical_directions, TraceConfig
    _require(cfg, {"poly", "zeta", "launches", "t_max", "seed"},
             {"poly", "zeta"}, "config")
    qd = _qd(cfg)
    zeta = _phase(cfg)
    tc = TraceConfig()
    if "t_max" in cfg:
        tc.t_max = float(cfg["t_max"])
    launches = cfg.get("launches")
    if launches is None:
        launches = [{"tp": i, "m": m}
                    for i in range(len(qd.turning_points)) for m in range(3)]
    paths = []
    payload_paths = []
    for l in launches:
        _require(l, {"tp", "m"}, {"tp", "m"}, "launches[]")
        i, m = int(l["tp"]), int(l["m"])
        ang = critical_directions(qd, i, zeta)[m]
        tr = launch(qd, i, ang, zeta, tc)
        name = f"traj-{i}-{m}"
        paths.append((name, _decimate(tr.samples)))
        payload_paths.append({
            "name": name, "termination": tr.termination,
            "hit_index": tr.hit_index, "t_end": tr.t_end,
            "samples": [_c_json(z) for z in _decimate(tr.samples, 200)]})
    markers = [(f"tp{i}", z) for i, z in enumerate(qd.turning_points)]
    payload = {
        "turning_points": [_c_json(z) for z in qd.turning_points],
        "paths": payload_paths,
    }
    return payload, ("network", paths, markers)


def _cmd_sw_spectrum(cfg):
    from .network import (CentralChargeMap, ScanConfig,
                          find_saddle_connections, support_check)
    _require(cfg, {"poly", "grid", "bisect_depth", "seed"}, {"poly"}, "config")
    qd = _qd(cfg)
    sc = ScanConfig()
    if "grid" in cfg:
        sc.grid = int(cfg["grid"])
        if sc.grid < 2:
            raise ConfigError("grid must be >= 2")
    if "bisect_depth" in cfg:
        sc.bisect_depth = int(cfg["bisect_depth"])
    zmap = CentralChargeMap(qd)
    spec = find_saddle_connections(qd, sc, zmap)
    a_const, passes = (0.0, {})
    if spec.entries:
        a_const, passes = support_check(spec, zmap)
    return {
        "turning_points": [_c_json(z) for z in qd.turning_points],
        "z_basis": [_c_json(z) for z in zmap.basis_values],
        "entries": [
            {"gamma": list(e.gamma), "omega": e.omega,
             "phase": _c_json(e.phase), "z": _c_json(e.z),
             "tp_pair": list(e.tp_pair), "t_length": e.t_length}
            for e in spec.entries],
        "support_A": a_const,
        "support_pass": {str(list(g)): bool(v) for g, v in passes.items()},
    }, None


def _cmd_dt_wcf(cfg):
    from .wallcross import wcf_check
    _require(cfg, {"spectrum_a", "spectrum_b", "pairing", "order", "seed"},
             {"spectrum_a", "spectrum_b", "pairing", "order"}, "config")

    def spec(entries, where):
        out = []
        for e in entries:
            _require(e, {"gamma", "omega", "z"}, {"gamma", "omega", "z"}, where)
            out.append((tuple(int(g) for g in e["gamma"]), int(e["omega"]),
                        _as_complex(e["z"], where + ".z")))
        return out

    pairing = tuple(tuple(int(x) for x in row) for row in cfg["pairing"])
    order = int(cfg["order"])
    if order < 1:
        raise ConfigError("order must be >= 1")
    equal, div = wcf_check(spec(cfg["spectrum_a"], "spectrum_a"),
                           spec(cfg["spectrum_b"], "spectrum_b"),
                           pairing, order)
    payload = {"equal": bool(equal)}
    if div is not None:
        h, k, e, ca, cb = div
        payload["divergence"] = {
            "height": h, "generator": k, "exponent": list(e),
            "coeff_a": str(ca), "coeff_b": str(cb)}
    return payload, None


_COMMANDS = {
    "lg-crit": _cmd_lg_crit,
    "lg-solitons": _cmd_lg_solitons,
    "lg-thimble": _cmd_lg_thimble,
    "periods-stokes": _cmd_periods_stokes,
    "fs-homs": _cmd_fs_homs,
    "fs-mutate": _cmd_fs_mutate,
    "sw-trace": _cmd_sw_trace,
    "sw-spectrum": _cmd_sw_spectrum,
    "dt-wcf": _cmd_dt_wcf,
}


def _emit_plots(plot_data, out_dir, command):
    from . import render
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if plot_data[0] == "polygons":
        _, values, polys, zeta = plot_data
        svg = render.render_polygon_diagram(values, polys, zeta)
        path = os.path.join(out_dir, f"{command}.svg")
        with open(path, "w") as f:
            f.write(svg)
        written.append(path)
    else:
        name, paths, markers = plot_data
        svg = render.render_paths(paths, markers)
        path = os.path.join(out_dir, f"{command}-{name}.svg")
        with open(path, "w") as f:
            f.write(svg)
        written.append(path)
    return written


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="zetaflow",
        description="Complex Morse theory, spectral networks and wall-crossing")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("config", help="TOML or JSON config document")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--plots", action="store_true")
    parser.add_argument("--out", default=".")
    args = parser.parse_args(argv)

    envelope = {
        "tool_version": __version__,
        "command": args.command,
        "warnings": [],
    }
    try:
        cfg = _load_config(args.config)
        if not isinstance(cfg, dict):
            raise ConfigError("config document must be a table/object")
        envelope["config"] = cfg
        envelope["seed"] = cfg.get("seed")
        result = _COMMANDS[args.command](cfg)
        payload, plot_data = result[0], result[1]
        if len(result) > 2:
            envelope["warnings"].extend(result[2])
        envelope["payload"] = payload
        if args.plots:
            if plot_data is None:
                raise EmptyGeometry(
                    f"command {args.command} emits no plottable geometry")
            envelope["plots"] = _emit_plots(plot_data, args.out, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (KeyError, TypeError, ValueError) as exc:
        print(f"config error: {exc!r}", file=sys.stderr)
        return 1
    except DomainError as exc:
        envelope["error"] = {"name": exc.name, "message": str(exc)}
        print(json.dumps(envelope, sort_keys=True, indent=2))
        return 2
    print(json.dumps(envelope, sort_keys=True, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
