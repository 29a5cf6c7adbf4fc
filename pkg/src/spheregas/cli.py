"""Command-line front end: droplet boundaries, energy curves, JUE densities,
rate curves, the 2D<->1D identity table, desk-scale duality checks, Monte
Carlo sampling and soft-edge data, written as CSV/JSON (SVG on request).

Exit codes: 0 success, 2 parameter error, 3 numerical failure.
"""

from __future__ import annotations

import os
import sys

import click
import numpy as np

from . import __version__
from .conformal import DegenerateMapError, build_map, droplet_boundary, ellipse_build
from .duality import Method, duality_check_smallN, gap_rewrite_check
from .energy import energy_constant, k_post, k_pre
from .geometry import ChargeConfig, PhaseTag, classify_phase, critical_w, w_to_ws
from .jue import (
    charges_to_jacobi,
    constrained_density,
    energy_identity_check,
    s_difference,
    soft_edge_scale,
    wachter,
)
from .output import write_csv, write_json, write_svg_polyline
from .painleve import hastings_mcleod, painleve_gap
from .sampler import BACKEND, metropolis_sample

PARAM_ERROR = 2
NUMERICAL_ERROR = 3


def _out(path: str | None, default: str) -> str:
    if path:
        return path
    base = os.environ.get("SPHEREGAS_OUTDIR", ".")
    return os.path.join(base, default)


def _fail(msg: str, code: int):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _parse_range(spec: str, log: bool) -> np.ndarray:
    try:
        parts = spec.split(":")
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2]) if len(parts) > 2 else 50
    except (ValueError, IndexError):
        _fail(f"bad range '{spec}', expected start:stop[:count]", PARAM_ERROR)
    if log:
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


@click.group()
@click.version_option(__version__)
def main():
    """Coulomb gas on a sphere with two macroscopic external charges."""


@main.command()
@click.option("--Q0", "q0", type=float, required=True)
@click.option("--Q1", "q1", type=float, required=True)
@click.option("--w", type=float, required=True)
@click.option("--n", type=int, default=512, show_default=True)
@click.option("--output", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "svg"]), default="csv")
def droplet(q0, q1, w, n, output, fmt):
    """Pre-critical droplet boundary as (re, im) samples."""
    try:
        cfg = ChargeConfig(Q0=q0, Q1=q1, w=w)
    except ValueError as e:
        _fail(str(e), PARAM_ERROR)
    try:
        m = build_map(cfg)
    except DegenerateMapError:
        _fail(
            f"droplet boundary needs a pre-critical configuration: "
            f"w = {w} vs w_cri = {critical_w(q0, q1):.6g}",
            PARAM_ERROR,
        )
    curve = droplet_boundary(m, n)
    params = {"Q0": q0, "Q1": q1, "w": w, "n": n}
    path = _out(output, f"droplet_Q0{q0}_Q1{q1}_w{w}.{fmt}")
    if fmt == "svg":
        write_svg_polyline(path, [np.append(curve.points, curve.points[0])], params)
    else:
        write_csv(path, ["re", "im"], curve.to_rows(), params)
    click.echo(path)


@main.command("energy-curve")
@click.option("--Q0", "q0", type=float, required=True)
@click.option("--Q1", "q1", type=float, required=True)
@click.option("--w-range", "w_range", type=str, required=True,
              help="start:stop[:count]")
@click.option("--log-spaced", is_flag=True, help="log-spaced w grid")
@click.option("--output", type=click.Path(), default=None)
def energy_curve(q0, q1, w_range, log_spaced, output):
    """Piecewise K_post/K_pre energy table over a w grid, w_cri marked."""
    try:
        ws = _parse_range(w_range, log_spaced)
        cfg0 = ChargeConfig(Q0=q0, Q1=q1, w=1.0)
    except ValueError as e:
        _fail(str(e), PARAM_ERROR)
    wc = critical_w(q0, q1)
    rows = []
    for w in ws:
        cfg = ChargeConfig(Q0=q0, Q1=q1, w=float(w))
        phase = classify_phase(cfg)
        if phase.tag is PhaseTag.PRE_CRITICAL:
            try:
                log_k = k_pre(cfg).K_pre
            except (DegenerateMapError, ArithmeticError) as e:
                _fail(f"energy evaluation failed at w={w}: {e}", NUMERICAL_ERROR)
        else:
            log_k = k_post(cfg.Q0, cfg.Q1)
        rows.append((w, phase.tag.value, log_k, energy_constant(log_k)))
    path = _out(output, f"energy_Q0{q0}_Q1{q1}.csv")
    write_csv(path, ["w", "phase", "log_k", "energy"], rows,
              {"Q0": q0, "Q1": q1, "w_range": w_range, "w_cri": wc})
    click.echo(path)


@main.command("jue-density")
@click.option("--gamma1", type=float, required=True)
@click.option("--gamma2", type=float, required=True)
@click.option("--wall", type=float, default=None,
              help="hard-wall position; omit for the unconstrained density")
@click.option("--n", type=int, default=400, show_default=True)
@click.option("--output", type=click.Path(), default=None)
def jue_density(gamma1, gamma2, wall, n, output):
    """Wachter or hard-wall-constrained JUE density table."""
    try:
        spec = wachter(gamma1, gamma2)
    except ValueError as e:
        _fail(str(e), PARAM_ERROR)
    params = {"gamma1": gamma1, "gamma2": gamma2, "wall": wall}
    if wall is None:
        xs = np.linspace(spec.cJ, spec.dJ, n + 2)[1:-1]
        rows = np.column_stack([xs, spec.density(xs)])
    else:
        if wall <= 0:
            _fail("wall must be positive", PARAM_ERROR)
        cj = constrained_density(spec, wall)
        xs = np.linspace(cj.L, cj.zeta, n + 2)[1:-1]
        rows = np.column_stack([xs, cj.density(xs)])
    path = _out(output, f"jue_density_g1{gamma1}_g2{gamma2}.csv")
    write_csv(path, ["x", "rho"], rows, params)
    click.echo(path)


@main.command("rate-curve")
@click.option("--gamma1", type=float, required=True)
@click.option("--gamma2", type=float, required=True)
@click.option("--zeta-range", "zeta_range", type=str, default=None,
              help="start:stop[:count], defaults to (0.2 dJ):(1.1 dJ):200")
@click.option("--output", type=click.Path(), default=None)
def rate_curve(gamma1, gamma2, zeta_range, output):
    """Large-deviation cost of the hard wall: (zeta, S(L,zeta)-S(cJ,dJ))."""
    try:
        spec = wachter(gamma1, gamma2)
    except ValueError as e:
        _fail(str(e), PARAM_ERROR)
    if zeta_range is None:
        zs = np.linspace(0.2 * spec.dJ, min(1.1 * spec.dJ, 0.999), 200)
    else:
        zs = _parse_range(zeta_range, log=False)
    rows = [(z, s_difference(spec, float(z))) for z in zs]
    path = _out(output, f"rate_g1{gamma1}_g2{gamma2}.csv")
    write_csv(path, ["zeta", "s_difference"], rows,
              {"gamma1": gamma1, "gamma2": gamma2, "dJ": spec.dJ})
    click.echo(path)


@main.command()
@click.option("--Q0", "q0", type=float, required=True)
@click.option("--Q1", "q1", type=float, required=True)
@click.option("--w-range", "w_range", type=str, default=None,
              help="start:stop[:count] inside the pre-critical phase")
@click.option("--count", type=int, default=50, show_default=True)
@click.option("--output", type=click.Path(), default=None)
def identity(q0, q1, w_range, count, output):
    """Residual table of the 2D<->1D electrostatic energy identity."""
    try:
        ChargeConfig(Q0=q0, Q1=q1, w=1.0)
    except ValueError as e:
        _fail(str(e), PARAM_ERROR)
    wc = critical_w(q0, q1)
    if w_range is None:
        # keep a small offset from w_cri: both sides vanish cubically there
        # and the relative residual would be dominated by float cancellation
        ws = np.geomspace(wc * 1.05, 10.0, count)
    else:
        ws = _parse_range(w_range, log=True)
        if np.any(ws <= wc):
            _fail(f"identity holds pre-critically only; keep w > w_cri = {wc:.6g}",
                  PARAM_ERROR)
    rows = []
    for w in ws:
        rep = energy_identity_check(ChargeConfig(Q0=q0, Q1=q1, w=float(w)))
        rows.append((rep.w, rep.lhs, rep.rhs, rep.rel_residual))
    path = _out(output, f"identity_Q0{q0}_Q1{q1}.csv")
    write_csv(path, ["w", "lhs", "rhs", "rel_residual"], rows,
              {"Q0": q0, "Q1": q1, "w_cri": wc})
    click.echo(path)


@main.command()
@click.option("--N", "n_big", type=int, required=True)
@click.option("--r", type=int, required=True)
@click.option("--K", "k_exp", type=int, required=True)
@click.option("--w", type=float, required=True)
@click.option("--method", type=click.Choice(["quadrature", "monte-carlo"]),
              default="quadrature", show_default=True)
@click.option("--output", type=click.Path(), default=None)
def duality(n_big, r, k_exp, w, method, output):
    """Desk-scale duality check plus the gap-probability rewrite chain."""
    try:
        rep = duality_check_smallN(n_big, r, k_exp, w, method=Method(method))
        chain = gap_rewrite_check(n_big, r, k_exp, w) if r <= 3 else None
    except ValueError as e:
        _fail(str(e), PARAM_ERROR)
    payload = {"duality": rep.to_dict()}
    if chain is not None:
        payload["gap_rewrite"] = chain.to_dict()
    path = _out(output, f"duality_N{n_big}_r{r}_K{k_exp}_w{w}.json")
    write_json(path, payload, {"N": n_big, "r": r, "K": k_exp, "w": w, "method": method})
    click.echo(path)


@main.command()
@click.option("--Q0", "q0", type=float, required=True)
@click.option("--Q1", "q1", type=float, required=True)
@click.option("--w", type=float, required=True)
@click.option("--N", "n_part", type=int, default=100, show_default=True)
@click.option("--sweeps", type=int, default=20000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", type=click.Path(), default=None)
def sample(q0, q1, w, n_part, sweeps, seed, output):
    """Metropolis snapshots of the gas; CSV particle dump with header."""
    try:
        cfg = ChargeConfig(Q0=q0, Q1=q1, w=w)
    except ValueError as e:
        _fail(str(e), PARAM_ERROR)
    snaps, sampler = metropolis_sample(cfg, n_part, sweeps, seed=seed)
    rows = []
    for s in snaps:
        rows.extend((s.sweep, p.real, p.imag) for p in s.particles)
    path = _out(output, f"sample_Q0{q0}_Q1{q1}_w{w}_N{n_part}.csv")
    write_csv(path, ["sweep", "re", "im"], rows,
              {"N": n_part, "Q0": q0, "Q1": q1, "w": w, "seed": seed,
               "sweeps": sweeps, "backend": BACKEND,
               "acceptance": sampler.accepted / max(1, sampler.attempted)})
    click.echo(path)


@main.command("soft-edge")
@click.option("--Q0", "q0", type=float, required=True)
@click.option("--Q1", "q1", type=float, required=True)
@click.option("--painleve-table", is_flag=True,
              help="include the Hastings-McLeod table (x, q, int q^2)")
@click.option("--t-range", "t_range", type=str, default="-4:4:17")
@click.option("--output", type=click.Path(), default=None)
def soft_edge(q0, q1, painleve_table, t_range, output):
    """Soft-edge scaling constants and the Painleve gap probability."""
    try:
        scale = soft_edge_scale(q0, q1)
        g1, g2 = charges_to_jacobi(q0, q1)
        spec = wachter(g1, g2)
    except ValueError as e:
        _fail(str(e), PARAM_ERROR)
    ts = _parse_range(t_range, log=False)
    try:
        gaps = [(t, painleve_gap(float(t))) for t in ts]
    except (ValueError, RuntimeError) as e:
        _fail(f"Painleve solver: {e}", NUMERICAL_ERROR)
    payload = {
        "scale": scale.to_dict(),
        "wachter": spec.to_dict(),
        "gap": [{"t": t, "E2_soft": v} for t, v in gaps],
    }
    if painleve_table:
        payload["hastings_mcleod"] = hastings_mcleod().table().tolist()
    path = _out(output, f"soft_edge_Q0{q0}_Q1{q1}.json")
    write_json(path, payload, {"Q0": q0, "Q1": q1, "t_range": t_range})
    click.echo(path)


if __name__ == "__main__":
    main()
