"""File formats, reports and the ``latrigid`` command line."""

from __future__ import annotations

import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np

from .bond_graph import faces, is_connected
from .errors import DuplicatePoint, LatRigidError, NoDeformationAvailable, ParseError
from .lattice_core import DEFAULT_TOL, Configuration, is_angle_preserving, is_congruent

EXIT_INPUT = 3
EXIT_NO_DEFORMATION = 4


# ------------------------------------------------------------ config files


def parse_config(text: str) -> Configuration:
    """Parse "i j" lines; '#' starts a comment, blank lines are skipped."""
    pts, where = [], {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected two integers, got {raw.strip()!r}", ln)
        try:
            p = (int(parts[0]), int(parts[1]))
        except ValueError:
            raise ParseError(f"not an integer pair: {raw.strip()!r}", ln) from None
        if p in where:
            raise ParseError(f"point {p} already given on line {where[p]}", ln)
        where[p] = ln
        pts.append(p)
    return Configuration(tuple(pts))


def read_config(path) -> Configuration:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None
    return parse_config(text)


def format_config(config: Configuration) -> str:
    return "".join(f"{p[0]} {p[1]}\n" for p in config.points)


# ------------------------------------------------------------ JSON


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    buf = io.StringIO()
    _dump(obj, buf)
    return buf.getvalue()


def _dump(o, out):
    if o is None or isinstance(o, (bool, np.bool_)):
        out.write("null" if o is None else ("true" if o else "false"))
    elif isinstance(o, (int, np.integer)):
        out.write(str(int(o)))
    elif isinstance(o, (float, np.floating)):
        out.write(_fmt_float(float(o)))
    elif isinstance(o, str):
        out.write(json.dumps(o))
    elif isinstance(o, dict):
        out.write("{")
        for i, k in enumerate(sorted(o, key=str)):
            if i:
                out.write(",")
            out.write(json.dumps(str(k)))
            out.write(":")
            _dump(o[k], out)
        out.write("}")
    elif isinstance(o, (list, tuple, np.ndarray)):
        out.write("[")
        for i, v in enumerate(list(o)):
            if i:
                out.write(",")
            _dump(v, out)
        out.write("]")
    else:
        out.write(json.dumps(str(o)))


# ------------------------------------------------------------ reports


def verdict_report(config: Configuration, v, *, timing: bool = False) -> dict:
    from .folding import SuffWitness

    fam = v.family
    rep = {
        "digest": config.digest(),
        "n": config.n,
        "status": v.status.value,
        "route": v.route.value,
        "exit_code": v.exit_code,
        "k_used": v.k_used,
        "witness_axis": str(v.witness.axis) if isinstance(v.witness, SuffWitness) else None,
        "witness": v.witness.to_dict() if isinstance(v.witness, SuffWitness) else None,
        "family": fam.summary() if fam is not None else None,
        "cells": v.cells,
        "oracle": v.oracle,
        "notes": v.notes,
    }
    if timing:
        rep["timing"] = v.timing
    return rep


def _r(x) -> str:
    # shortest text that reads back to the same double
    return repr(float(x))


def write_csv(fam, out, grid=None) -> None:
    grid = fam.parameter_grid if grid is None else grid
    out.write("index,x,y,z\n")
    for t in grid:
        x = fam.at(t)
        out.write(f"# t={_r(t)}\n")
        for i, row in enumerate(np.asarray(x)):
            out.write(f"{i},{_r(row[0])},{_r(row[1])},{_r(row[2])}\n")


def read_csv(text: str) -> list:
    """Blocks of (t or None, (n, 3) array) from a placement CSV."""
    blocks, cur, t = [], None, None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("t="):
                if cur is not None:
                    blocks.append((t, cur))
                t, cur = float(body[2:]), []
            continue
        if line.replace(" ", "") == "index,x,y,z":
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ParseError(f"expected index,x,y,z, got {line!r}", ln)
        try:
            i = int(parts[0])
            row = [float(v) for v in parts[1:]]
        except ValueError:
            raise ParseError(f"bad number in {line!r}", ln) from None
        if cur is None:
            cur = []
        if i != len(cur):
            raise ParseError(f"row index {i} out of order", ln)
        cur.append(row)
    if cur is not None:
        blocks.append((t, cur))
    return [(t, np.array(rows, dtype=float).reshape(-1, 3)) for t, rows in blocks]


def write_obj(config: Configuration, x, out) -> None:
    """Vertices plus one line element per bond; no faces."""
    out.write(f"# latrigid placement, {config.n} points\n")
    for row in np.asarray(x):
        out.write(f"v {_r(row[0])} {_r(row[1])} {_r(row[2])}\n")
    for i, j in config.bond_array.tolist():
        out.write(f"l {i + 1} {j + 1}\n")


# ------------------------------------------------------------ CLI


def _load(path) -> Configuration:
    try:
        return read_config(path)
    except ParseError as e:
        click.echo(f"error: {path}: {e}", err=True)
        sys.exit(EXIT_INPUT)
    except DuplicatePoint as e:
        click.echo(f"error: {path}: {e}", err=True)
        sys.exit(EXIT_INPUT)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Angle-rigidity of finite Z^2 configurations in 3-space."""


@main.command("analyze")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--k-cap", default=3, show_default=True, help="largest k for the numerical S_k test")
@click.option("--tol", default=DEFAULT_TOL, show_default=True, help="deformation residual tolerance")
@click.option("--seed", default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="print the full JSON report")
@click.option("--timing", is_flag=True, help="include wall time (breaks byte-identical output)")
def cmd_analyze(path, k_cap, tol, seed, as_json, timing):
    """Decide angle-rigidity; exit 0 rigid, 1 not rigid, 2 undecided, 3 input error."""
    from .shear import verdict

    config = _load(path)
    v = verdict(config, k_cap=k_cap, tol=tol, seed=seed)
    rep = verdict_report(config, v, timing=timing)
    if as_json:
        click.echo(dumps(rep))
    else:
        line = f"{v.status.value} via {v.route.value}"
        if rep["witness_axis"]:
            line += f" (axis {rep['witness_axis']})"
        click.echo(line)
    sys.exit(v.exit_code)


def _family_for(config: Configuration, mode: str, grid, tol):
    from . import deform
    from .bond_graph import acyclic_reduction
    from .folding import build_folding, check_suff
    from .shear import is_0_shear_resistant

    if not is_connected(config):
        raise NoDeformationAvailable("configuration is disconnected; use analyze")
    if mode == "fold":
        w = check_suff(config)
        if w is None:
            raise NoDeformationAvailable("no axis satisfies (suff); nothing to fold")
        return build_folding(config, w, grid=grid, tol=tol)
    if mode == "translate":
        fam = deform.find_translation_shear(config, grid=grid, tol=tol)
        if fam is None:
            raise NoDeformationAvailable("no translation shear validates on this configuration")
        return fam
    core = acyclic_reduction(config).core
    for c in faces(core):
        if not is_0_shear_resistant(core, c):
            fam = deform.find_shear(core, c, grid=grid, tol=tol)
            if fam is not None:
                if core.n != config.n:
                    raise NoDeformationAvailable("shear found on the reduced core only")
                return fam
    raise NoDeformationAvailable("no cell shear validates on this configuration")


@main.command("deform")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--mode", type=click.Choice(["fold", "shear", "translate"]), default="fold", show_default=True)
@click.option("--t", "ts", multiple=True, type=float, help="parameter values (repeatable); default grid otherwise")
@click.option("--out", type=click.Path(dir_okay=False), help="CSV output (stdout when omitted)")
@click.option("--obj", type=click.Path(dir_okay=False), help="also write an OBJ of the last parameter value")
@click.option("--tol", default=1e-10, show_default=True)
def cmd_deform(path, mode, ts, out, obj, tol):
    """Export a constructed deformation family as CSV (and OBJ)."""
    from .family import DEFAULT_GRID

    config = _load(path)
    grid = tuple(ts) if ts else DEFAULT_GRID
    try:
        fam = _family_for(config, mode, grid, tol)
    except NoDeformationAvailable as e:
        click.echo(f"NoDeformationAvailable: {e}", err=True)
        sys.exit(EXIT_NO_DEFORMATION)
    except (LatRigidError, ValueError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_INPUT)
    buf = io.StringIO()
    write_csv(fam, buf, grid)
    if out:
        Path(out).write_text(buf.getvalue())
    else:
        click.echo(buf.getvalue(), nl=False)
    if obj:
        with open(obj, "w") as fh:
            write_obj(config, fam.at(grid[-1]), fh)
    status = "validated" if fam.validated and fam.nontrivial else "NOT validated"
    click.echo(f"{fam.kind} family, {len(grid)} values, {status}, max residual {fam.max_residual:.3g}", err=True)


def _label(pts):
    from .shear import verdict

    c = Configuration(pts)
    v = verdict(c)
    return {"n": c.n, "points": [list(p) for p in pts], "status": v.status.value, "route": v.route.value}


@main.command("corpus")
@click.option("--max-n", default=6, show_default=True)
@click.option("--exhaustive", is_flag=True, default=True, help="enumerate all shapes mod symmetry (default)")
@click.option("--random", "random_n", type=int, help="number of random clusters instead of enumeration")
@click.option("--seed", default=0, show_default=True)
@click.option("--label/--no-label", default=True, show_default=True, help="attach verdicts")
@click.option("--jobs", default=1, show_default=True, help="worker processes for labelling")
def cmd_corpus(max_n, exhaustive, random_n, seed, label, jobs):
    """Stream configurations as JSON lines."""
    from . import corpus

    if random_n is not None:
        shapes = list(corpus.random_clusters(random_n, max_n, seed))
    else:
        shapes = list(corpus.exhaustive(max_n))
    if not label:
        for s in shapes:
            click.echo(dumps({"n": len(s), "points": [list(p) for p in s]}))
        return
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            rows = ex.map(_label, shapes, chunksize=64)
            for r in rows:
                click.echo(dumps(r))
    else:
        for s in shapes:
            click.echo(dumps(_label(s)))


@main.command("check")
@click.argument("path_config", type=click.Path(dir_okay=False))
@click.argument("path_placement", type=click.Path(dir_okay=False))
@click.option("--tol", default=DEFAULT_TOL, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def cmd_check(path_config, path_placement, tol, as_json):
    """Residuals, congruence and energy of placements; exit 0 if all preserving."""
    from .energy import energy

    config = _load(path_config)
    try:
        blocks = read_csv(Path(path_placement).read_text())
    except ParseError as e:
        click.echo(f"error: {path_placement}: {e}", err=True)
        sys.exit(EXIT_INPUT)
    except OSError as e:
        click.echo(f"error: {path_placement}: {e.strerror}", err=True)
        sys.exit(EXIT_INPUT)
    rows = []
    for t, x in blocks:
        if x.shape != (config.n, 3):
            click.echo(f"error: block t={t} has {x.shape[0]} rows, expected {config.n}", err=True)
            sys.exit(EXIT_INPUT)
        r = is_angle_preserving(config, x, tol, require_ball=False)
        d = r.to_dict()
        d.update(t=t, congruent=is_congruent(config, x, tol), energy=energy(config, x).total,
                 inside_ball=r.max_displacement < config.epsilon)
        rows.append(d)
    if as_json:
        click.echo(dumps({"digest": config.digest(), "tol": tol, "blocks": rows}))
    else:
        for d in rows:
            tag = "" if d["t"] is None else f"t={d['t']:g} "
            click.echo(f"{tag}bond {d['bond_residual']:.3e} angle {d['angle_residual']:.3e} "
                       f"energy {d['energy']:.3e} {'preserving' if d['preserving'] else 'NOT preserving'} "
                       f"{'congruent' if d['congruent'] else 'non-congruent'}")
    sys.exit(0 if all(d["preserving"] for d in rows) else 1)


@main.command("fixtures")
def cmd_fixtures():
    """List the shipped fixture files."""
    from . import fixtures

    for name in fixtures.names():
        click.echo(f"{name:16s} {fixtures.path(name)}")


if __name__ == "__main__":
    main()
