"""Command-line entry point: ``kkcollapse <command> ...``.

Exit status: 0 success, 2 bad configuration or usage, 3 a numerical
validation failed, 4 a runtime fault.
"""
from __future__ import annotations

import csv
import io
import json
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np
import scipy

from . import __version__, bounds
from .ade import GroupSpec, build_group, presentation_defect, same_group
from .collapse import CollapseConfig, collapse_checks, prepare_geometry, run_collapse_experiment
from .exceptions import (
    ClosureError,
    ConvergenceError,
    DisconnectedGraphError,
    NotAMemberError,
    PresentationError,
)
from .gh import EXACT_MAX_SIZE, Correspondence, FiniteMetricSpace, distortion, gh_exact_small, gh_upper_bound
from .hyperbolic import diameter_estimate, regular_polygon, sample_domain, systole_search
from .surface_rep import build_ade_rep, holonomy_image

EXIT_CONFIG, EXIT_VALIDATION, EXIT_RUNTIME = 2, 3, 4
OUTPUT_ENV = "KKCOLLAPSE_OUTPUT_DIR"
CSV_HEADER = ("n", "dis", "bound", "slack", "nodes", "edges", "seconds")
QUICK_SLOPE_MAX = -0.25
SLOPE_MAX = -0.35


class ValidationFailed(Exception):
    """A computed quantity failed its acceptance check."""


@dataclass
class ExperimentConfig:
    """Top-level JSON config: a collapse record plus the global seed and output directory."""

    collapse: CollapseConfig = field(default_factory=CollapseConfig)
    seed: int = 0
    output_dir: str | None = None

    def to_json(self) -> str:
        d = {"collapse": self.collapse.to_dict(), "seed": self.seed, "output_dir": self.output_dir}
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        d = json.loads(text)
        if not isinstance(d, dict):
            raise ValueError("config must be a JSON object")
        # a bare CollapseConfig record is accepted too
        if "collapse" not in d:
            c = CollapseConfig.from_dict(d)
            return cls(c, c.seed, None)
        unknown = set(d) - {"collapse", "seed", "output_dir"}
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        c = CollapseConfig.from_dict(d["collapse"])
        seed = int(d.get("seed", c.seed))
        return cls(CollapseConfig.from_dict({**c.to_dict(), "seed": seed}), seed, d.get("output_dir"))


def _environment() -> dict:
    return {
        "python": platform.python_version(),
        "platform": platform.platform(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def _parse_group(text: str, n: int | None) -> GroupSpec:
    if n is not None:
        text = f"{text}{n}"
    try:
        return GroupSpec.parse(text)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--family/--group") from None


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, indent=2, sort_keys=True))


@click.group()
@click.version_option(__version__, prog_name="kkcollapse")
def main():
    """Finite subgroups of SU(2), flat bundles over hyperbolic surfaces, and collapse experiments."""


@main.command()
@click.option("--family", required=True, help="E6/E7/E8, 2T/2O/2I, C<n>, BD<n>, A<k> or D<k>; or C/BD with --n.")
@click.option("--n", "n", type=int, default=None, help="Order parameter appended to --family.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write the elements as w,x,y,z rows.")
def groups(family, n, csv_path):
    """Close the generators of a finite subgroup and check its presentation."""
    spec = _parse_group(family, n)
    group = build_group(spec)
    defect = presentation_defect(group)
    click.echo(f"group {spec.name} ({spec.ade_label}): order {group.order}, presentation defect {defect:.3g}")
    if csv_path:
        np.savetxt(csv_path, group.elements, delimiter=",", header="w,x,y,z", comments="", fmt="%.17g")


@main.command()
@click.option("--group", "family", required=True, help="Group name, as for 'groups --family'.")
@click.option("--genus", type=int, default=2, show_default=True)
def rep(family, genus):
    """Build the ADE representation and compare its image with the group."""
    spec = _parse_group(family, None)
    group = build_group(spec)
    if genus < 2:
        raise click.BadParameter("genus must be >= 2", param_hint="--genus")
    r = build_ade_rep(genus, group)
    image = holonomy_image(r, cap=max(1000, group.order))
    equal = same_group(image, group)
    _echo_json({
        "group": spec.name,
        "genus": genus,
        "images": {k: list(v.as_array()) for k, v in r.images.items()},
        "relator_defect": r.relator_defect(),
        "image_order": image.order,
        "image_equals_group": equal,
    })
    if not equal:
        raise ValidationFailed("holonomy image differs from the group")
    r.check()


@main.command()
@click.option("--genus", type=int, default=2, show_default=True)
@click.option("--max-word-len", type=int, default=4, show_default=True)
@click.option("--samples", type=int, default=0, help="Base samples for a graph diameter estimate (0 skips it).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Also write the JSON here.")
def surface(genus, max_word_len, samples, seed, out):
    """Regular 4g-gon geometry: area, angles, systole."""
    if genus < 2:
        raise click.BadParameter("genus must be >= 2", param_hint="--genus")
    poly = regular_polygon(genus)
    sys_len, word = systole_search(poly, max_word_len)
    report = {
        "genus": genus,
        "area": poly.area(),
        "area_expected": bounds.hyperbolic_area(genus),
        "interior_angle": float(poly.interior_angles()[0]),
        "inradius": poly.inradius,
        "circumradius": poly.circumradius,
        "relator_defect": poly.relator_defect(),
        "pairing_defect": poly.pairing_defect(),
        "systole": sys_len,
        "systole_word": str(word),
        "systole_upper": bounds.sys_upper(genus),
        "diameter_bound": bounds.diameter_bound(poly.area(), sys_len),
    }
    if samples:
        sample = sample_domain(poly, samples, seed=seed)
        report["covering_radius"] = sample.covering_radius
        report["diameter_estimate"] = diameter_estimate(poly, sample.points, 2.4 * sample.covering_radius)
    text = json.dumps(report, indent=2, sort_keys=True)
    click.echo(text)
    if out:
        Path(out).write_text(text + "\n")


def collapse_csv(rows, timings: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.n, repr(r.dis), repr(r.bound), repr(r.slack), r.nodes, r.edges,
                    repr(round(r.seconds, 3)) if timings else "0"])
    return buf.getvalue()


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON config with CollapseConfig fields.")
@click.option("--quick", is_flag=True, help="About 10x fewer nodes; the rate threshold widens.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), envvar=OUTPUT_ENV, default=None,
              help=f"Output directory (default ${OUTPUT_ENV} or the current directory).")
@click.option("--no-timings", is_flag=True, help="Write 0 in the seconds column so reruns are byte-identical.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
def collapse(config_path, quick, out_dir, no_timings, seed):
    """Measure distortion of the submersion correspondence as the base is scaled by n."""
    cfg = ExperimentConfig.from_json(Path(config_path).read_text()) if config_path else ExperimentConfig()
    c = cfg.collapse
    if seed is not None:
        c = CollapseConfig.from_dict({**c.to_dict(), "seed": seed})
    if quick:
        c = c.quick()
    out = Path(out_dir or cfg.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)

    geo = prepare_geometry(c)
    rows = run_collapse_experiment(c, geometry=geo)
    slope_max = QUICK_SLOPE_MAX if quick else SLOPE_MAX
    checks = collapse_checks(rows, slope_max)

    stem = f"collapse_{c.group_spec.name}_{c.genus}"
    (out / f"{stem}.csv").write_text(collapse_csv(rows, timings=not no_timings))
    resolved = {**c.to_dict(), "fiber_count": len(geo.fiber_net),
                "base_edge_radius": geo.base_edge_radius, "fiber_edge_radius": geo.fiber_edge_radius}
    summary = {
        "config": resolved,
        "seed": c.seed,
        "quick": quick,
        "version": __version__,
        "environment": _environment(),
        "checks": checks,
        "group_order": geo.group.order,
        "base_covering_radius": geo.base.covering_radius,
        "fiber_covering_radius": geo.fiber_net.covering_radius,
        "submersion_gap": [r.submersion_gap for r in rows],
    }
    (out / f"{stem}.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    for r in rows:
        click.echo(f"n={r.n:<6d} dis={r.dis:.4f}  bound+slack={r.bound + r.slack:.4f}  nodes={r.nodes} edges={r.edges}")
    click.echo(f"slope {checks['slope']:.3f} (<= {slope_max}); wrote {out / stem}.csv")
    failed = [k for k in ("bound", "monotone", "submersion", "rate") if not checks[k]]
    if failed:
        raise ValidationFailed(f"collapse checks failed: {', '.join(failed)}")


def _load_matrix(path) -> FiniteMetricSpace:
    d = np.loadtxt(path, delimiter=",", ndmin=2)
    return FiniteMetricSpace(d)


@main.command()
@click.argument("x_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("y_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--corr", "corr_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="CSV of index pairs i,j forming a correspondence.")
def gh(x_path, y_path, corr_path):
    """Gromov-Hausdorff estimates between two distance matrices (CSV)."""
    x, y = _load_matrix(x_path), _load_matrix(y_path)
    report = {"size_x": x.size, "size_y": y.size, "diam_x": x.diameter, "diam_y": y.diameter,
              "lower_bound": abs(x.diameter - y.diameter) / 2}
    if corr_path:
        pairs = np.loadtxt(corr_path, delimiter=",", dtype=int, ndmin=2)
        corr = Correspondence(tuple(map(tuple, pairs.tolist())))
        report["distortion"] = distortion(corr, x, y)
        report["gh_upper_bound"] = gh_upper_bound(corr, x, y)
    if max(x.size, y.size) <= EXACT_MAX_SIZE:
        report["gh_exact"] = gh_exact_small(x, y)
    _echo_json(report)


_BOUND_CHOICES = ("theorem", "distortion", "corollary-a", "corollary-b", "buser-sarnak", "sys-upper",
                  "riemann-hurwitz", "diameter", "area")


@main.command("bounds")
@click.argument("formula", type=click.Choice(_BOUND_CHOICES))
@click.option("--group", "family", default=None, help="Group name; sets the group order.")
@click.option("--order", type=int, default=None, help="Group order, if --group is not given.")
@click.option("--genus", type=float, default=2, show_default=True)
@click.option("--sys", "sys_len", type=float, default=None)
@click.option("--sys-max", type=float, default=None)
@click.option("--n", "n", type=int, default=1, show_default=True)
@click.option("--p", "p", type=int, default=None)
@click.option("--nu", type=int, default=None)
@click.option("--C", "C", type=float, default=None)
@click.option("--area", type=float, default=None)
@click.option("--sheets", type=int, default=1, show_default=True)
def bounds_cmd(formula, family, order, genus, sys_len, sys_max, n, p, nu, C, area, sheets):
    """Evaluate one closed-form bound and echo the formula used."""
    if family is not None:
        order = _parse_group(family, None).order
    order = order or 1
    g = int(genus) if float(genus).is_integer() else genus

    def need(name, value):
        if value is None:
            raise click.BadParameter(f"{formula} needs --{name}")
        return value

    if formula == "theorem":
        value = bounds.theorem_bound(order, g, need("sys", sys_len), n)
    elif formula == "distortion":
        value = bounds.distortion_bound(order, g, need("sys", sys_len), n)
    elif formula == "corollary-a":
        value = bounds.corollary_a(order, g, need("sys-max", sys_max))
    elif formula == "corollary-b":
        value = bounds.corollary_b(order, genus, need("C", C))
    elif formula == "buser-sarnak":
        gen, lower = bounds.buser_sarnak(need("p", p), need("nu", nu), need("C", C))
        value = {"genus": gen, "sys_lower": lower}
    elif formula == "sys-upper":
        value = bounds.sys_upper(g)
    elif formula == "riemann-hurwitz":
        chi, gen = bounds.riemann_hurwitz(n, g)
        value = {"euler_characteristic": chi, "genus": gen}
    elif formula == "diameter":
        value = bounds.diameter_bound(area if area is not None else bounds.hyperbolic_area(g),
                                      need("sys", sys_len), sheets)
    else:
        value = bounds.hyperbolic_area(g)
    key = "theorem" if formula == "distortion" else formula
    expr = bounds.FORMULAS[key] if formula != "distortion" else "2 * (" + bounds.FORMULAS["theorem"] + ")"
    inputs = {k: v for k, v in dict(group_order=order, genus=genus, sys=sys_len, sys_max=sys_max, n=n,
                                      p=p, nu=nu, C=C, area=area, sheets=sheets).items() if v is not None}
    _echo_json({"formula": formula, "expression": expr, "inputs": inputs, "value": value})


def run(argv=None) -> int:
    """Run the CLI and map failures onto exit statuses instead of raising."""
    try:
        main.main(args=list(argv) if argv is not None else None, prog_name="kkcollapse", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 1
    except click.ClickException as exc:
        exc.show()
        return EXIT_CONFIG
    except (PresentationError, ClosureError, NotAMemberError, ValidationFailed) as exc:
        click.echo(f"validation failed: {exc}", err=True)
        return EXIT_VALIDATION
    except (json.JSONDecodeError, ValueError, KeyError, TypeError, OSError) as exc:
        click.echo(f"config error: {exc}", err=True)
        return EXIT_CONFIG
    except (DisconnectedGraphError, ConvergenceError, Exception) as exc:  # noqa: BLE001
        click.echo(f"runtime error: {type(exc).__name__}: {exc}", err=True)
        return EXIT_RUNTIME
    return 0


def entry() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entry()
