"""deformctl: batch verification runner and per-module passthrough commands.

Exit codes: 0 all checks passed, 1 a check failed, 2 invalid config or input.
"""

from __future__ import annotations

import sys

import click
import numpy as np

from . import fileio
from .cocycles import (
    exp_cocycle,
    opposite_cocycle,
    validate_cocycle,
)
from .errors import DeformlabError, ConfigInvalid, GapClosed, InputInvalid
from .scenarios import Scenario, builtin_scenario, list_builtins, run_scenario

PASS = "pass"
FAIL = "FAIL"


def _finish(report, report_path) -> None:
    for record in report.checks:
        status = PASS if record.passed else FAIL
        if record.kind == "residual":
            click.echo(f"  [{status}] {record.name} ({record.anchor}): "
                       f"{record.value:.3e} <= {record.tolerance:.1e}")
        else:
            click.echo(f"  [{status}] {record.name} ({record.anchor}): {record.value}")
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
        click.echo(f"report written to {report_path}")
    click.echo("PASS" if report.passed else "FAIL")
    sys.exit(0 if report.passed else 1)


def _handle_errors(fn):
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConfigInvalid, InputInvalid) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except DeformlabError as exc:
            click.echo(f"check failed: {exc}", err=True)
            sys.exit(1)
    return wrapper


@click.group()
def main() -> None:
    """Numerical checks for cocycle deformations of graded matrix algebras."""


@main.command("list")
def list_command() -> None:
    """List builtin scenarios."""
    for name, description in list_builtins():
        click.echo(f"{name:24s} {description}")


@main.command("builtin")
@click.argument("name")
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.option("--theta-grid", default=None, help="a:b:n")
@click.option("--seed", default=0, type=int)
@_handle_errors
def builtin_command(name, report_path, theta_grid, seed) -> None:
    """Run a builtin scenario."""
    grid = fileio.parse_theta_grid(theta_grid) if theta_grid else None
    scenario = builtin_scenario(name, theta_grid=grid, seed=seed)
    report = run_scenario(scenario, echo=click.echo)
    _finish(report, report_path)


@main.command("run")
@click.argument("config", type=click.Path())
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.option("--theta-grid", default=None, help="a:b:n")
@click.option("--seed", default=None, type=int)
@_handle_errors
def run_command(config, report_path, theta_grid, seed) -> None:
    """Run a scenario config file."""
    scenario = fileio.load_scenario(config)
    if theta_grid:
        scenario.theta_grid = fileio.parse_theta_grid(theta_grid)
    if seed is not None:
        scenario.seed = seed
    report = run_scenario(scenario, echo=click.echo)
    _finish(report, report_path)


@main.group()
def group() -> None:
    """Group utilities."""


@group.command("validate")
@click.argument("file", type=click.Path())
@_handle_errors
def group_validate(file) -> None:
    g = fileio.load_group(file)
    click.echo(f"group of order {g.order}: associativity, identity, inverses ok")
    click.echo("PASS")


@main.group()
def cocycle() -> None:
    """Cocycle utilities."""


@cocycle.command("validate")
@click.argument("file", type=click.Path())
@_handle_errors
def cocycle_validate(file) -> None:
    c = fileio.load_cocycle(file)
    v = validate_cocycle(c)
    click.echo(f"identity residual      {v.max_identity_residual:.3e}")
    click.echo(f"normalization residual {v.max_normalization_residual:.3e}")
    click.echo(f"modulus deviation      {v.max_modulus_deviation:.3e}")
    click.echo("PASS" if v.passed else "FAIL")
    sys.exit(0 if v.passed else 1)


@cocycle.command("exp")
@click.argument("file", type=click.Path())
@click.option("--theta", default=1.0, type=float)
@click.option("--out", type=click.Path(), default=None)
@_handle_errors
def cocycle_exp(file, theta, out) -> None:
    c = fileio.load_cocycle(file)
    result = exp_cocycle(c, theta)
    v = validate_cocycle(result)
    click.echo(f"exp(i*{theta}*w0) identity residual {v.max_identity_residual:.3e}")
    if out:
        fileio.save_cocycle(result, out)
        click.echo(f"written to {out}")
    sys.exit(0 if v.passed else 1)


@cocycle.command("opposite")
@click.argument("file", type=click.Path())
@click.option("--out", type=click.Path(), default=None)
@_handle_errors
def cocycle_opposite(file, out) -> None:
    c = fileio.load_cocycle(file)
    result = opposite_cocycle(c)
    v = validate_cocycle(result)
    click.echo(f"opposite cocycle identity residual {v.max_identity_residual:.3e}")
    if out:
        fileio.save_cocycle(result, out)
        click.echo(f"written to {out}")
    sys.exit(0 if v.passed else 1)


@main.group()
def tga() -> None:
    """Twisted group algebra checks."""


@tga.command("relations")
@click.argument("group_file", type=click.Path())
@click.argument("cocycle_file", type=click.Path())
@_handle_errors
def tga_relations(group_file, cocycle_file) -> None:
    from .twisted import relations_check

    g = fileio.load_group(group_file)
    c = fileio.load_cocycle(cocycle_file, group=g)
    report = relations_check(c)
    click.echo(f"product residual   {report.max_product_residual:.3e}")
    click.echo(f"adjoint residual   {report.max_adjoint_residual:.3e}")
    click.echo(f"unitarity defect   {report.max_unitarity_defect:.3e}")
    ok = report.passed()
    click.echo("PASS" if ok else "FAIL")
    sys.exit(0 if ok else 1)


@main.group()
def bundle() -> None:
    """Graded-algebra utilities."""


@bundle.command("validate")
@click.argument("file", type=click.Path())
@_handle_errors
def bundle_validate(file) -> None:
    b = fileio.load_bundle(file)
    click.echo(f"bundle on {b.group.name}, ambient dimension {b.ambient_dim}, "
               f"basis size {b.size}: graded, *-closed, unital")
    click.echo("PASS")


@main.group("deform")
def deform_group() -> None:
    """Deformation checks."""


@deform_group.command("run")
@click.argument("bundle_file", type=click.Path())
@click.argument("cocycle_file", type=click.Path())
@click.option("--theta-grid", default=None, help="a:b:n (real cocycle input)")
@click.option("--report", "report_path", type=click.Path(), default=None)
@_handle_errors
def deform_run(bundle_file, cocycle_file, theta_grid, report_path) -> None:
    from .catalog import ScenarioInputs

    b = fileio.load_bundle(bundle_file)
    c = fileio.load_cocycle(cocycle_file, group=b.group)
    inputs = ScenarioInputs(group=b.group, bundles=[("bundle", b)])
    from .cocycles import TwoCocycleReal

    if isinstance(c, TwoCocycleReal):
        inputs.real_cocycles.append(("cocycle", c))
        inputs.u1_cocycles.append(("exp-cocycle", exp_cocycle(c, 1.0)))
    else:
        inputs.u1_cocycles.append(("cocycle", c))
    scenario = Scenario("deform-run", inputs, ("deform",))
    if theta_grid:
        scenario.theta_grid = fileio.parse_theta_grid(theta_grid)
    report = run_scenario(scenario, echo=click.echo)
    _finish(report, report_path)


@main.group()
def crossed() -> None:
    """Crossed-product checks."""


def _crossed_scenario(bundle_file, cocycle_file, theta_grid):
    from .catalog import ScenarioInputs
    from .cocycles import TwoCocycleReal

    b = fileio.load_bundle(bundle_file)
    c = fileio.load_cocycle(cocycle_file, group=b.group)
    inputs = ScenarioInputs(group=b.group, bundles=[("bundle", b)])
    if isinstance(c, TwoCocycleReal):
        inputs.real_cocycles.append(("cocycle", c))
        inputs.u1_cocycles.append(("exp-cocycle", exp_cocycle(c, 1.0)))
    else:
        inputs.u1_cocycles.append(("cocycle", c))
    scenario = Scenario("crossed-run", inputs, ("crossed",))
    if theta_grid:
        scenario.theta_grid = fileio.parse_theta_grid(theta_grid)
    return scenario, b, c


@crossed.command("untwist")
@click.argument("bundle_file", type=click.Path())
@click.argument("cocycle_file", type=click.Path())
@_handle_errors
def crossed_untwist(bundle_file, cocycle_file) -> None:
    from .crossed import untwist_isomorphism
    from .cocycles import TwoCocycleReal

    b = fileio.load_bundle(bundle_file)
    c = fileio.load_cocycle(cocycle_file, group=b.group)
    if isinstance(c, TwoCocycleReal):
        c = exp_cocycle(c, 1.0)
    rep = untwist_isomorphism(b, c)
    click.echo(f"image residual            {rep.max_image_residual:.3e}")
    click.echo(f"product coefficient       {rep.max_product_coeff_residual:.3e}")
    click.echo(f"adjoint coefficient       {rep.max_adjoint_coeff_residual:.3e}")
    ok = rep.passed()
    click.echo("PASS" if ok else "FAIL")
    sys.exit(0 if ok else 1)


@crossed.command("dual")
@click.argument("bundle_file", type=click.Path())
@click.argument("cocycle_file", type=click.Path())
@_handle_errors
def crossed_dual(bundle_file, cocycle_file) -> None:
    from .crossed import dual_action_check
    from .cocycles import TwoCocycleReal

    b = fileio.load_bundle(bundle_file)
    c = fileio.load_cocycle(cocycle_file, group=b.group)
    if isinstance(c, TwoCocycleReal):
        c = exp_cocycle(c, 1.0)
    rep = dual_action_check(b, c)
    click.echo(f"automorphism residual  {rep.max_automorphism_residual:.3e}")
    click.echo(f"involution residual    {rep.max_involution_residual:.3e}")
    click.echo(f"composition residual   {rep.max_composition_residual:.3e}")
    ok = rep.passed()
    click.echo("PASS" if ok else "FAIL")
    sys.exit(0 if ok else 1)


@crossed.command("vk")
@click.argument("bundle_file", type=click.Path())
@click.argument("cocycle_file", type=click.Path())
@_handle_errors
def crossed_vk(bundle_file, cocycle_file) -> None:
    from .crossed import v_multiplicativity_check
    from .cocycles import TwoCocycleReal

    b = fileio.load_bundle(bundle_file)
    c = fileio.load_cocycle(cocycle_file, group=b.group)
    if isinstance(c, TwoCocycleReal):
        c = exp_cocycle(c, 1.0)
    rep = v_multiplicativity_check(c)
    click.echo(f"conjugation residual       {rep.max_conjugation_residual:.3e}")
    click.echo(f"multiplicativity residual  {rep.max_multiplicativity_residual:.3e}")
    click.echo(f"dual formula residual      {rep.max_dual_formula_residual:.3e}")
    ok = rep.passed()
    click.echo("PASS" if ok else "FAIL")
    sys.exit(0 if ok else 1)


@crossed.command("wk")
@click.argument("bundle_file", type=click.Path())
@click.argument("cocycle_file", type=click.Path())
@click.option("--subgroup", "subgroup_spec", default=None,
              help="comma-separated generator indices; default full group")
@click.option("--theta-grid", default="0:1:11", help="a:b:n")
@_handle_errors
def crossed_wk(bundle_file, cocycle_file, subgroup_spec, theta_grid) -> None:
    from .crossed import w_cocycle
    from .cocycles import TwoCocycleReal
    from .groups import Subgroup, subgroup_closure

    b = fileio.load_bundle(bundle_file)
    c = fileio.load_cocycle(cocycle_file, group=b.group)
    if not isinstance(c, TwoCocycleReal):
        raise InputInvalid("wk needs a real-valued cocycle")
    if subgroup_spec:
        gens = [int(x) for x in subgroup_spec.split(",") if x != ""]
        sub = subgroup_closure(b.group, gens)
    else:
        sub = Subgroup(b.group, tuple(b.group.elements()))
    grid = fileio.parse_theta_grid(theta_grid)
    rep = w_cocycle(c, sub, None, grid)
    click.echo(f"cocycle identity residual  {rep.max_cocycle_identity_residual:.3e}")
    click.echo(f"outer conjugacy residual   {rep.max_outer_conjugacy_residual:.3e}")
    ok = rep.passed()
    click.echo("PASS" if ok else "FAIL")
    sys.exit(0 if ok else 1)


@main.command("k0")
@click.argument("bundle_file", type=click.Path())
@click.argument("cocycle_file", type=click.Path())
@click.option("--theta-grid", default=None, help="a:b:n (real cocycle input)")
@click.option("--compare-untwisted", is_flag=True, default=False)
@click.option("--seed", default=0, type=int)
@_handle_errors
def k0_command(bundle_file, cocycle_file, theta_grid, compare_untwisted, seed) -> None:
    from .cocycles import TwoCocycleReal
    from .deformation import deform
    from .k0 import block_decompose, k0_along_path

    b = fileio.load_bundle(bundle_file)
    c = fileio.load_cocycle(cocycle_file, group=b.group)
    ok = True
    if isinstance(c, TwoCocycleReal):
        grid = fileio.parse_theta_grid(theta_grid) if theta_grid else tuple(
            float(t) for t in np.linspace(0.0, 1.0, 11))
        path = k0_along_path(b, c, grid, seed=seed)
        for theta, sig in zip(path.thetas, path.signatures):
            click.echo(f"theta={theta:+.3f}  rank={sig.rank}  "
                       f"blocks={list(sig.block_dims)}  min-gap={sig.min_center_gap:.2e}  "
                       f"seed={sig.seed}")
        click.echo(f"rank invariant along path: {path.invariant}")
        ok = path.invariant
    else:
        dalg = deform(b, c)
        sig = block_decompose(dalg.sc, seed=seed)
        click.echo(f"twisted:   rank={sig.rank} blocks={list(sig.block_dims)} "
                   f"traces={[round(t, 6) for t in sig.trace_vector]} seed={sig.seed}")
        if compare_untwisted:
            base = block_decompose([np.asarray(m) for m in b.basis], seed=seed)
            click.echo(f"untwisted: rank={base.rank} blocks={list(base.block_dims)}")
            click.echo(f"K0 ranks {'equal' if base.rank == sig.rank else 'differ'}; "
                       f"K1 = 0 on both sides")
    click.echo("PASS" if ok else "FAIL")
    sys.exit(0 if ok else 1)


@main.group()
def triple() -> None:
    """Spectral triple checks."""


@triple.command("deform")
@click.argument("bundle_file", type=click.Path())
@click.argument("cocycle_file", type=click.Path())
@click.argument("triple_file", type=click.Path())
@_handle_errors
def triple_deform(bundle_file, cocycle_file, triple_file) -> None:
    from .cocycles import TwoCocycleReal
    from .spectral import deform_triple

    t = fileio.load_triple(triple_file)
    c = fileio.load_cocycle(cocycle_file, group=t.group)
    if isinstance(c, TwoCocycleReal):
        c = exp_cocycle(c, 1.0)
    deformed = deform_triple(t, c)
    evals_before = np.sort(np.linalg.eigvalsh(t.dirac))
    evals_after = np.sort(np.linalg.eigvalsh(deformed.dirac))
    click.echo(f"representation residual {deformed.homomorphism_residual:.3e}")
    click.echo(f"isospectral: {bool(np.array_equal(evals_before, evals_after))}")
    click.echo(f"commutator norms: {[round(x, 6) for x in deformed.commutator_norms]}")
    ok = deformed.homomorphism_residual <= 1e-10
    click.echo("PASS" if ok else "FAIL")
    sys.exit(0 if ok else 1)


@triple.command("pair")
@click.argument("bundle_file", type=click.Path())
@click.argument("cocycle_file", type=click.Path())
@click.argument("triple_file", type=click.Path())
@_handle_errors
def triple_pair(bundle_file, cocycle_file, triple_file) -> None:
    from .cocycles import TwoCocycleReal
    from .spectral import ProjectionRule, deform_triple, index_pairing

    t = fileio.load_triple(triple_file)
    c = fileio.load_cocycle(cocycle_file, group=t.group)
    if isinstance(c, TwoCocycleReal):
        c = exp_cocycle(c, 1.0)
    deformed = deform_triple(t, c)
    rule = ProjectionRule(np.asarray(t.bundle.unit_coeffs), cut=0.5)
    p = rule.projection(deformed)
    click.echo(f"index of the default spectral projection: {index_pairing(deformed.gamma, p)}")
    click.echo("PASS")


@triple.command("path")
@click.argument("bundle_file", type=click.Path())
@click.argument("cocycle_file", type=click.Path())
@click.argument("triple_file", type=click.Path())
@click.option("--theta-grid", default="0:1:11", help="a:b:n")
@_handle_errors
def triple_path(bundle_file, cocycle_file, triple_file, theta_grid) -> None:
    from .cocycles import TwoCocycleReal
    from .spectral import ProjectionRule, index_invariance_along_path

    t = fileio.load_triple(triple_file)
    c = fileio.load_cocycle(cocycle_file, group=t.group)
    if not isinstance(c, TwoCocycleReal):
        raise InputInvalid("path needs a real-valued cocycle")
    grid = fileio.parse_theta_grid(theta_grid)
    rule = ProjectionRule(np.asarray(t.bundle.unit_coeffs), cut=0.5)
    try:
        report = index_invariance_along_path(t, c, grid, rule)
    except GapClosed as exc:
        click.echo(f"gap closed: {exc}", err=True)
        sys.exit(1)
    click.echo(f"indices: {report.indices}")
    click.echo(f"constant: {report.constant}")
    click.echo("PASS" if report.constant else "FAIL")
    sys.exit(0 if report.constant else 1)


if __name__ == "__main__":
    main()
