"""Command-line front end.

Exit codes: 0 success, 1 bad input (the offending flag is named), 2 solver
non-convergence (a partial trace is still written, flagged with a final
``# status=NONCONVERGED`` comment row).  ``SEMG_UNITS=nats`` converts all
reported information values from bits at the presentation layer.
"""

from __future__ import annotations

import math
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import csvio, plots
from .classify import Partition, maxmi_classify, multilabel_classify, threshold_partition
from .decision import (
    ControlProblem,
    PortfolioSpec,
    control_tradeoff,
    information_value,
    optimize_ratios,
    value_added_entropy,
)
from .errors import MaxIterExceeded, NonConvergence, SemgError
from .learn import fit_truth_semantic_kl, word_similarity
from .measures import semantic_mi, shannon_mi
from .mixture import MixtureParams, enm_fit, gcmm_fit, mixture_distribution
from .prob import (
    Distribution,
    JointTable,
    SemanticChannel,
    TruthParam,
    logical_probability,
    truth_from_joint,
    validate_distribution,
)
from .rg import rg_curve

LN2 = math.log(2.0)


class Units:
    def __init__(self):
        self.name = os.environ.get("SEMG_UNITS", "bits").strip().lower()
        if self.name not in ("bits", "nats"):
            raise click.UsageError(
                f"SEMG_UNITS must be bits or nats, got {self.name!r}")

    def conv(self, bits_value):
        if bits_value is None or not isinstance(bits_value, float):
            return bits_value
        return bits_value * LN2 if self.name == "nats" else bits_value

    def suffix(self, header: str) -> str:
        return header.replace("_bits", "_nats") if self.name == "nats" else header


def _fail(message: str, code: int = 1):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse_floats(text: str, flag: str):
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise click.BadParameter(f"{flag} expects a comma-separated real list")


def _parse_truth_spec(spec: str, flag: str) -> TruthParam:
    kind, _, rest = spec.partition(":")
    vals = _parse_floats(rest, flag)
    if kind == "logistic" and len(vals) == 2:
        return TruthParam.logistic(*vals)
    if kind in ("gaussian", "normal") and len(vals) == 2:
        return TruthParam.gaussian(*vals)
    raise click.BadParameter(
        f"{flag}: expected logistic:x0,k or gaussian:mu,sigma, got {spec!r}")


def _parse_prior_spec(spec: str, grid: np.ndarray, flag: str) -> Distribution:
    if spec.startswith("normal:"):
        mu, sigma = _parse_floats(spec[len("normal:"):], flag)
        shape = np.exp(-((grid - mu) ** 2) / (2.0 * sigma * sigma))
        return Distribution(tuple(grid.tolist()), shape / shape.sum())
    if Path(spec).exists():
        return csvio.read_distribution_csv(spec)
    raise click.BadParameter(f"{flag}: expected normal:mu,sigma or a CSV path")


def _parse_mixture_params(text: str, flag: str) -> MixtureParams:
    vals = _parse_floats(text, flag)
    if len(vals) % 3 != 2:
        raise click.BadParameter(
            f"{flag}: expected mu1..muN,sig1..sigN,w1..w(N-1), got {len(vals)} values")
    n = (len(vals) + 1) // 3
    mus = np.array(vals[:n])
    sigmas = np.array(vals[n:2 * n])
    w_head = np.array(vals[2 * n:])
    weights = np.concatenate([w_head, [1.0 - w_head.sum()]])
    if np.any(weights < 0):
        raise click.BadParameter(f"{flag}: weights must stay in [0, 1]")
    return MixtureParams(weights, mus, sigmas)


def _parse_target(spec: str, grid: np.ndarray, flag: str) -> Distribution:
    if spec.startswith("gm:"):
        params = _parse_mixture_params(spec[len("gm:"):], flag)
        return mixture_distribution(grid, params)
    if Path(spec).exists():
        return csvio.read_distribution_csv(spec)
    raise click.BadParameter(f"{flag}: expected gm:params or a CSV path")


@click.group()
def cli():
    """Semantic information toolkit: measures, solvers and learners."""


@cli.command()
@click.option("--joint", "joint_path", required=True, type=click.Path(exists=True))
def mi(joint_path):
    """Shannon mutual information of a joint CSV."""
    units = Units()
    joint = csvio.read_joint_csv(joint_path)
    value = units.conv(shannon_mi(joint))
    click.echo(f"I(X;Y) = {value:.4f} {units.name}")


@cli.command()
@click.option("--joint", "joint_path", required=True, type=click.Path(exists=True))
@click.option("--channel", "channel_path", type=click.Path(exists=True),
              help="Truth-column matrix CSV; defaults to the matched channel.")
def semi(joint_path, channel_path):
    """Semantic mutual information report for a joint table."""
    units = Units()
    joint = csvio.read_joint_csv(joint_path)
    if channel_path:
        xs, ys, cols = csvio.read_matrix_csv(channel_path)
        channel = SemanticChannel(tuple(xs), tuple(ys), cols)
    else:
        channel = truth_from_joint(joint)
    report = semantic_mi(joint, channel)
    u = units.name
    click.echo(f"SeMI          = {units.conv(report.semi):.6f} {u}")
    click.echo(f"H(Ytheta)     = {units.conv(report.coverage_entropy):.6f} {u}")
    click.echo(f"H(Ytheta|X)   = {units.conv(report.fuzzy_entropy):.6f} {u}")
    click.echo(f"H(X|Ytheta)   = {units.conv(report.prediction_entropy):.6f} {u}")
    click.echo(f"ShMI          = {units.conv(report.shannon_mi):.6f} {u}")
    eff = "undefined" if report.efficiency is None else f"{report.efficiency:.6f}"
    click.echo(f"G/R           = {eff}")


@cli.command()
@click.option("--joint", "joint_path", type=click.Path(exists=True),
              help="Joint CSV; source and model are derived from it.")
@click.option("--m", "m_path", type=click.Path(exists=True),
              help="Relatedness model CSV (with --px).")
@click.option("--px", "px_path", type=click.Path(exists=True))
@click.option("--s", "s_text", required=True,
              help="Comma-separated trade-off parameters, ascending.")
@click.option("--out", "out_path", default="rg_curve.csv", show_default=True)
@click.option("--plot/--no-plot", default=True, show_default=True)
def rg(joint_path, m_path, px_path, s_text, out_path, plot):
    """Sample the rate-fidelity curve R(G)."""
    units = Units()
    s_values = _parse_floats(s_text, "--s")
    if sorted(s_values) != s_values:
        raise click.BadParameter("--s values must be ascending")
    if joint_path:
        joint = csvio.read_joint_csv(joint_path)
        px = joint.px()
        from .prob import relatedness
        model = relatedness(joint).values
    elif m_path and px_path:
        px = csvio.read_distribution_csv(px_path)
        _, _, model = csvio.read_matrix_csv(m_path)
    else:
        raise click.BadParameter("need --joint, or --m together with --px")
    curve = rg_curve(px, model, s_values)
    header = [units.suffix(h) for h in ("s", "R_bits", "G_bits", "efficiency")]
    rows = [(p.s, units.conv(p.R), units.conv(p.G), p.efficiency)
            for p in curve.points]
    status = "NONCONVERGED" if curve.gaps else None
    csvio.write_csv(out_path, header, rows, status=status)
    if plot and curve.points:
        plots.plot_rg_curve(curve.points, Path(out_path).with_suffix(".png"))
    if curve.gaps:
        for s, err in curve.gaps:
            click.echo(f"s={s}: {err}", err=True)
        sys.exit(2)
    click.echo(f"wrote {out_path} ({len(curve.points)} points)")


@cli.command()
@click.option("--px", "px_path", required=True, type=click.Path(exists=True))
@click.option("--d", "d_path", required=True, type=click.Path(exists=True),
              help="Distortion matrix CSV.")
@click.option("--s", "s_text", required=True, help="Comma-separated s <= 0.")
@click.option("--out", "out_path", default="rd_curve.csv", show_default=True)
def rd(px_path, d_path, s_text, out_path):
    """Classical rate-distortion points via the parametric solution."""
    from .rg import rd_shannon
    units = Units()
    px = csvio.read_distribution_csv(px_path)
    _, _, d = csvio.read_matrix_csv(d_path)
    rows = []
    for s in _parse_floats(s_text, "--s"):
        if s > 0:
            raise click.BadParameter("--s values must be <= 0 for R(D)")
        D, R, _ = rd_shannon(px, d, s)
        rows.append((s, D, units.conv(R)))
    csvio.write_csv(out_path, ["s", "D", units.suffix("R_bits")], rows)
    click.echo(f"wrote {out_path} ({len(rows)} points)")


@cli.command("learn-truth")
@click.option("--joint", "joint_path", required=True, type=click.Path(exists=True))
@click.option("--label", required=True, help="y label to fit.")
@click.option("--family", required=True,
              type=click.Choice(["gaussian", "logistic", "tabular"]))
def learn_truth(joint_path, label, family):
    """Fit a truth function for one label by semantic-KL maximization."""
    units = Units()
    joint = csvio.read_joint_csv(joint_path)
    try:
        j = joint.y_support.index(csvio._label(label))
    except ValueError:
        raise click.BadParameter(f"--label {label!r} not in the joint's y support")
    px = joint.px()
    col = joint.cells[:, j]
    if col.sum() <= 0:
        _fail(f"label {label!r} carries no probability mass")
    posterior = Distribution(joint.x_support, col / col.sum())
    fit = fit_truth_semantic_kl(posterior, px, family)
    p = fit.param
    if p.family == "gaussian":
        click.echo(f"gaussian mu={p.mu:.6g} sigma={p.sigma:.6g}")
    elif p.family == "logistic":
        click.echo(f"logistic x0={p.x0:.6g} k={p.k:.6g}")
    else:
        click.echo("tabular " + ",".join(csvio.format_real(v) for v in p.values))
    click.echo(f"semantic KL = {units.conv(fit.objective):.6f} {units.name}")
    if fit.degenerate:
        click.echo("note: degenerate (uninformative) posterior", err=True)


@cli.command()
@click.option("--joint", "joint_path", required=True, type=click.Path(exists=True))
@click.option("--x", "x_label", default=None,
              help="Classify a single x; default classifies every x.")
def multilabel(joint_path, x_label):
    """Maximum-semantic-information label for instances of a joint table."""
    joint = csvio.read_joint_csv(joint_path)
    channel = truth_from_joint(joint)
    px = joint.px()
    t_theta = logical_probability(channel, px)
    if x_label is not None:
        indices = [px.index_of(csvio._label(x_label))]
    else:
        indices = range(len(px))
    click.echo("x,label")
    for i in indices:
        j = multilabel_classify(i, channel, t_theta)
        click.echo(f"{px.support[i]},{channel.labels[j]}")


@cli.command()
@click.option("--px", "px_path", required=True, type=click.Path(exists=True))
@click.option("--pzx", "pzx_path", required=True, type=click.Path(exists=True),
              help="Rows P(z|x) over the z grid (matrix CSV).")
@click.option("--init", "init_spec", required=True,
              help="threshold:VALUE or a z,label CSV.")
@click.option("--max-iter", default=50, show_default=True)
@click.option("--out", "out_path", default="maxmi_trace.csv", show_default=True)
@click.option("--partition-out", default="maxmi_partition.csv", show_default=True)
@click.option("--plot/--no-plot", default=True, show_default=True)
def maxmi(px_path, pzx_path, init_spec, max_iter, out_path, partition_out, plot):
    """Iterative MaxMI classification of a discretized observable."""
    units = Units()
    px = csvio.read_distribution_csv(px_path)
    _, z_labels, pzx = csvio.read_matrix_csv(pzx_path)
    z_grid = np.array([float(z) for z in z_labels])
    if init_spec.startswith("threshold:"):
        threshold = float(init_spec[len("threshold:"):])
        init = threshold_partition(z_grid, threshold)
    elif Path(init_spec).exists():
        from csv import reader as _reader
        with open(init_spec, newline="", encoding="utf-8") as fh:
            rows = [r for r in _reader(fh) if r and not r[0].startswith("#")]
        if rows and rows[0][0].strip().lower() == "z":
            rows = rows[1:]
        labels = np.array([int(r[1]) for r in rows])
        init = Partition(labels, int(labels.max()) + 1)
    else:
        raise click.BadParameter("--init expects threshold:VALUE or a CSV path")

    header = ["iter", units.suffix("R_bits"), units.suffix("G_bits")]
    try:
        partition, trace = maxmi_classify(px, pzx, init, max_iter=max_iter)
    except MaxIterExceeded as err:
        rows = [(s.iteration, units.conv(s.shannon_mi), units.conv(s.semantic_mi))
                for s in err.partial.steps]
        csvio.write_csv(out_path, header, rows, status="NONCONVERGED")
        _fail(str(err), code=2)
    rows = [(s.iteration, units.conv(s.shannon_mi), units.conv(s.semantic_mi))
            for s in trace.steps]
    csvio.write_csv(out_path, header, rows)
    csvio.write_csv(partition_out, ["z", "label"],
                    list(zip(z_grid, partition.assignment.tolist())))
    if plot:
        plots.plot_maxmi_trace(trace.steps, Path(out_path).with_suffix(".png"))
    click.echo(f"converged in {len(trace.steps)} iterations; "
               f"wrote {out_path}, {partition_out}")


@cli.command()
@click.option("--target", "target_spec", required=True,
              help="gm:mu1,mu2,sig1,sig2,w1 or a distribution CSV.")
@click.option("--grid", "grid_spec", default="50:175:0.5", show_default=True)
@click.option("--init", "init_text", required=True,
              help="mu1,mu2,sig1,sig2,w1 (same layout as gm:).")
@click.option("--n", "n_inner", default=1, show_default=True)
@click.option("--tol", default=1e-5, show_default=True,
              help="Stop when H(P||Ptheta) drops below this many bits.")
@click.option("--max-iter", default=1000, show_default=True)
@click.option("--gcmm", is_flag=True, help="Gaussian channel mixture variant.")
@click.option("--out", "out_path", default="mixture_trace.csv", show_default=True)
@click.option("--plot/--no-plot", default=True, show_default=True)
def mixture(target_spec, grid_spec, init_text, n_inner, tol, max_iter, gcmm,
            out_path, plot):
    """EnM / GCMM mixture fitting against a target distribution."""
    units = Units()
    try:
        grid = csvio.parse_grid(grid_spec)
    except SemgError as err:
        raise click.BadParameter(f"--grid: {err}")
    target = _parse_target(target_spec, grid, "--target")
    init = _parse_mixture_params(init_text, "--init")
    header = ["iter", units.suffix("R_bits"), units.suffix("G_bits"),
              "Q_nats", units.suffix("H_bits"), "identity_residual"]

    def rows_of(trace):
        return [(r.iteration, units.conv(r.R_bits), units.conv(r.G_bits),
                 r.Q_nats, units.conv(r.H_bits), r.identity_residual)
                for r in trace.rows]

    try:
        if gcmm:
            truths = [TruthParam.gaussian(m, s)
                      for m, s in zip(init.mus, init.sigmas)]
            params, trace = gcmm_fit(target, truths, init.weights,
                                     n_inner=n_inner, stop_tol=tol,
                                     max_iter=max_iter)
        else:
            params, trace = enm_fit(target, init, n_inner=n_inner,
                                    stop_tol=tol, max_iter=max_iter)
    except MaxIterExceeded as err:
        csvio.write_csv(out_path, header, rows_of(err.partial),
                        status="NONCONVERGED")
        if plot and err.partial.rows:
            plots.plot_mixture_trace(err.partial.rows,
                                     Path(out_path).with_suffix(".png"))
        _fail(str(err), code=2)
    csvio.write_csv(out_path, header, rows_of(trace))
    if plot:
        plots.plot_mixture_trace(trace.rows, Path(out_path).with_suffix(".png"))
    mus = ",".join(f"{v:.6g}" for v in params.mus)
    sigmas = ",".join(f"{v:.6g}" for v in params.sigmas)
    weights = ",".join(f"{v:.6g}" for v in params.weights)
    click.echo(f"converged={trace.converged} iterations={trace.iterations}")
    click.echo(f"mu=[{mus}] sigma=[{sigmas}] weights=[{weights}]")
    click.echo(f"H(P||Ptheta) = {units.conv(trace.final_H_bits):.3e} {units.name}")


@cli.command()
@click.option("--prior", "prior_spec", required=True,
              help="normal:mu,sigma or a distribution CSV.")
@click.option("--goal", "goal_spec", required=True,
              help="logistic:x0,k or gaussian:mu,sigma.")
@click.option("--grid", "grid_spec", default="0:120:0.25", show_default=True)
@click.option("--s", "s_text", required=True, help="Comma-separated boosts.")
@click.option("--out", "out_path", default="purposive.csv", show_default=True)
@click.option("--plot/--no-plot", default=True, show_default=True)
def purposive(prior_spec, goal_spec, grid_spec, s_text, out_path, plot):
    """Purposive-information trade-off table over boost levels."""
    units = Units()
    try:
        grid = csvio.parse_grid(grid_spec)
    except SemgError as err:
        raise click.BadParameter(f"--grid: {err}")
    prior = _parse_prior_spec(prior_spec, grid, "--prior")
    goal = _parse_truth_spec(goal_spec, "--goal")
    problem = ControlProblem(prior, goal)
    rows = control_tradeoff(problem, _parse_floats(s_text, "--s"))
    header = ["s", units.suffix("G_bits"), units.suffix("R_bits"), "efficiency"]
    csvio.write_csv(out_path, header,
                    [(r.s, units.conv(r.G_bits), units.conv(r.R_bits),
                      r.efficiency) for r in rows])
    if plot:
        plots.plot_tradeoff(rows, Path(out_path).with_suffix(".png"))
    click.echo(f"wrote {out_path} ({len(rows)} rows)")


@cli.command()
@click.option("--dist", "dist_path", required=True, type=click.Path(exists=True),
              help="Prior outcome distribution CSV.")
@click.option("--returns", "returns_path", required=True,
              type=click.Path(exists=True))
@click.option("--rf", default=0.0, show_default=True, help="Risk-free rate.")
@click.option("--pred", "pred_path", type=click.Path(exists=True),
              help="Optional prediction CSV for the information value.")
def portfolio(dist_path, returns_path, rf, pred_path):
    """Log-optimal ratios, value-added entropy and information value."""
    units = Units()
    dist = csvio.read_distribution_csv(dist_path)
    outcomes, rates = csvio.read_returns_csv(returns_path)
    if len(outcomes) != len(dist):
        _fail("--returns outcomes do not match --dist support")
    spec = PortfolioSpec(rates, risk_free=rf)
    best = optimize_ratios(dist, spec)
    q_text = ",".join(f"{v:.10g}" for v in best.q)
    click.echo(f"q* = [{q_text}]" + ("  (capped)" if best.capped else ""))
    click.echo(f"H_v = {units.conv(best.value_bits):.6f} {units.name}")
    if pred_path:
        pred = csvio.read_distribution_csv(pred_path)
        v = information_value(pred, dist, spec)
        qq = optimize_ratios(pred, spec)
        qq_text = ",".join(f"{v2:.10g}" for v2 in qq.q)
        click.echo(f"q** = [{qq_text}]")
        click.echo(f"V = {units.conv(v):.6f} {units.name}")
    else:
        click.echo(f"V = 0.000000 {units.name} (no prediction supplied)")


@cli.command()
@click.option("--joint", "joint_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default="similarity.csv", show_default=True)
def similarity(joint_path, out_path):
    """Word-similarity matrix from a square co-occurrence table."""
    joint = csvio.read_joint_csv(joint_path)
    sim = word_similarity(joint)
    rows = [[label] + [v for v in row]
            for label, row in zip(sim.support, sim.values)]
    csvio.write_csv(out_path, ["x\\y"] + [str(l) for l in sim.support], rows)
    click.echo(f"wrote {out_path}")


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as err:
        click.echo(f"error: {err.format_message()}", err=True)
        sys.exit(1)
    except click.exceptions.Exit as err:
        sys.exit(err.exit_code)
    except SemgError as err:
        click.echo(f"error: {type(err).__name__}: {err}", err=True)
        sys.exit(1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
