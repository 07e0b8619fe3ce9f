"""Batch experiment runner.

Subcommands: build-code, capacity, verify, feedback-sim, show.  Every run is
configured by flags or a JSON --config file (flags win), echoes its
configuration into the emitted report, and is reproducible byte for byte
from the same seed regardless of --threads.  Exit codes: 0 all verdicts
pass, 1 a verdict failed, 2 usage/configuration error.
"""

from __future__ import annotations

import json
import sys
import time

import click
import numpy as np

from . import channels, feedback, idcodes, linalg, serialize, verify
from ._accel import backend_name
from .report import ExperimentReport
from .sampling import RandomChannelSpec, Seed, sample_random_channel


def _common(f):
    for opt in reversed(
        [
            click.option("--seed", type=int, default=0, show_default=True, help="root seed (u64)"),
            click.option("--out", type=click.Path(dir_okay=False), default=None, help="report path"),
            click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True),
            click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON file with defaults; explicit flags override"),
            click.option("--threads", type=int, default=1, show_default=True),
        ]
    ):
        f = opt(f)
    return f


def _merge_config(ctx: click.Context, params: dict) -> dict:
    path = params.get("config_path")
    if not path:
        return params
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read config file: {exc}")
    for key, value in cfg.items():
        name = key.replace("-", "_")
        if name not in params:
            raise click.UsageError(f"unknown config key {key!r}")
        if ctx.get_parameter_source(name) == click.core.ParameterSource.DEFAULT:
            params[name] = value
    return params


def _finish(report: ExperimentReport, out: str | None, fmt: str) -> None:
    text = report.to_json() if fmt == "json" else report.to_csv()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        click.echo(f"report written to {out}", err=True)
    else:
        click.echo(text, nl=False)
    click.echo(f"[{report.command}] {report.duration_s:.3f}s backend={backend_name()}", err=True)
    sys.exit(0 if report.all_pass else 1)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise click.UsageError(message)


@click.group()
@click.version_option(package_name="qidcodes")
def main() -> None:
    """Identification codes over quantum channels: build, evaluate, verify."""


# ---------------------------------------------------------------- build-code


@main.command("build-code")
@click.argument("kind", type=click.Choice(["greedy", "hashing", "blowup", "entangled-hashing"]))
@click.option("--d", type=int, default=16, show_default=True, help="system dimension")
@click.option("--delta", type=int, default=2, show_default=True, help="codestate rank (greedy)")
@click.option("--delta-dim", type=int, default=16, show_default=True, help="transmitted dimension (entangled-hashing)")
@click.option("--lam", type=float, default=0.6, show_default=True, help="target error of second kind")
@click.option("--eta", type=float, default=1.0 / 3.0, show_default=True, help="spectral evenness slack (greedy)")
@click.option("--max-trials", type=int, default=10_000, show_default=True, help="consecutive rejections before stopping")
@click.option("--max-size", type=int, default=None, help="optional growth cap")
@click.option("--m", "m_size", type=int, default=1024, show_default=True, help="shared-randomness size M")
@click.option("--n-symbols", type=int, default=64, show_default=True, help="transmitted alphabet N")
@click.option("--count", type=int, default=1024, show_default=True, help="number of messages/functions")
@click.option("--base-code", type=click.Path(exists=True, dir_okay=False), default=None, help="base code JSON (blowup)")
@click.option("--save-code", type=click.Path(dir_okay=False), default=None, help="serialize the built code here")
@_common
@click.pass_context
def build_code(ctx, kind, **params):
    """Construct an identification code and report its exact error profile."""
    p = _merge_config(ctx, params)
    seed = Seed(p["seed"], 0)
    t0 = time.perf_counter()
    code_json = None
    if kind == "greedy":
        _require(1 <= p["delta"] <= p["d"], "need 1 <= delta <= d")
        _require(0.0 < p["lam"] < 1.0, "lam must lie in (0, 1)")
        _require(0.0 < p["eta"] < 1.0, "eta must lie in (0, 1)")
        gp = idcodes.GreedyParams(
            d=p["d"], delta=p["delta"], lam=p["lam"], eta=p["eta"],
            max_trials=p["max_trials"], max_size=p["max_size"],
        )
        code, report = idcodes.greedy_random_code(gp, seed)
        if p["delta"] == p["d"]:
            report.add_verdict(
                "degenerate_full_rank",
                len(code) <= 1,
                "rank-d decoders are the identity, any second state overlaps fully",
            )
        code_json = serialize.code_to_json(code)
    elif kind == "hashing":
        _require(p["n_symbols"] >= 2, "need N >= 2")
        _require(p["count"] >= 2, "need count >= 2")
        code = idcodes.hashing_code(p["m_size"], p["n_symbols"], p["count"], seed)
        errors = idcodes.eval_classical_id(code)
        lam_target = p["lam"] if ctx.get_parameter_source("lam") != click.core.ParameterSource.DEFAULT else 2.0 / np.log2(p["n_symbols"])
        report = ExperimentReport(
            command="build-code.hashing",
            config={k: p[k] for k in ("m_size", "n_symbols", "count", "seed")},
            results=[{
                "code_size": len(code),
                "lambda1": errors.lambda1,
                "lambda2": errors.lambda2,
                "lam_target": lam_target,
            }],
        )
        report.add_verdict("lambda1_zero", errors.lambda1 == 0.0)
        report.add_verdict("lambda2_within_target", errors.lambda2 <= lam_target, f"lambda2={errors.lambda2:.6f}")
        code_json = serialize.classical_code_to_json(code)
    elif kind == "blowup":
        _require(p["base_code"] is not None, "--base-code is required for blowup")
        base = serialize.code_from_json(serialize.load(p["base_code"]))
        base_errors = idcodes.eval_id_errors(base)
        code = idcodes.blowup_code(base, p["m_size"], p["count"], seed)
        errors = idcodes.eval_id_errors(code)
        report = ExperimentReport(
            command="build-code.blowup",
            config={k: p[k] for k in ("m_size", "count", "seed")},
            results=[{
                "base_size": len(base),
                "code_size": len(code),
                "base_lambda1": base_errors.lambda1,
                "base_lambda2": base_errors.lambda2,
                "lambda1": errors.lambda1,
                "lambda2": errors.lambda2,
            }],
        )
        report.add_verdict("lambda1_nonincreasing", errors.lambda1 <= base_errors.lambda1 + 1e-12)
        code_json = serialize.code_to_json(code)
    else:  # entangled-hashing
        _require(p["delta_dim"] >= 2, "need Delta >= 2")
        _require(0.0 < p["lam"] < 1.0, "lam must lie in (0, 1)")
        code, chans, report = idcodes.entangled_hashing_code(
            p["d"], p["delta_dim"], p["lam"], max_trials=p["max_trials"], seed=seed,
            max_size=p["max_size"],
        )
        worst_red = 0.0
        worst_cptp = 0.0
        eye = np.eye(p["d"]) / p["d"]
        for state, chan in zip(code.states, chans):
            red = linalg.partial_trace_mat(state.mat, state.dims, keep=[0])
            worst_red = max(worst_red, float(np.abs(red - eye).max()))
            worst_cptp = max(worst_cptp, channels.QuantumChannel.completeness_residual(chan.kraus))
        report.results[0]["worst_reduction_residual"] = worst_red
        report.results[0]["worst_cptp_residual"] = worst_cptp
        report.add_verdict("reductions_maximally_mixed", worst_red <= 1e-9, f"residual={worst_red:.2e}")
        report.add_verdict("choi_channels_cptp", worst_cptp <= 1e-8, f"residual={worst_cptp:.2e}")
        code_json = serialize.code_to_json(code)
    report.duration_s = time.perf_counter() - t0
    if p["save_code"] and code_json is not None:
        serialize.dump(code_json, p["save_code"])
    _finish(report, p["out"], p["fmt"])


# ------------------------------------------------------------------ capacity


@main.command("capacity")
@click.option("--channel", "channel_path", type=click.Path(exists=True, dir_okay=False), default=None, help="channel JSON")
@click.option("--quantity", type=click.Choice(["coherent-feedback", "qc-feedback", "max-output-entropy", "cq-ff", "correlated"]), default="coherent-feedback", show_default=True)
@click.option("--correlated-input", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON with p and bipartite pure states")
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--grid-check", is_flag=True, help="cross-check a qubit optimizer value against a dense Bloch-ball grid")
@_common
@click.pass_context
def capacity(ctx, **params):
    """Evaluate the capacity formulas on a serialized channel."""
    p = _merge_config(ctx, params)
    t0 = time.perf_counter()
    results: list[dict] = []
    report = ExperimentReport(
        command="capacity",
        config={k: p[k] for k in ("quantity", "tol", "seed")},
        results=results,
    )
    if p["quantity"] == "correlated":
        _require(p["correlated_input"] is not None, "--correlated-input is required")
        data = serialize.load(p["correlated_input"])
        states = [
            linalg.DensityOperator(serialize.matrix_from_json(s["mat"]), tuple(s["dims"]))
            for s in data["states"]
        ]
        value = feedback.correlated_capacity(np.asarray(data["p"], dtype=float), states)
        results.append({"quantity": "correlated", "value": value})
        report.add_verdict("computed", True)
        report.duration_s = time.perf_counter() - t0
        _finish(report, p["out"], p["fmt"])
    _require(p["channel_path"] is not None, "--channel is required")
    chan = serialize.channel_from_json(serialize.load(p["channel_path"]))
    qty = p["quantity"]
    if qty == "cq-ff":
        _require(isinstance(chan, channels.CqChannel), "cq-ff needs a cq channel")
        res = channels.cq_ff_capacity(chan, tol=p["tol"])
        results.append({
            "quantity": qty,
            "value": res.value,
            "is_lower_bound": True,
            "argmax_p": [float(x) for x in res.argmax],
        })
        report.add_verdict("optimizer_converged", res.converged)
    elif qty == "qc-feedback":
        _require(isinstance(chan, channels.QcChannel), "qc-feedback needs a qc channel")
        value = feedback.qc_feedback_capacity(chan, tol=p["tol"])
        results.append({"quantity": qty, "value": value, "constant": channels.qc_is_constant(chan)})
        report.add_verdict("computed", True)
    elif qty == "coherent-feedback":
        _require(isinstance(chan, channels.QuantumChannel), "coherent-feedback needs a quantum channel")
        value = feedback.coherent_feedback_capacity(chan, tol=p["tol"])
        results.append({"quantity": qty, "value": value, "constant": channels.is_constant_channel(chan)})
        report.add_verdict("computed", True)
    else:  # max-output-entropy
        _require(isinstance(chan, (channels.QuantumChannel, channels.QcChannel)), "max-output-entropy needs a quantum or qc channel")
        res = channels.max_output_entropy(chan, tol=p["tol"])
        results.append({"quantity": qty, "value": res.value})
        report.add_verdict("optimizer_converged", res.converged)
        if p["grid_check"]:
            d_in = chan.d_in if isinstance(chan, channels.QuantumChannel) else chan.d
            _require(d_in == 2, "--grid-check is implemented for qubit inputs only")
            grid_val = _bloch_grid_max(chan)
            results[-1]["grid_value"] = grid_val
            report.add_verdict("grid_within_1e-3", abs(res.value - grid_val) <= 1e-3,
                               f"optimizer={res.value:.6f} grid={grid_val:.6f}")
    report.duration_s = time.perf_counter() - t0
    _finish(report, p["out"], p["fmt"])


def _bloch_grid_max(chan, points_per_axis: int = 60) -> float:
    """Dense Bloch-ball grid maximum of the output entropy (qubit inputs)."""
    ax = np.linspace(-1.0, 1.0, points_per_axis)
    x, y, z = np.meshgrid(ax, ax, ax, indexing="ij")
    mask = x**2 + y**2 + z**2 <= 1.0
    xs, ys, zs = x[mask], y[mask], z[mask]
    rhos = np.empty((len(xs), 2, 2), dtype=np.complex128)
    rhos[:, 0, 0] = (1 + zs) / 2
    rhos[:, 1, 1] = (1 - zs) / 2
    rhos[:, 0, 1] = (xs - 1j * ys) / 2
    rhos[:, 1, 0] = (xs + 1j * ys) / 2
    if isinstance(chan, channels.QcChannel):
        probs = np.einsum("nij,yji->ny", rhos, chan.povm).real
        probs = np.clip(probs, 1e-300, None)
        ent = -(probs * np.log2(probs)).sum(axis=1)
        return float(ent.max())
    sup = chan.superoperator()
    outs = (rhos.reshape(len(xs), 4) @ sup.T).reshape(len(xs), chan.d_out, chan.d_out)
    vals = np.linalg.eigvalsh(outs)
    vals = np.clip(vals, 1e-300, None)
    ent = -(vals * np.log2(vals)).sum(axis=1)
    return float(ent.max())


# -------------------------------------------------------------------- verify


def _parse_list(text: str, cast) -> list:
    try:
        return [cast(x) for x in str(text).split(",") if x != ""]
    except ValueError:
        raise click.UsageError(f"cannot parse list {text!r}")


@main.command("verify")
@click.argument("lemma", type=click.Choice(["ld", "uniform", "net", "gentle"]))
@click.option("--d", type=int, default=32, show_default=True)
@click.option("--r", type=int, default=4, show_default=True)
@click.option("--eps", default="0.5", show_default=True, help="comma-separated values")
@click.option("--mode", type=click.Choice(["upper", "lower"]), default="upper", show_default=True)
@click.option("--t", type=int, default=2, show_default=True)
@click.option("--eta", type=float, default=0.5, show_default=True)
@click.option("--u", default="8,32,128,512", show_default=True, help="comma-separated environment dims")
@click.option("--trials", type=int, default=10_000, show_default=True)
@_common
@click.pass_context
def verify_cmd(ctx, lemma, **params):
    """Monte Carlo / exhaustive checks of the probability bounds."""
    p = _merge_config(ctx, params)
    _require(p["trials"] >= 1, "trials must be positive")
    seed = Seed(p["seed"], 0)
    t0 = time.perf_counter()
    results: list[dict] = []
    report = ExperimentReport(command=f"verify.{lemma}", config=dict(p), results=results)
    report.config.pop("config_path", None)
    report.config.pop("out", None)
    report.config.pop("fmt", None)
    if lemma == "ld":
        _require(1 <= p["r"] <= p["d"], "need 1 <= r <= d")
        for i, eps in enumerate(_parse_list(p["eps"], float)):
            _require(eps > 0, "eps must be positive")
            est = verify.ld_tail(p["d"], p["r"], eps, p["trials"], seed.spawn(i),
                                 mode=p["mode"], threads=p["threads"])
            ok = est.passes()
            mean_ok = abs(est.mean_stat - p["r"] / p["d"]) <= 4.0 * est.mean_std_err
            results.append({
                "lemma": "ld", "d": p["d"], "r": p["r"], "eps": eps, "mode": p["mode"],
                "empirical": est.empirical_prob, "bound": est.bound,
                "std_err": est.std_err, "mean_stat": est.mean_stat,
                "verdict": "pass" if (ok and mean_ok) else "FAIL",
            })
            report.add_verdict(f"ld_eps_{eps}", ok and mean_ok,
                               f"empirical={est.empirical_prob:.5f} bound={est.bound:.5f}")
    elif lemma == "uniform":
        _require(0 < p["eta"] <= 1, "eta must lie in (0, 1]")
        u_list = _parse_list(p["u"], int)
        _require(all(p["t"] <= u for u in u_list), "need t <= u for every u")
        estimates = []
        for i, u in enumerate(u_list):
            est = verify.uniform_deviation(p["t"], u, p["eta"], p["trials"],
                                           seed.spawn(i), threads=p["threads"])
            bound_ok = est.bound > 1.0 or est.passes()
            estimates.append(est)
            results.append({
                "lemma": "uniform", "t": p["t"], "u": u, "eta": p["eta"],
                "empirical": est.empirical_prob, "bound": est.bound,
                "std_err": est.std_err, "verdict": "pass" if bound_ok else "FAIL",
            })
            report.add_verdict(f"uniform_u_{u}", bound_ok,
                               f"empirical={est.empirical_prob:.5f} bound={est.bound:.3e}")
        mono = all(
            b.empirical_prob <= a.empirical_prob + 3.0 * (a.std_err + b.std_err)
            for a, b in zip(estimates, estimates[1:])
        )
        report.add_verdict("monotone_in_u", mono)
    elif lemma == "net":
        for eps in _parse_list(p["eps"], float):
            _require(0 < eps <= 2, "eps must lie in (0, 2]")
            rep = verify.qubit_net(eps, seed=seed.spawn(17))
            ok = rep.coverage_failures == 0 and rep.cardinality <= rep.paper_bound
            results.append({
                "lemma": "net", "eps": eps, "cardinality": rep.cardinality,
                "bound": rep.paper_bound, "failures": rep.coverage_failures,
                "verdict": "pass" if ok else "FAIL",
            })
            report.add_verdict(f"net_eps_{eps}", ok)
    else:  # gentle
        rng_seed = seed.spawn(3)
        fails = 0
        worst = 0.0
        from .sampling import sample_random_state
        for i in range(p["trials"]):
            rho = sample_random_state(p["d"], p["d"], rng_seed.spawn(i))
            spec = linalg.eig_herm(rho.mat)
            keep = max(1, p["d"] - 1)
            basis = spec.eigenvectors[:, :keep]
            proj = linalg.HermitianOperator(basis @ basis.conj().T)
            chk = verify.gentle_measurement_check(rho, proj)
            worst = max(worst, chk.lhs - chk.rhs)
            fails += 0 if chk.ok else 1
        results.append({
            "lemma": "gentle", "d": p["d"], "trials": p["trials"], "failures": fails,
            "worst_excess": worst, "verdict": "pass" if fails == 0 else "FAIL",
        })
        report.add_verdict("gentle_all_ok", fails == 0)
    report.duration_s = time.perf_counter() - t0
    _finish(report, p["out"], p["fmt"])


# -------------------------------------------------------------- feedback-sim


@main.command("feedback-sim")
@click.argument("mode", type=click.Choice(["qc", "coherent"]))
@click.option("--channel", "channel_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--strategy", "strategy_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--eps", type=float, default=0.3, show_default=True)
@click.option("--round-c", type=int, default=None, help="decoder rounding granularity demo (qc mode)")
@click.option("--code-size", type=int, default=6, show_default=True, help="messages in the rounding demo")
@click.option("--dist-out", type=click.Path(dir_okay=False), default=None, help="write the output distribution CSV here")
@_common
@click.pass_context
def feedback_sim(ctx, mode, **params):
    """Simulate feedback strategies and the typical-set machinery end to end."""
    p = _merge_config(ctx, params)
    _require(0.0 < p["eps"] < 1.0, "eps must lie in (0, 1)")
    seed = Seed(p["seed"], 0)
    t0 = time.perf_counter()
    chan = serialize.channel_from_json(serialize.load(p["channel_path"]))
    results: list[dict] = []
    report = ExperimentReport(
        command=f"feedback-sim.{mode}",
        config={k: p[k] for k in ("eps", "round_c", "code_size", "seed")},
        results=results,
    )
    if mode == "qc":
        _require(isinstance(chan, channels.QcChannel), "qc mode needs a qc channel")
        if p["strategy_path"]:
            strat = serialize.strategy_from_json(serialize.load(p["strategy_path"]))
        else:
            strat = _random_strategy(chan, n=3, seed=seed.spawn(1))
        dist = feedback.feedback_output_dist(strat, chan)
        maxh = channels.max_output_entropy(chan, tol=1e-6).value
        ts = feedback.typical_set(dist, p["eps"], n=strat.n, y_size=strat.y_size, max_entropy=maxh)
        results.append({
            "n": strat.n, "y_size": strat.y_size, "dist_sum": float(dist.sum()),
            "typical_size": ts.size, "typical_mass": ts.mass,
            "typical_bound_log2": ts.bound_log2, "max_output_entropy": maxh,
        })
        report.add_verdict("distribution_normalised", abs(float(dist.sum()) - 1.0) <= 1e-9)
        report.add_verdict("typical_mass", ts.mass >= 1.0 - p["eps"] - 1e-12)
        size_cap = min(ts.bound if ts.bound is not None else np.inf, float(strat.y_size**strat.n))
        report.add_verdict("typical_size_within_bound", ts.size <= size_cap)
        if p["dist_out"]:
            with open(p["dist_out"], "w", encoding="utf-8", newline="") as fh:
                fh.write(serialize.dist_to_csv(dist, strat.n, strat.y_size))
        if p["round_c"]:
            demo = _rounding_demo(chan, strat.n, p["code_size"], p["eps"], p["round_c"], seed.spawn(2))
            results.append(demo)
            report.add_verdict("rounding_lambda1_degradation", demo["lambda1_excess_ok"])
            report.add_verdict("rounding_lambda2_nonincreasing", demo["lambda2_ok"])
    else:
        _require(isinstance(chan, channels.QuantumChannel), "coherent mode needs a quantum channel")
        _require(p["strategy_path"] is not None, "--strategy is required in coherent mode")
        strat = serialize.coherent_strategy_from_json(serialize.load(p["strategy_path"]))
        dilation = channels.stinespring(chan)
        omega = feedback.coherent_feedback_output(strat, dilation)
        proj, prep = feedback.output_projector(omega, chan, p["eps"])
        results.append({
            "n": strat.n,
            "output_entropy": linalg.von_neumann_entropy(omega),
            "projector_rank": prep.rank,
            "projector_mass": prep.mass,
            "rank_bound_log2": prep.bound_log2,
            "max_output_entropy": prep.max_output_entropy,
        })
        report.add_verdict("projector_mass", prep.mass >= 1.0 - p["eps"] - 1e-12)
        cap = min(prep.bound, float(chan.d_out**strat.n))
        report.add_verdict("projector_rank_within_bound", prep.rank <= cap)
    report.duration_s = time.perf_counter() - t0
    _finish(report, p["out"], p["fmt"])


def _random_strategy(chan, n: int, seed: Seed) -> feedback.FeedbackStrategy:
    """Adaptive strategy tree of random states (dense, for demos and goldens)."""
    from .sampling import sample_random_state

    y = chan.n_outcomes
    levels = []
    counter = 0
    for t in range(n):
        mats = []
        for _ in range(y**t):
            mats.append(sample_random_state(chan.d, chan.d, seed.spawn(counter)).mat)
            counter += 1
        levels.append(np.stack(mats))
    return feedback.FeedbackStrategy(n, y, tuple(levels))


def _rounding_demo(chan, n: int, size: int, eps: float, c: int, seed: Seed) -> dict:
    """Build a diagonal feedback ID code, round its decoders, recompute exactly."""
    dists = []
    decoders = []
    rng = seed.generator()
    for i in range(size):
        strat = _random_strategy(chan, n, seed.spawn(100 + i))
        q = feedback.feedback_output_dist(strat, chan)
        dists.append(q)
        decoders.append(rng.random(len(q)))
    code = idcodes.DiagonalIdCode(chan.n_outcomes, n, np.stack(dists), np.stack(decoders))
    sets = [feedback.typical_set(q, eps / 3.0) for q in code.dists]
    rounded = idcodes.round_decoders(code, sets, c)
    before = idcodes.eval_diagonal_id(code)
    after = idcodes.eval_diagonal_id(rounded)
    allowed = 1.0 / c + eps / 3.0
    return {
        "demo": "decoder-rounding", "c": c, "code_size": size,
        "lambda1_before": before.lambda1, "lambda1_after": after.lambda1,
        "lambda2_before": before.lambda2, "lambda2_after": after.lambda2,
        "lambda1_allowed_excess": allowed,
        "lambda1_excess_ok": after.lambda1 <= before.lambda1 + allowed + 1e-12,
        "lambda2_ok": after.lambda2 <= before.lambda2 + 1e-12,
    }


# ---------------------------------------------------------------------- show


@main.command("show")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def show(path):
    """Summarise a serialized artifact (channel, code, strategy or report)."""
    try:
        data = serialize.load(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot parse {path}: {exc}")
    kind = data.get("kind", "report" if "verdicts" in data else "unknown")
    click.echo(f"kind: {kind}")
    if kind == "quantum":
        click.echo(f"quantum channel {data['d_in']} -> {data['d_out']} with {len(data['kraus'])} Kraus operators")
    elif kind == "qc":
        click.echo(f"qc channel on dimension {data['d']} with {len(data['povm'])} outcomes")
    elif kind == "cq":
        click.echo(f"cq channel with {len(data['letter_states'])} letters into dimension {data['d_out']}")
    elif kind == "id-code":
        click.echo(f"id code with {len(data['entries'])} entries on dims {data['dims']}")
    elif kind == "classical-id-code":
        click.echo(f"classical id code: {len(data['functions'])} functions [{data['M']}] -> [{data['N']}]")
    elif kind == "feedback-strategy":
        click.echo(f"feedback strategy: n={data['n']}, alphabet {data['y_size']}, {len(data['nodes'])} nodes")
    elif kind == "coherent-strategy":
        click.echo(f"coherent strategy: ancilla {data['ancilla_dim']}, {len(data['maps'])} rounds")
    elif kind == "report":
        click.echo(f"report for {data.get('command')}: all_pass={data.get('all_pass')}")
        for v in data.get("verdicts", []):
            click.echo(f"  {'pass' if v['passed'] else 'FAIL'} {v['name']} {v.get('detail', '')}".rstrip())
    sys.exit(0)


if __name__ == "__main__":
    main()
