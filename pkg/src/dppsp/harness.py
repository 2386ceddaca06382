"""
Configuration-driven experiments: parse a flat ``key = value`` file, build
the instance and the network, run the iterations and write traces,
diagnostics and bound comparisons.

Config files hold one ``key = value`` per line. Keys are dotted
(``graph.n = 10``) or grouped under ``[section]`` headers, which prefix every
following key. ``#`` starts a comment. See ``FORMATS.md`` for the full list of
keys and every output file.
"""

from __future__ import annotations

import dataclasses
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import AlgoConfig, StepSizeWarning, initial_point, lemma2_cap, regime_flags, run, theorem1_cap
from .diagnostics import (
    bound_inputs,
    check_mvi,
    format_report,
    lemma2_margin,
    rate_slope,
    reference_solution,
    theorem1_floor,
    theorem1_rhs,
    theorem2_rhs,
)
from .errors import DPPSPError, DegenerateFit, ParseError, ValidationError
from .graph import Graph, MixingMatrix, build_er_graph, complete_graph, laplacian, mixing_from_laplacian, path_graph
from .operators import LocalSaddle, system_rho
from .problems import InstanceSpec, make_instance

OUTPUT_ROOT_ENV = "DPPSP_OUTPUT_ROOT"
EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 2, 3
GRAPH_KINDS = ("er", "path", "complete", "file")
INIT_KINDS = ("zero", "random")
SUMMARY_COLUMNS = (
    "label",
    "alpha",
    "T",
    "repeats",
    "mean_gap",
    "mean_consensus",
    "final_consensus",
    "slope",
    "status",
)
BOUND_COLUMNS = ("quantity", "measured", "bound", "regime_ok")


@dataclass(frozen=True)
class GraphSpec:
    kind: str = "er"
    n: int | None = None
    p: float = 0.5
    seed: int = 0
    edgelist: str | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description.

    ``alpha_rule`` keeps the stepsize exactly as written (a number, ``auto``,
    ``lemma2`` or ``theorem1``, optionally ``*factor``); ``algo.alpha`` holds
    its resolved value.
    """

    instance: InstanceSpec
    graph: GraphSpec
    algo: AlgoConfig
    alpha_rule: str = "auto"
    tau_factor: float = 1.1
    outputs: str = "runs"
    repeats: int = 1
    init: str = "random"
    init_scale: float = 1.0
    baseline: bool = False
    bounds_t_min: int = 16
    base_dir: str = field(default=".", compare=False)


# ---------------------------------------------------------------- parsing


def _to_bool(text):
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional(conv):
    return lambda text: None if text.lower() == "none" else conv(text)


_INSTANCE_TYPES = {
    "family": str,
    "N": int,
    "p": int,
    "q": int,
    "seed": int,
    "rho": float,
    "box_radius": float,
    "set_kind": str,
    "heterogeneity": float,
    "offset_scale": float,
    "coupling": float,
    "mu": float,
    "mvi_x0": float,
    "mvi_lower": float,
    "mvi_upper": float,
}
_GRAPH_TYPES = {"kind": str, "n": _optional(int), "p": float, "seed": int, "edgelist": _optional(str)}
_ALGO_TYPES = {
    "alpha": str,
    "T": int,
    "form": str,
    "seed": int,
    "snapshot_every": int,
    "inner_tol": float,
    "max_inner_iters": int,
    "inner_step": _optional(float),
    "regime": str,
    "record_wall_time": _to_bool,
}
_TOP_TYPES = {
    "tau_factor": float,
    "outputs": str,
    "repeats": int,
    "init": str,
    "init_scale": float,
    "baseline": _to_bool,
    "bounds_t_min": int,
}
SCHEMA = {
    **{f"instance.{k}": v for k, v in _INSTANCE_TYPES.items()},
    **{f"graph.{k}": v for k, v in _GRAPH_TYPES.items()},
    **{f"algo.{k}": v for k, v in _ALGO_TYPES.items()},
    **_TOP_TYPES,
}
REQUIRED = ("instance.family", "instance.N", "algo.T")


def read_pairs(text):
    """Split config text into ``{dotted key: (raw value, line number)}``."""
    pairs = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError("unterminated section header", lineno)
            section = line[1:-1].strip()
            if section and not section.replace("_", "").replace(".", "").isalnum():
                raise ParseError(f"bad section name {section!r}", lineno)
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ParseError("empty key or value", lineno)
        full = f"{section}.{key}" if section else key
        if full in pairs:
            raise ParseError(f"duplicate key {full!r}", lineno)
        pairs[full] = (value, lineno)
    return pairs


def parse_alpha_rule(rule):
    """Split ``"lemma2*0.5"`` into ``("lemma2", 0.5)``; plain numbers give ``(None, value)``."""
    base, _, factor = rule.partition("*")
    base = base.strip()
    scale = float(factor) if factor else 1.0
    if not scale > 0:
        raise ValueError("alpha factor must be positive")
    if base in ("auto", "lemma2", "theorem1"):
        return base, scale
    if factor:
        raise ValueError("a '*factor' suffix needs a named stepsize")
    value = float(base)
    if not value > 0:
        raise ValueError("alpha must be positive")
    return None, value


def resolve_alpha(rule, rho, lambda_min_W, regime="theorem1"):
    """Numeric stepsize for ``rule``.

    ``auto`` is the cap of ``regime`` (the strong-monotonicity cap for ``lemma2``,
    ``1/(2 rho)`` otherwise) and falls back to 1 when ``rho = 0``.
    """
    base, scale = parse_alpha_rule(rule)
    if base is None:
        return scale
    if base == "auto":
        cap = lemma2_cap(rho, lambda_min_W) if regime == "lemma2" else theorem1_cap(rho)
        return scale * (1.0 if np.isinf(cap) else cap)
    cap = lemma2_cap(rho, lambda_min_W) if base == "lemma2" else theorem1_cap(rho)
    if np.isinf(cap):
        raise ValueError(f"the {base} stepsize cap is unbounded when rho = 0; give alpha as a number")
    return scale * cap


def _convert(pairs, key, default=dataclasses.MISSING):
    if key not in pairs:
        if default is dataclasses.MISSING:
            raise ValidationError(key, "is required")
        return default
    text, _ = pairs[key]
    try:
        return SCHEMA[key](text)
    except ValueError as exc:
        raise ValidationError(key, str(exc)) from None


def parse_config_text(text, base_dir="."):
    """Parse and validate config text; relative paths resolve against ``base_dir``."""
    pairs = read_pairs(text)
    for key, (_, lineno) in pairs.items():
        if key not in SCHEMA:
            raise ValidationError(key, f"unknown key (line {lineno})")
    for key in REQUIRED:
        _convert(pairs, key)

    inst_kwargs = {k: _convert(pairs, f"instance.{k}") for k in _INSTANCE_TYPES if f"instance.{k}" in pairs}
    try:
        instance = InstanceSpec(**inst_kwargs)
    except (TypeError, ValueError) as exc:
        raise ValidationError("instance", str(exc)) from None

    gdef = GraphSpec()
    graph = GraphSpec(
        kind=_convert(pairs, "graph.kind", "file" if "graph.edgelist" in pairs else gdef.kind),
        n=_convert(pairs, "graph.n", instance.N),
        p=_convert(pairs, "graph.p", gdef.p),
        seed=_convert(pairs, "graph.seed", gdef.seed),
        edgelist=_convert(pairs, "graph.edgelist", None),
    )
    if graph.kind not in GRAPH_KINDS:
        raise ValidationError("graph.kind", f"must be one of {GRAPH_KINDS}")
    if graph.n != instance.N:
        raise ValidationError("graph.n", f"graph has {graph.n} nodes but instance.N = {instance.N}")
    if not 0 < graph.p <= 1:
        raise ValidationError("graph.p", "must lie in (0, 1]")
    if graph.kind == "file":
        if graph.edgelist is None:
            raise ValidationError("graph.edgelist", "is required when graph.kind = file")
        if not (Path(base_dir) / graph.edgelist).is_file():
            raise ValidationError("graph.edgelist", f"file {graph.edgelist!r} does not exist")
    elif graph.edgelist is not None:
        raise ValidationError("graph.edgelist", "only allowed when graph.kind = file")

    top = {k: _convert(pairs, k, ExperimentConfig.__dataclass_fields__[k].default) for k in _TOP_TYPES}
    if not top["tau_factor"] > 1:
        raise ValidationError("tau_factor", "must exceed 1 so that tau > lambda_max(L)")
    if top["repeats"] < 1:
        raise ValidationError("repeats", "must be >= 1")
    if top["init"] not in INIT_KINDS:
        raise ValidationError("init", f"must be one of {INIT_KINDS}")
    if not top["init_scale"] > 0:
        raise ValidationError("init_scale", "must be positive")
    if top["bounds_t_min"] < 1:
        raise ValidationError("bounds_t_min", "must be >= 1")

    alpha_rule = _convert(pairs, "algo.alpha", "auto")
    try:
        parse_alpha_rule(alpha_rule)
    except ValueError as exc:
        raise ValidationError("algo.alpha", str(exc)) from None
    algo_kwargs = {k: _convert(pairs, f"algo.{k}") for k in _ALGO_TYPES if k != "alpha" and f"algo.{k}" in pairs}
    try:
        # placeholder stepsize; the rule is resolved against the built instance
        algo = AlgoConfig(alpha=1.0, **algo_kwargs)
    except (TypeError, ValueError) as exc:
        raise ValidationError("algo", str(exc)) from None

    cfg = ExperimentConfig(instance, graph, algo, alpha_rule, base_dir=str(base_dir), **top)
    base, value = parse_alpha_rule(alpha_rule)
    if base is None:
        return dataclasses.replace(cfg, algo=dataclasses.replace(algo, alpha=value))
    _, W = build_network(cfg)
    problems = build_instance(cfg).problems
    return with_alpha(cfg, alpha_rule, system_rho(problems), W.lambda_min)


def parse_config(path):
    """Read and validate a config file. Raises ParseError or ValidationError."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return parse_config_text(text, base_dir=path.parent)


def with_alpha(cfg, rule, rho, lambda_min_W):
    try:
        alpha = resolve_alpha(rule, rho, lambda_min_W, cfg.algo.regime)
    except ValueError as exc:
        raise ValidationError("algo.alpha", str(exc)) from None
    return dataclasses.replace(cfg, alpha_rule=rule, algo=dataclasses.replace(cfg.algo, alpha=alpha))


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_config(cfg):
    """Canonical text for ``cfg``: every key explicit, sections in fixed order."""
    lines = [f"{k} = {_fmt(getattr(cfg, k))}" for k in _TOP_TYPES]
    lines += ["", "[instance]"]
    lines += [f"{k} = {_fmt(getattr(cfg.instance, k))}" for k in _INSTANCE_TYPES]
    lines += ["", "[graph]"]
    lines += [f"{k} = {_fmt(getattr(cfg.graph, k))}" for k in _GRAPH_TYPES]
    lines += ["", "[algo]"]
    for k in _ALGO_TYPES:
        value = cfg.alpha_rule if k == "alpha" else getattr(cfg.algo, k)
        lines.append(f"{k} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- building


def build_graph(cfg):
    g = cfg.graph
    if g.kind == "file":
        graph = Graph.load(Path(cfg.base_dir) / g.edgelist)
        if graph.n != cfg.instance.N:
            raise ValidationError("graph.edgelist", f"edge list has {graph.n} nodes, expected {cfg.instance.N}")
        return graph
    if g.kind == "path":
        return path_graph(g.n)
    if g.kind == "complete":
        return complete_graph(g.n)
    return build_er_graph(g.n, g.p, g.seed)


def build_network(cfg):
    """``(graph, mixing matrix)`` with ``tau = tau_factor * lambda_max(L)``."""
    graph = build_graph(cfg)
    L = laplacian(graph)
    lam_max = float(np.linalg.eigvalsh(L)[-1]) if graph.n > 1 else 0.0
    tau = cfg.tau_factor * lam_max if lam_max > 0 else 1.0
    return graph, mixing_from_laplacian(L, tau=tau, graph=graph)


def build_instance(cfg):
    return make_instance(cfg.instance)


def mean_node(problems):
    """Single node carrying ``(1/N) sum_n B_n``; same stationary points as the network."""
    N = len(problems)
    first = problems[0]

    def gx(x, y):
        return sum(np.asarray(p.grad_x(x, y), dtype=float) for p in problems) / N

    def gy(x, y):
        return sum(np.asarray(p.grad_y(x, y), dtype=float) for p in problems) / N

    affine = None
    if all(p.affine_form is not None for p in problems):
        affine = (
            sum(p.affine_form[0] for p in problems) / N,
            sum(p.affine_form[1] for p in problems) / N,
        )
    return LocalSaddle(
        first.dim_x,
        first.dim_y,
        gx,
        gy,
        rho=max(p.rho for p in problems),
        affine_form=affine,
        name="mean",
    )


def output_dir(cfg):
    out = Path(cfg.outputs)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not out.is_absolute():
        out = Path(root) / out
    return out


def _write_dat(path, rounds, values):
    path.write_text("".join(f"{t} {format(v, '.17g')}\n" for t, v in zip(rounds, values)))


def _mark_partial(paths):
    for p in paths:
        if p.exists():
            p.rename(p.with_name(p.name + ".partial"))


class Prepared:
    """Instance, network and resolved stepsize shared by every repeat."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.graph, self.W = build_network(cfg)
        self.instance = build_instance(cfg)
        self.problems = self.instance.problems
        self.sets = self.instance.sets
        self.rho = system_rho(self.problems)
        self.flags = regime_flags(cfg.algo.alpha, self.rho, self.W.lambda_min)
        if not self.flags["well_defined"]:
            raise ValidationError("algo.alpha", f"alpha * rho = {cfg.algo.alpha * self.rho} >= 1")

    def start(self, repeat):
        cfg = self.cfg
        if cfg.init == "zero":
            return initial_point(self.sets)
        return initial_point(self.sets, "random", seed=cfg.algo.seed + repeat, scale=cfg.init_scale)


def prepare(cfg):
    """Build everything a run needs; config-level problems raise DPPSPError subclasses."""
    return Prepared(cfg)


def run_experiment(cfg, label="run", prepared=None):
    """Run every repeat and write artifacts; returns ``(exit code, summary row)``.

    Files of a failed run keep a ``.partial`` suffix.
    """
    prep = prepared or prepare(cfg)
    out = output_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(emit_config(cfg))
    algo = cfg.algo
    report = {
        "label": label,
        "family": cfg.instance.family,
        "N": cfg.instance.N,
        "alpha": algo.alpha,
        "alpha_rule": cfg.alpha_rule,
        "T": algo.T,
        "form": algo.form,
        "rho": prep.rho,
        "lambda_min_W": prep.W.lambda_min,
        "lambda_max_W": prep.W.lambda_max,
        "edges": len(prep.graph.edges),
        "lemma2_cap": lemma2_cap(prep.rho, prep.W.lambda_min),
        "theorem1_cap": theorem1_cap(prep.rho),
    }
    report.update({f"regime.{k}": v for k, v in prep.flags.items()})
    if prep.rho == 0:
        report["note"] = "rho = 0: 1/(2 rho) is unbounded, any alpha is admissible"

    written, failed = [], False
    gaps, cons, finals, slopes = [], [], [], []
    for r in range(cfg.repeats):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", StepSizeWarning)
            trace = run(prep.problems, prep.W, prep.sets, algo, z0=prep.start(r))
        paths = [out / f"trace_r{r}.csv", out / f"gap_r{r}.dat", out / f"consensus_r{r}.dat"]
        trace.write_csv(paths[0])
        rounds = trace.column("round").astype(int)
        _write_dat(paths[1], rounds, trace.gaps())
        _write_dat(paths[2], rounds, trace.consensus())
        if algo.snapshot_every:
            paths.append(out / f"snapshots_r{r}.txt")
            paths[-1].write_text(trace.snapshots_text())
        written += paths
        report[f"repeat.{r}.rounds"] = len(trace)
        report[f"repeat.{r}.max_identity_residual"] = float(np.max(trace.column("identity_residual"), initial=0.0))
        if trace.partial:
            report[f"repeat.{r}.error"] = trace.error
            failed = True
            break
        gaps.append(float(np.mean(trace.gaps())))
        cons.append(float(np.mean(trace.consensus())))
        finals.append(float(trace.consensus()[-1]))
        try:
            slopes.append(rate_slope(trace))
        except DegenerateFit as exc:
            report[f"repeat.{r}.slope_floor_round"] = exc.floor_round
            slopes.append(float("nan"))
        report[f"repeat.{r}.mean_gap"] = gaps[-1]
        report[f"repeat.{r}.mean_consensus"] = cons[-1]
        report[f"repeat.{r}.final_consensus"] = finals[-1]
        report[f"repeat.{r}.slope"] = slopes[-1]

    if cfg.baseline and not failed:
        node = mean_node(prep.problems)
        single = MixingMatrix.from_weights(np.ones((1, 1)))
        base = run([node], single, [prep.sets[0]], algo, z0=prep.start(0)[:1])
        path = out / "baseline_trace.csv"
        base.write_csv(path)
        written.append(path)
        report["baseline.mean_gap"] = float(np.mean(base.gaps())) if len(base) else float("nan")
        if base.partial:
            report["baseline.error"] = base.error

    if not failed and prep.instance.z_star is not None:
        mvi = check_mvi(prep.problems, prep.sets, prep.instance.z_star)
        report["mvi.holds"] = mvi.holds
        report["mvi.worst"] = mvi.worst
    if not failed:
        report["lemma2_margin.sampled"] = lemma2_margin(prep.W, prep.problems, prep.sets, algo.alpha, samples=300, seed=algo.seed)
        report["lemma2_margin.target"] = prep.W.lambda_min / 4

    status = "failed" if failed else "ok"
    report["status"] = status
    diag = out / "diagnostics.txt"
    diag.write_text(format_report(report))
    written.append(diag)

    def agg(values):
        return float(np.mean(values)) if values else float("nan")

    row = (label, algo.alpha, algo.T, cfg.repeats, agg(gaps), agg(cons), agg(finals), agg(slopes), status)
    summary = out / "summary.csv"
    write_summary(summary, [row])
    written.append(summary)
    if failed:
        _mark_partial(written)
        return EXIT_SOLVER, row
    return EXIT_OK, row


def write_summary(path, rows):
    lines = [",".join(SUMMARY_COLUMNS)]
    for row in rows:
        lines.append(",".join(format(v, ".17g") if isinstance(v, float) else str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def sweep(cfg, alpha_rules):
    """One run per stepsize rule, each in ``alpha_<k>/``; returns ``(exit code, rows)``.

    The combined ``summary.csv`` holds one row per rule.
    """
    base_prep = prepare(cfg)
    resolved = [with_alpha(cfg, rule, base_prep.rho, base_prep.W.lambda_min) for rule in alpha_rules]
    # absolute, so the output-root override is not applied twice
    out = output_dir(cfg).resolve()
    rows, code = [], EXIT_OK
    for k, sub in enumerate(resolved):
        sub = dataclasses.replace(sub, outputs=str(out / f"alpha_{k}"))
        status, row = run_experiment(sub, label=sub.alpha_rule, prepared=prepare(sub))
        rows.append(row)
        code = max(code, status)
    write_summary(out / "summary.csv", rows)
    return code, rows


def doubling_schedule(t_min, t_max):
    out = []
    t = t_min
    while t <= t_max:
        out.append(t)
        t *= 2
    return out


def compare_bounds(cfg, prepared=None, reference_method=None):
    """Measured exact averages against both bounds over a doubling schedule of ``T``.

    Returns ``(rows, violations)`` with rows ``(quantity, measured, bound, regime_ok)``.
    Minty-based rows appear only when the Minty check passes. A violation is a
    row whose measured value exceeds its bound, or whose stepsize lies outside
    the bound's regime.
    """
    prep = prepared or prepare(cfg)
    algo = cfg.algo
    problems, sets, W = prep.problems, prep.sets, prep.W
    if prep.instance.z_star is not None and reference_method is None:
        z_star = prep.instance.z_star
    else:
        method = reference_method or (
            "closed-form" if all(p.affine_form is not None for p in problems) else "centralized-extragradient"
        )
        z_star, _ = reference_solution(problems, sets, method)
    mvi = check_mvi(problems, sets, z_star)
    t1_ok = bool(prep.flags["theorem1"])
    t2_ok = bool(mvi.holds and (prep.flags["theorem2"] if prep.rho > 0 else prep.flags["lemma2"]))
    schedule = doubling_schedule(cfg.bounds_t_min, algo.T)
    long_cfg = dataclasses.replace(algo, T=algo.T + 1)
    D = max(s.diameter for s in sets)
    N = W.n

    rows = []
    for r in range(cfg.repeats):
        z0 = prep.start(r)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", StepSizeWarning)
            trace = run(problems, W, sets, long_cfg, z0=z0)
        if trace.partial:
            raise DPPSPError(trace.error)
        b = bound_inputs(W, problems, sets, algo.alpha, trace_start(prep, z0), z_star)
        gaps = trace.gaps()
        cons = trace.consensus()
        cons_from0 = np.concatenate([[trace.initial_consensus], cons])
        floor_gap, floor_cons = theorem1_floor(b)
        for T in schedule:
            g = float(np.mean(gaps[:T]))
            # the two index readings of the consensus average; the larger is reported
            c1 = max(float(np.mean(cons[:T])), float(np.mean(cons[1 : T + 1])))
            c2 = float(np.mean(cons_from0[:T]))
            bg, bc = theorem1_rhs(b, T, check=False)
            b2g, b2c = theorem2_rhs(N, D, algo.alpha, T)
            tag = f"r{r}.T{T}"
            rows += [(f"theorem1.gap.{tag}", g, bg, t1_ok), (f"theorem1.consensus.{tag}", c1, bc, t1_ok)]
            if mvi.holds:
                rows += [(f"theorem2.gap.{tag}", g, b2g, t2_ok), (f"theorem2.consensus.{tag}", c2, b2c, t2_ok)]
        if prep.rho > 0:
            T = schedule[-1]
            rows += [
                (f"theorem1.gap_floor.r{r}", float(np.mean(gaps[T // 2 : T])), floor_gap, t1_ok),
                (f"theorem1.consensus_floor.r{r}", float(np.mean(cons[T // 2 : T])), floor_cons, t1_ok),
            ]
    violations = [row for row in rows if not row[3] or row[1] > row[2]]
    return rows, violations


def trace_start(prep, z0):
    return np.stack([s.project(z) for s, z in zip(prep.sets, z0)])


def write_bounds(path, rows):
    lines = [",".join(BOUND_COLUMNS)]
    for q, m, b, ok in rows:
        lines.append(f"{q},{format(m, '.17g')},{format(b, '.17g')},{'true' if ok else 'false'}")
    Path(path).write_text("\n".join(lines) + "\n")


def validate(cfg):
    """Config plus mixing-matrix checks; returns a ``key = value`` report."""
    graph, W = build_network(cfg)
    return format_report(
        {
            "nodes": graph.n,
            "edges": len(graph.edges),
            "lambda_min_W": W.lambda_min,
            "lambda_max_W": W.lambda_max,
            "fiedler_gap": W.fiedler_gap,
            "alpha": cfg.algo.alpha,
            "alpha_rule": cfg.alpha_rule,
            "status": "ok",
        }
    )
