"""Batch experiment harness.

Scenarios are described by a single JSON config file; command-line
flags only select the config path, output directory and verbosity, so a
config (including its seed) fully determines every artifact.  Each run
writes one CSV of raw measurements plus a ``report.json`` listing every
check as (name, measured, bound, passed); the exit status is 0 iff all
tolerances were met, 1 on a tolerance failure (report still written),
2 on an invalid config.

Floats are written with shortest round-trip representation and random
data comes from a counter-based Philox stream, so identical configs
produce byte-identical CSVs on one platform.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import sampling
from .algebra import AlgebraElement, BlockShape, HermitianElement, herm_calculus
from .continuation import (
    SmearingPlan,
    continue_exact,
    core_rescale,
    min_nodes,
    smear_oracle,
    smear_quadrature,
    three_lines_check,
)
from .composition import CommutingPair, gamma_continuation_check, tensor_continuation_check, tensor_flow
from .errors import ConfigInvalidError
from .flows import FlowGenerator, evaluate, left_companion, right_companion
from .hilbmod import (
    ModuleOperator,
    SubalgebraBasis,
    identity_operator,
    inner,
    matrix_unit_operators,
    op_log,
    op_power,
)
from .implemented import (
    ImplementedFlow,
    implemented_continuation_check,
    localized_middle_check,
)
from .serialize import element_from_payload
from .stone import (
    SampledUnitaryGroup,
    hermitian_matrix_power,
    induce,
    localize,
    recovery_report,
    separating_check,
    stone,
)

EXPERIMENTS = ("verify", "converge", "stone", "tensor", "implemented")

CSV_COLUMNS = {
    "verify": ("check", "instance", "measured", "bound", "passed"),
    "converge": ("r", "nodes", "err_quad_vs_oracle", "err_smear_vs_x", "bound_rhs"),
    "stone": ("t", "residual"),
    "tensor": ("kind", "instance", "z_re", "z_im", "residual"),
    "implemented": ("check", "z_re", "z_im", "residual"),
}


@dataclass
class Check:
    name: str
    measured: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.measured <= self.bound

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "measured": self.measured,
            "bound": self.bound,
            "passed": self.passed,
        }


@dataclass
class ExitReport:
    experiment: str
    seed: int
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
        }


@dataclass
class ScenarioConfig:
    experiment: str
    seed: int
    shape: BlockShape
    flow_kind: str
    flow_norm: float
    h_left: AlgebraElement | None
    h_right: AlgebraElement | None
    element: AlgebraElement | None
    r_list: list[float]
    z_re: list[float]
    z_im: list[float]
    nodes: int | None
    t0: float
    instances: int
    module_rank: int
    output: str

    def flow(self, r: np.random.Generator) -> FlowGenerator:
        if self.flow_kind == "explicit":
            right = self.h_right if self.h_right is not None else self.h_left
            return FlowGenerator(HermitianElement(self.h_left), HermitianElement(right))
        return sampling.random_flow(r, self.shape, self.flow_norm)

    def z_grid(self) -> list[complex]:
        return [complex(re, im) for re in self.z_re for im in self.z_im]


_DEFAULTS = {
    "flow": {"kind": "random", "norm": 2.0},
    "grid": {
        "r": [0.5, 1.0, 2.0, 4.0],
        "z_re": [-1.0, 0.0, 1.0],
        "z_im": [-0.5, 0.0, 0.5],
        "nodes": None,
        "t0": 1.0,
    },
    "instances": 25,
    "module_rank": 1,
    "output": "out",
}


def validate(raw: dict) -> tuple[ScenarioConfig | None, list[str]]:
    """Check a raw config dict; never executes numerics."""
    problems: list[str] = []
    if not isinstance(raw, dict):
        return None, ["config must be a JSON object"]
    for required in ("experiment", "seed", "shape"):
        if required not in raw:
            problems.append(f"missing field: {required}")
    experiment = raw.get("experiment")
    if experiment is not None and experiment not in EXPERIMENTS:
        problems.append(
            f"unknown experiment {experiment!r}; choose one of {', '.join(EXPERIMENTS)}"
        )
    seed = raw.get("seed")
    if seed is not None and not isinstance(seed, int):
        problems.append("seed must be an integer")
    shape = None
    raw_shape = raw.get("shape")
    if raw_shape is not None:
        try:
            shape = BlockShape(raw_shape)
        except (TypeError, ValueError) as exc:
            problems.append(f"bad shape: {exc}")
    flow = {**_DEFAULTS["flow"], **raw.get("flow", {})}
    h_left = h_right = None
    if flow.get("kind") == "explicit":
        if "h_left" not in flow:
            problems.append("explicit flow needs an h_left payload")
        else:
            try:
                h_left = element_from_payload(flow["h_left"])
                if "h_right" in flow:
                    h_right = element_from_payload(flow["h_right"])
            except (KeyError, TypeError, ValueError) as exc:
                problems.append(f"bad flow payload: {exc}")
        for name, h in (("h_left", h_left), ("h_right", h_right)):
            if h is None:
                continue
            if shape is not None and h.shape != shape:
                problems.append(f"{name} payload does not conform to the declared shape")
            elif not h.is_hermitian():
                problems.append(f"{name} payload is not Hermitian within tolerance")
    elif flow.get("kind") != "random":
        problems.append(f"unknown flow kind {flow.get('kind')!r}")
    norm = flow.get("norm", 2.0)
    if not isinstance(norm, (int, float)) or norm <= 0:
        problems.append("flow norm must be a positive number")
    element = None
    if "element" in raw:
        try:
            element = element_from_payload(raw["element"])
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"bad element payload: {exc}")
        if shape is not None and element is not None and element.shape != shape:
            problems.append("element payload does not conform to the declared shape")
    grid = {**_DEFAULTS["grid"], **raw.get("grid", {})}
    for key in ("r", "z_re", "z_im"):
        vals = grid.get(key)
        if not isinstance(vals, list) or not vals or not all(
            isinstance(v, (int, float)) for v in vals
        ):
            problems.append(f"grid.{key} must be a nonempty list of numbers")
    if grid.get("r") and isinstance(grid["r"], list) and any(
        isinstance(v, (int, float)) and v <= 0 for v in grid["r"]
    ):
        problems.append("grid.r entries must be positive")
    nodes = grid.get("nodes")
    if nodes is not None and (not isinstance(nodes, int) or nodes < 1):
        problems.append("grid.nodes must be a positive integer or null")
    t0 = grid.get("t0", 1.0)
    if not isinstance(t0, (int, float)) or t0 <= 0:
        problems.append("grid.t0 must be positive")
    instances = raw.get("instances", _DEFAULTS["instances"])
    if not isinstance(instances, int) or instances < 1:
        problems.append("instances must be a positive integer")
    module_rank = raw.get("module_rank", _DEFAULTS["module_rank"])
    if not isinstance(module_rank, int) or module_rank < 1:
        problems.append("module_rank must be a positive integer")
    if (
        experiment == "stone"
        and flow.get("kind") == "explicit"
        and isinstance(module_rank, int)
        and module_rank != 1
    ):
        problems.append("stone with an explicit flow requires module_rank = 1")
    output = raw.get("output", _DEFAULTS["output"])
    if not isinstance(output, str):
        problems.append("output must be a string path")
    if problems:
        return None, problems
    return (
        ScenarioConfig(
            experiment=experiment,
            seed=seed,
            shape=shape,
            flow_kind=flow["kind"],
            flow_norm=float(norm),
            h_left=h_left,
            h_right=h_right,
            element=element,
            r_list=[float(v) for v in grid["r"]],
            z_re=[float(v) for v in grid["z_re"]],
            z_im=[float(v) for v in grid["z_im"]],
            nodes=nodes,
            t0=float(t0),
            instances=instances,
            module_rank=module_rank,
            output=output,
        ),
        [],
    )


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalidError([f"cannot read config: {exc}"]) from exc
    config, problems = validate(raw)
    if problems:
        raise ConfigInvalidError(problems)
    return config


def resolved_defaults(raw: dict) -> dict:
    """Echo of the config with all defaults filled in."""
    out = {
        "experiment": raw.get("experiment"),
        "seed": raw.get("seed"),
        "shape": raw.get("shape"),
        "flow": {**_DEFAULTS["flow"], **raw.get("flow", {})},
        "grid": {**_DEFAULTS["grid"], **raw.get("grid", {})},
        "instances": raw.get("instances", _DEFAULTS["instances"]),
        "module_rank": raw.get("module_rank", _DEFAULTS["module_rank"]),
        "output": raw.get("output", _DEFAULTS["output"]),
    }
    return out


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, columns: tuple[str, ...], rows: list[tuple]) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _sample_elements(r: np.random.Generator, shape: BlockShape, count: int) -> list[AlgebraElement]:
    return [sampling.random_element(r, shape, 1.0) for _ in range(count)]


# ----------------------------------------------------------------- experiments


def _exp_verify(cfg: ScenarioConfig) -> tuple[list[Check], list[tuple]]:
    r = sampling.rng(cfg.seed)
    grid = cfg.z_grid()
    rows: list[tuple] = []
    worst: dict[str, float] = {}

    def record(name: str, instance: int, measured: float, bound: float):
        rows.append((name, instance, measured, bound, measured <= bound))
        worst[name] = max(worst.get(name, 0.0), measured)

    for i in range(cfg.instances):
        g = cfg.flow(r)
        x, a, b = _sample_elements(r, cfg.shape, 3)
        s, t = (float(v) for v in r.uniform(-2.0, 2.0, size=2))
        z = grid[i % len(grid)]
        y = complex(float(r.uniform(-1.0, 1.0)), float(r.uniform(0.0, 1.0)) * z.imag)

        resid = (evaluate(g, s, evaluate(g, t, x)) - evaluate(g, s + t, x)).norm()
        record("group_law", i, resid / x.norm(), 1e-9)

        resid = (continue_exact(g, -z, continue_exact(g, z, x)) - x).norm()
        record("inverse", i, resid / x.norm(), 1e-9)

        comp = continue_exact(g, y, continue_exact(g, z, x))
        direct = continue_exact(g, y + z, x)
        scale = max(direct.norm(), x.norm())
        record("composition_same_side", i, (comp - direct).norm() / scale, 1e-9)

        gl, gr = left_companion(g), right_companion(g)
        lhs = evaluate(gl, t, b) @ evaluate(g, t, a)
        record("semi_mult_left", i, (lhs - evaluate(g, t, b @ a)).norm() / (a.norm() * b.norm()), 1e-9)
        rhs = evaluate(g, t, a) @ evaluate(gr, t, b)
        record("semi_mult_right", i, (rhs - evaluate(g, t, a @ b)).norm() / (a.norm() * b.norm()), 1e-9)

        viol = three_lines_check(g, x, z, 25)
        scale = max(x.norm(), continue_exact(g, z, x).norm())
        record("three_lines", i, viol / scale, 1e-9)

    checks = [Check(name, measured, 1e-9) for name, measured in sorted(worst.items())]
    return checks, rows


def _exp_converge(cfg: ScenarioConfig) -> tuple[list[Check], list[tuple]]:
    r = sampling.rng(cfg.seed)
    g = cfg.flow(r)
    x = cfg.element if cfg.element is not None else sampling.random_element(r, cfg.shape, 1.0)
    z = complex(cfg.z_re[0], cfg.z_im[0])
    rows: list[tuple] = []
    quad_worst = norm_worst = 0.0
    errs: dict[float, float] = {}
    for rr in cfg.r_list:
        nodes = max(min_nodes(g, rr, z), cfg.nodes or 0)
        plan = SmearingPlan(rr, z, nodes)
        quad = smear_quadrature(g, x, plan)
        oracle = smear_oracle(g, x, rr, z)
        err_quad = (quad - oracle).norm()
        err_smear = (smear_oracle(g, x, rr, 0.0) - x).norm()
        errs[rr] = err_smear
        envelope = x.norm() * math.exp(rr * rr * z.imag * z.imag)
        bound_rhs = envelope * (1.0 + 1e-8)
        rows.append((rr, nodes, err_quad, err_smear, bound_rhs))
        quad_worst = max(quad_worst, err_quad / envelope)
        norm_worst = max(norm_worst, quad.norm() / bound_rhs)
    checks = [
        Check("quad_vs_oracle", quad_worst, 1e-8),
        Check("norm_bound", norm_worst, 1.0),
    ]
    ratio_excess = 0.0
    for rr in cfg.r_list:
        if 2 * rr in errs and errs[rr] <= 1e-2 * x.norm():
            ratio = errs[2 * rr] / errs[rr]
            ratio_excess = max(ratio_excess, 0.2 - ratio, ratio - 0.3)
    checks.append(Check("convergence_ratio", max(ratio_excess, 0.0), 0.0))

    ax = continue_exact(g, z, x)
    approx = []
    rr = min(cfg.r_list)
    for _ in range(16):
        y = smear_oracle(g, x, rr, 0.0)
        approx.append((y, continue_exact(g, z, y)))
        rr *= 2.0
    rescaled = core_rescale(x, ax, approx)
    cap_x = max((y.norm() - x.norm()) / x.norm() for y in rescaled)
    cap_ax = max(
        (continue_exact(g, z, y).norm() - ax.norm()) / ax.norm() for y in rescaled
    )
    checks.append(Check("core_rescale_cap_x", max(cap_x, 0.0), 1e-12))
    checks.append(Check("core_rescale_cap_continuation", max(cap_ax, 0.0), 1e-12))
    checks.append(Check("core_rescale_convergence", (rescaled[-1] - x).norm(), 1e-6))
    return checks, rows


def _exp_stone(cfg: ScenarioConfig) -> tuple[list[Check], list[tuple], dict]:
    r = sampling.rng(cfg.seed)
    k = cfg.module_rank
    if cfg.flow_kind == "explicit":
        t_alg = herm_calculus(HermitianElement(cfg.h_left), np.exp)
        t_op = ModuleOperator([[t_alg]])
    else:
        t_op = sampling.random_positive_operator(r, cfg.shape, k, cond=1e3)
    u = SampledUnitaryGroup.from_positive(t_op)
    report = recovery_report(u, cfg.t0)
    t_rec = stone(u, cfg.t0)
    rows = [(t, err) for t, err in report["residual_grid"]]
    checks = [
        Check("recovery_error", (t_rec - t_op).norm() / t_op.norm(), 1e-8),
        Check("residual_grid", max(err for _, err in rows), 1e-8),
    ]
    log_norm = op_log(t_op).norm()
    cont_worst = 0.0
    for z in cfg.z_grid():
        err = (op_power(t_op, 1j * z) - op_power(t_rec, 1j * z)).norm()
        cont_worst = max(cont_worst, err / math.exp(abs(z.imag) * log_norm))
    checks.append(Check("continuation", cont_worst, 1e-8))

    omega = sampling.random_state(r, cfg.shape)
    loc = localize(omega, cfg.shape, k)
    gram_worst = 0.0
    for _ in range(10):
        v = sampling.random_vector(r, cfg.shape, k)
        w = sampling.random_vector(r, cfg.shape, k)
        lhs = complex(np.vdot(loc.apply(w), loc.apply(v)))
        rhs = omega.value(inner(v, w))
        gram_worst = max(gram_worst, abs(lhs - rhs) / max(1.0, v.norm() * w.norm()))
    checks.append(Check("gram_identity", gram_worst, 1e-10))

    t_om = induce(loc, t_op)
    power_worst = 0.0
    for z in (0.5, 1j, 1 + 1j):
        lhs = induce(loc, op_power(t_op, z))
        rhs = hermitian_matrix_power(t_om, z)
        power_worst = max(power_worst, float(np.linalg.norm(lhs - rhs, 2)))
    checks.append(Check("induced_power", power_worst, 1e-8))

    perturbed = t_op + 1e-3 * identity_operator(cfg.shape, k)
    detected = not separating_check(t_op, perturbed, [omega])
    checks.append(Check("separating_detects", 0.0 if detected else 1.0, 0.0))
    return checks, rows, report


def _exp_tensor(cfg: ScenarioConfig) -> tuple[list[Check], list[tuple]]:
    r = sampling.rng(cfg.seed)
    rows: list[tuple] = []
    comm_worst = tens_worst = 0.0
    grid = cfg.z_grid()
    for i in range(cfg.instances):
        alpha, beta = sampling.random_commuting_flows(r, cfg.shape, cfg.flow_norm)
        pair = CommutingPair(alpha, beta)
        x = sampling.random_element(r, cfg.shape, 1.0)
        for z in grid:
            resid = gamma_continuation_check(pair, z, x)
            rows.append(("commuting", i, z.real, z.imag, resid))
            comm_worst = max(comm_worst, resid)
        tf = tensor_flow(sampling.random_flow(r, cfg.shape, cfg.flow_norm),
                         sampling.random_flow(r, cfg.shape, cfg.flow_norm))
        y = sampling.random_element(r, cfg.shape, 1.0)
        for z in grid:
            resid = tensor_continuation_check(tf, z, x, y)
            rows.append(("tensor", i, z.real, z.imag, resid))
            tens_worst = max(tens_worst, resid)
    checks = [
        Check("commuting_continuation", comm_worst, 1e-8),
        Check("tensor_continuation", tens_worst, 1e-8),
    ]
    return checks, rows


def _exp_implemented(cfg: ScenarioConfig) -> tuple[list[Check], list[tuple]]:
    r = sampling.rng(cfg.seed)
    k = cfg.module_rank
    s_op = sampling.random_positive_operator(r, cfg.shape, k, cond=1e3)
    t_op = sampling.random_positive_operator(r, cfg.shape, k, cond=1e3)
    basis = SubalgebraBasis(matrix_unit_operators(cfg.shape, k))
    flow = ImplementedFlow(s_op, t_op, basis)
    x = sampling.random_operator(r, cfg.shape, k, 1.0)
    omega = sampling.random_state(r, cfg.shape)
    loc = localize(omega, cfg.shape, k)
    rows: list[tuple] = []
    cont_worst = mid_worst = 0.0
    for z in cfg.z_grid():
        resid = implemented_continuation_check(flow, z, x)
        rows.append(("continuation_formula", z.real, z.imag, resid))
        cont_worst = max(cont_worst, resid / max(1.0, x.norm()))
    resid = localized_middle_check(loc, s_op, x, t_op)
    rows.append(("localized_middle", 0.0, 0.0, resid))
    mid_worst = resid / max(1.0, s_op.norm() * x.norm() * t_op.norm())
    checks = [
        Check("continuation_formula", cont_worst, 1e-8),
        Check("localized_middle", mid_worst, 1e-9),
    ]
    return checks, rows


def run(config: ScenarioConfig, out_dir: str | Path | None = None, quiet: bool = False) -> ExitReport:
    """Execute a scenario; writes artifacts and returns the report."""
    out = Path(out_dir) if out_dir is not None else Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    report = ExitReport(config.experiment, config.seed)
    extra_json = None
    if config.experiment == "verify":
        checks, rows = _exp_verify(config)
    elif config.experiment == "converge":
        checks, rows = _exp_converge(config)
    elif config.experiment == "stone":
        checks, rows, extra_json = _exp_stone(config)
    elif config.experiment == "tensor":
        checks, rows = _exp_tensor(config)
    elif config.experiment == "implemented":
        checks, rows = _exp_implemented(config)
    else:  # pragma: no cover - validate() rejects unknown names
        raise ConfigInvalidError([f"unknown experiment {config.experiment!r}"])
    report.checks.extend(checks)
    _write_csv(out / f"{config.experiment}.csv", CSV_COLUMNS[config.experiment], rows)
    (out / "report.json").write_text(json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n")
    if extra_json is not None:
        (out / "recovery.json").write_text(json.dumps(extra_json, indent=2, sort_keys=True) + "\n")
    if not quiet:
        for c in report.checks:
            status = "pass" if c.passed else "FAIL"
            print(f"[{status}] {c.name}: measured {c.measured:.3e} bound {c.bound:.3e}")
        print(f"{config.experiment}: {'all checks passed' if report.passed else 'TOLERANCE EXCEEDED'}")
    return report


def list_experiments() -> str:
    lines = ["available experiments:"]
    descriptions = {
        "verify": "group laws, inverses, same-side composition, semi-multiplicativity, strip bound",
        "converge": "smearing quadrature vs closed form, norm bound, convergence rate, core rescaling",
        "stone": "generator recovery round trip, continuation, localization and separation",
        "tensor": "commuting-pair product continuation and tensor-product continuation",
        "implemented": "implemented-flow continuation formula and localized middle products",
    }
    for name in EXPERIMENTS:
        lines.append(f"  {name:<12} {descriptions[name]}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="cstarflow", description="Flow experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a scenario config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output directory (default: config output field)")
    p_run.add_argument("--quiet", action="store_true")
    p_val = sub.add_parser("validate", help="check a config without running")
    p_val.add_argument("config")
    sub.add_parser("list", help="list available experiments")
    args = parser.parse_args(argv)

    if args.command == "list":
        print(list_experiments())
        return 0

    if args.command == "validate":
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"CONFIG_INVALID: cannot read config: {exc}", file=sys.stderr)
            return 2
        _, problems = validate(raw)
        if problems:
            for p in problems:
                print(f"CONFIG_INVALID: {p}", file=sys.stderr)
            return 2
        print("ok")
        print(json.dumps(resolved_defaults(raw), indent=2, sort_keys=True))
        return 0

    try:
        config = load_config(args.config)
    except ConfigInvalidError as exc:
        for p in exc.problems:
            print(f"CONFIG_INVALID: {p}", file=sys.stderr)
        return 2
    report = run(config, args.out, args.quiet)
    return 0 if report.passed else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
