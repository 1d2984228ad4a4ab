"""Batch front-end: ``tlrefl --config job.json``.

Reads a JSON job (schema in ``job.schema.json``), runs the requested checks
and writes a JSON report.  Exit status is 0 when every check passes, 1 when
some check fails and 2 for invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .errors import ConfigInvalidError, RankUnstableError, TLReflError
from .kfactory import (DClass, Involution, KBlockPlan, Nilpotent, TwoEigen, Zero, assemble_K,
                       block_equation_residual, numeric_moduli_check, sample_subblock)
from .model import ModelSpec, build_tl_data, tl_check, validate_model
from .numerics import Tolerance
from .reflection import (algebraic_residuals, build_braid_R, component_residuals,
                         reflection_residual, yang_baxter_residual, ybe_residual)

TASK_ORDER = ("validate", "tl", "ybe", "sample", "reflect", "components", "moduli")
TIMING_KEY = "wall_time_s"


def load_schema() -> dict:
    return json.loads(resources.files("tlrefl").joinpath("job.schema.json").read_text())


def fmt(x: float) -> str:
    """Residuals travel as 17-significant-digit decimal strings."""
    return f"{float(x):.16e}"


def _c(pair) -> complex:
    return complex(pair[0], pair[1])


def _pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _matrix(a) -> list[list[list[float]]]:
    return [[_pair(z) for z in row] for row in np.asarray(a)]


def parse_model(cfg: dict) -> ModelSpec:
    n = cfg["n"]
    vw = None
    if "vw" in cfg:
        vw = (np.array([_c(p) for p in cfg["vw"]["v"]]), np.array([_c(p) for p in cfg["vw"]["w"]]))
    h = None
    if "h" in cfg:
        flat = [_c(p) for p in cfg["h"]]
        if len(flat) != n * n:
            raise ConfigInvalidError(f"h needs {n * n} entries, got {len(flat)}")
        h = np.array(flat).reshape(n, n)
    return ModelSpec(n, np.array([_c(p) for p in cfg["lambdas"]]), tuple(cfg["exponents"]),
                     cfg.get("branch", "plus"), vw, h)


def parse_subblock(cfg: dict):
    kind = cfg["kind"]
    generic = cfg.get("generic", False)
    if kind == "Zero":
        return Zero(cfg["size"])
    if kind == "Nilpotent":
        return Nilpotent(cfg["t"], cfg["m"], generic)
    if kind == "Involution":
        return Involution(cfg["s"], _c(cfg.get("delta_prime", [1.0, 0.0])), generic)
    return TwoEigen(cfg["s"], cfg["m_prime"], generic)


def parse_plan(cfg: dict) -> KBlockPlan:
    classes = []
    for cls in cfg["classes"]:
        d = _c(cls["d"]) if "d" in cls else None
        classes.append(DClass(d, tuple(parse_subblock(s) for s in cls["subblocks"])))
    return KBlockPlan(tuple(classes))


def parse_config(config: dict):
    """Validate a job dict; returns ``(spec, plan, seeds, tol, tasks)``."""
    try:
        jsonschema.validate(config, load_schema())
    except jsonschema.ValidationError as exc:
        raise ConfigInvalidError(f"schema: {exc.message}") from None
    try:
        spec = parse_model(config["model"])
        plan = parse_plan(config["plan"]) if "plan" in config else None
        tol = Tolerance(**config.get("tolerances", {}))
    except TLReflError as exc:
        raise ConfigInvalidError(str(exc)) from None
    tasks = config.get("tasks", list(TASK_ORDER))
    if plan is not None and plan.size != spec.n:
        raise ConfigInvalidError(f"plan covers {plan.size} indices, model has n={spec.n}")
    if plan is None and set(tasks) & {"sample", "reflect", "components", "moduli"}:
        raise ConfigInvalidError("tasks need a plan")
    seeds = config.get("seeds", [0])
    return spec, plan, seeds, tol, [t for t in TASK_ORDER if t in tasks]


def _moduli_for_seed(plan: KBlockPlan, seed: int, tol: Tolerance) -> list[dict]:
    out = []
    idx = 0
    for ci, cls in enumerate(plan.classes):
        for bi, sub in enumerate(cls.subblocks):
            idx += 1
            if sub.kind == "Zero":
                continue
            template = sub if sub.kind == "TwoEigen" else replace(sub, generic=True)
            entry = {"seed": seed, "class": ci, "subblock": bi, "label": sub.label()}
            for attempt in range(5):
                try:
                    sampled = sample_subblock(template, np.random.SeedSequence([seed, idx, attempt]), tol)
                    check = numeric_moduli_check(sampled, tol)
                    break
                except RankUnstableError:
                    continue
                except TLReflError as exc:
                    check = {"passes": False, "error": f"{type(exc).__name__}: {exc}"}
                    break
            else:
                check = {"passes": False, "error": "RankUnstable after 5 resamples"}
            check = dict(check)
            if "constraint_residual" in check:
                check["constraint_residual"] = fmt(check["constraint_residual"])
            entry.update(check)
            out.append(entry)
    return out


def _seed_work(data, plan, seed, tasks, tol):
    """Everything that depends on one seed; returns ``{task: entry}``."""
    out = {}
    needs_k = {"sample", "reflect", "components"} & set(tasks)
    if needs_k:
        t0 = time.perf_counter()
        try:
            k = assemble_K(plan, data, seed, tol=tol)
        except TLReflError as exc:
            err = f"{type(exc).__name__}: {exc}"
            for task in sorted(needs_k):
                out[task] = {"seed": seed, "passes": False, "error": err}
        else:
            elapsed = time.perf_counter() - t0
            if "sample" in tasks:
                blocks = [{"label": s.label(), "equation_residual": fmt(block_equation_residual(s))}
                          for c in k.plan.classes for s in c.subblocks]
                ok = all(float(b["equation_residual"]) <= tol.eps_rel for b in blocks)
                out["sample"] = {"seed": seed, "passes": ok, "blocks": blocks,
                                 "k_master": _matrix(k.k_master), "k_original": _matrix(k.k_original),
                                 TIMING_KEY: elapsed}
            if "reflect" in tasks:
                t0 = time.perf_counter()
                res = reflection_residual(build_braid_R(data), k.k_original)
                alg = algebraic_residuals(data, k.k_original)
                out["reflect"] = {"seed": seed, "residual": fmt(res),
                                  "algebraic_residuals": [fmt(x) for x in alg],
                                  "passes": bool(res <= tol.eps_rel and max(alg) <= tol.eps_rel),
                                  TIMING_KEY: time.perf_counter() - t0}
            if "components" in tasks:
                comp = component_residuals(data, k.k_master)
                worst = max(comp) if comp else 0.0
                out["components"] = {"seed": seed, "max_residual": fmt(worst), "count": len(comp),
                                     "passes": bool(worst <= tol.eps_rel)}
    if "moduli" in tasks:
        t0 = time.perf_counter()
        entries = _moduli_for_seed(plan, seed, tol)
        out["moduli"] = {"seed": seed, "checks": entries, "passes": all(e["passes"] for e in entries),
                         TIMING_KEY: time.perf_counter() - t0}
    return out


def run(config: dict, seeds: list[int] | None = None, eps_rel: float | None = None,
        parallel: int = 1) -> dict:
    """Execute a job and return the report dict (raises ConfigInvalidError)."""
    spec, plan, cfg_seeds, tol, tasks = parse_config(config)
    if seeds is not None:
        cfg_seeds = list(seeds)
    if eps_rel is not None:
        tol = tol.with_(eps_rel=eps_rel)
    report: dict = {"tool": {"name": "tlrefl", "version": __version__}, "tasks": {}}
    entries = report["tasks"]

    if "validate" in tasks:
        t0 = time.perf_counter()
        try:
            v = validate_model(spec, tol)
            entries["validate"] = {"passes": bool(v.passes), "property": v.property, "residual": fmt(v.residual),
                                   "matrix_residual": fmt(v.matrix_residual),
                                   "sum_rule_residual": fmt(v.sum_rule_residual)}
        except TLReflError as exc:
            entries["validate"] = {"passes": False, "error": f"{type(exc).__name__}: {exc}"}
        entries["validate"][TIMING_KEY] = time.perf_counter() - t0

    try:
        data = build_tl_data(spec, tol)
    except TLReflError as exc:
        data = None
        build_error = f"{type(exc).__name__}: {exc}"

    report["conventions"] = {
        "tensor_order": "row-major; site 1 is the leftmost Kronecker factor",
        "qprime_equation": "q'^2 + sqrt(n) q' + 1 = 0, i.e. X^2 = -(q' + 1/q') X = sqrt(n) X",
        "branch": spec.branch,
        "qprime": _pair(data.qprime) if data is not None else None,
        "q": _pair(data.q) if data is not None else None,
        "generator": "T = sum_ab c_ab e_ab (x) M^(n_a - n_b), X = T / sqrt(n), M = P Lambda P^-1",
        "r_matrix": "R = Perm (q c I + T); braid and reflection checks use Rb = q c I + T, c = tr(WV)/n",
        "mu_normalization": "mu_(r)[k,i] = V_k W_i lambda_r^(n_k - n_i); S^-1 mu_(r) S = tr(WV) e_rr, S = (Omega_V)^t",
        "class_scaling": "nonzero-d block = ((n + 2q) d / q) W with W^2 + W scalar; default d = q/(n + 2q)",
        "dimension_counting": "moduli reported as complex dimensions (real dimension / 2)",
    }
    report["tolerances"] = {k: getattr(tol, k) for k in ("eps_rel", "eps_rank", "eps_newton", "fd_step")}
    report["seeds"] = list(cfg_seeds)

    def fail_all(names):
        for name in names:
            entries[name] = {"passes": False, "error": build_error}

    if data is None:
        fail_all([t for t in tasks if t != "validate"])
    else:
        if "tl" in tasks:
            t0 = time.perf_counter()
            res = tl_check(data, tol, four_sites=config.get("four_sites", False))
            entries["tl"] = {k: (v if k == "passes" else fmt(v)) for k, v in res.items()}
            entries["tl"][TIMING_KEY] = time.perf_counter() - t0
        if "ybe" in tasks:
            t0 = time.perf_counter()
            braid = ybe_residual(data, tol)
            entries["ybe"] = {"braid_residual": fmt(braid), "yang_baxter_residual": fmt(yang_baxter_residual(data)),
                              "passes": bool(braid <= tol.eps_rel), TIMING_KEY: time.perf_counter() - t0}
        per_seed = [t for t in tasks if t in ("sample", "reflect", "components", "moduli")]
        if per_seed:
            work = lambda s: (s, _seed_work(data, plan, s, per_seed, tol))
            if parallel > 1 and len(cfg_seeds) > 1:
                with ThreadPoolExecutor(max_workers=parallel) as pool:
                    results = list(pool.map(work, cfg_seeds))
            else:
                results = [work(s) for s in cfg_seeds]
            results.sort(key=lambda item: item[0])
            for name in per_seed:
                entries[name] = [res[name] for _, res in results]

    def passed(entry):
        if isinstance(entry, list):
            return all(e["passes"] for e in entry)
        return entry["passes"]

    report["passed"] = all(passed(entries[t]) for t in tasks)
    return report


def strip_timing(obj):
    """Copy of a report without wall-time fields, for reproducibility comparisons."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != TIMING_KEY}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def summary(report: dict) -> str:
    lines = [f"tlrefl {report['tool']['version']}: {'PASS' if report['passed'] else 'FAIL'}"]
    for name, entry in report["tasks"].items():
        items = entry if isinstance(entry, list) else [entry]
        ok = sum(1 for e in items if e["passes"])
        extra = ""
        if name == "validate" and "residual" in entry:
            extra = f" residual={float(entry['residual']):.2e}"
        elif name == "ybe" and "braid_residual" in entry:
            extra = f" braid={float(entry['braid_residual']):.2e}"
        elif name == "reflect":
            worst = max((float(e["residual"]) for e in items if "residual" in e), default=float("nan"))
            extra = f" worst={worst:.2e}"
        errors = [e["error"] for e in items if "error" in e]
        if errors:
            extra += f" error={errors[0]}"
        lines.append(f"  {name:<10} {ok}/{len(items)} pass{extra}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tlrefl", description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True, type=Path, help="job description (JSON)")
    p.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")
    p.add_argument("--seed", type=int, help="run with this single seed instead of the config's list")
    p.add_argument("--json-only", action="store_true", help="suppress the human-readable summary")
    p.add_argument("--tol", type=float, help="override eps_rel for every pass threshold")
    p.add_argument("--parallel", type=int, default=1, metavar="K", help="worker threads over seeds")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is not None and not 0 <= args.seed < 2**64:
        parser.error("--seed must be an unsigned 64-bit integer")
    if args.tol is not None and not args.tol > 0:
        parser.error("--tol must be positive")
    try:
        config = json.loads(args.config.read_text())
        report = run(config, seeds=None if args.seed is None else [args.seed], eps_rel=args.tol,
                     parallel=max(1, args.parallel))
    except (OSError, json.JSONDecodeError, ConfigInvalidError) as exc:
        print(f"tlrefl: invalid config: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        args.out.write_text(text + "\n")
    else:
        print(text)
    if not args.json_only:
        print(summary(report), file=sys.stderr)
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
