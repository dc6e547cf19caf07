"""Command-line front end.

Subcommands: ``verify`` (Born-rule check on random pairs), ``classify``
(falsification-test one model's declared properties), ``table`` (the
seven-model summary table), ``ksval`` (ray-set valuation search),
``bound`` (fragment feasibility and overlap fraction), and ``prepctx``
(preparation-context distance for one mixed state).

Exit codes are uniform: 0 for a pass or positive finding, 1 for a
substantive negative (verification failure, declared/measured mismatch,
UNSAT, infeasible), 2 for usage or input errors.

Flags can also come from a ``--config`` file of ``key = value`` lines
using the long flag names (``model``, ``engine``, ``seed``, ``pairs``,
``trials``, ``input``, ``all``, ``limit``, ``rho``, ``ctx``, ``format``,
``output``); explicit flags win.  The default seed comes from the
ONTOMODELS_SEED environment variable when set, and every report records
the seed it actually used.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import reports
from .engines import EngineError, parse_engine
from .epibound import FragmentError, analyze, load_fragment
from .framework import (
    PREP_TV_CONTEXTUAL,
    PreparationMismatchError,
    UnsupportedDimensionError,
    born_suite_pairs,
    canonical_mix_contexts,
    classify,
    default_engine,
    prep_context_distance,
)
from .hilbert import DensityOperator, mix
from .ksval import (
    VectorFileError,
    build_graph,
    enumerate_valuations,
    find_valuation,
    load_vector_set,
)
from .rng import DEFAULT_SEED
from .zoo import UnknownModelError, get_model, table_models

ENV_SEED = "ONTOMODELS_SEED"

TABLE_COLUMNS = ("name", "type", "reciprocity", "determinism", "contextual")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """One resolved invocation: the command plus every knob it reads.

    The seed is resolved from flag, then config file, then the
    ONTOMODELS_SEED environment variable, then the built-in default, and
    is always recorded in the emitted report.
    """

    command: str
    model: str | None = None
    engine: str | None = None
    seed: int = DEFAULT_SEED
    pairs: int = 100
    trials: int = 4096
    inputs: tuple = ()
    enumerate_all: bool = False
    limit: int | None = None
    rho: str = "unpolarized"
    contexts: tuple = ("z", "x")
    fmt: str = "json"
    output: str | None = None


# ---------------------------------------------------------------------------
# Argument and config-file handling

_CONFIG_KEYS = {
    "model", "engine", "seed", "pairs", "trials", "input", "all",
    "limit", "rho", "ctx", "format", "output",
}

_FORMATS = {
    "verify": ("json", "text", "csv"),
    "classify": ("json", "text"),
    "table": ("json", "csv", "text"),
    "ksval": ("json", "text"),
    "bound": ("json", "text", "csv"),
    "prepctx": ("json", "text"),
}

_NEEDS_MODEL = {"verify", "classify", "prepctx"}
_NEEDS_INPUT = {"ksval", "bound"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ontomodels",
        description="Verify, classify, and bound ontological models "
        "of single quantum systems.",
    )
    parser.add_argument(
        "--version", action="version",
        version=f"{reports.TOOL_NAME} {reports.TOOL_VERSION}",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    def common(sp, command):
        sp.add_argument("--config", help="key = value file with flag defaults")
        sp.add_argument("--seed", type=int, help="RNG seed recorded in the report")
        sp.add_argument(
            "--format", dest="fmt", choices=_FORMATS[command],
            help="report format (default json)",
        )
        sp.add_argument("--output", help="write the report here instead of stdout")

    sp = sub.add_parser("verify", help="check Born reproduction on random pairs")
    sp.add_argument("--model", help="registry name, e.g. ks, bb:3, ws:4")
    sp.add_argument("--engine", help="closed, quad:<level>, or mc:<samples>")
    sp.add_argument("--pairs", type=int, help="number of random pairs (default 100)")
    common(sp, "verify")

    sp = sub.add_parser("classify", help="falsification-test declared properties")
    sp.add_argument("--model", help="registry name")
    sp.add_argument("--trials", type=int, help="samples per probe (default 4096)")
    common(sp, "classify")

    sp = sub.add_parser("table", help="render the seven-model summary table")
    sp.add_argument("--trials", type=int, help="samples per probe (default 4096)")
    common(sp, "table")

    sp = sub.add_parser("ksval", help="search for a 0/1 valuation of a ray set")
    sp.add_argument("input", nargs="?", help="vector-set file (.vec)")
    sp.add_argument("--all", dest="enumerate_all", action="store_const",
                    const=True, help="enumerate every valuation")
    sp.add_argument("--limit", type=int, help="stop enumeration after this many")
    common(sp, "ksval")

    sp = sub.add_parser("bound", help="fragment feasibility and overlap fraction")
    sp.add_argument("input", nargs="?", help="fragment file (.frag)")
    common(sp, "bound")

    sp = sub.add_parser("prepctx", help="preparation-context distance of a mixture")
    sp.add_argument("--model", help="registry name")
    sp.add_argument("--rho", help="mixed state to prepare (unpolarized)")
    sp.add_argument("--ctx", help="two context names, e.g. z,x")
    sp.add_argument("--engine", help="closed, quad:<level>, or mc:<samples>")
    common(sp, "prepctx")
    return parser


def _read_config(path) -> dict:
    table = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        table[key] = value.strip()
    return table


def _to_bool(value: str) -> bool:
    low = value.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"expected a boolean, got {value!r}")


def _config_from_args(args) -> RunConfig:
    command = args.command
    config = _read_config(args.config) if getattr(args, "config", None) else {}

    def pick(flag, key, cast, default):
        value = getattr(args, flag, None)
        if value is None and key in config:
            try:
                value = cast(config[key])
            except ValueError:
                raise UsageError(f"config {key}={config[key]!r} is invalid") from None
        return default if value is None else value

    seed = pick("seed", "seed", int, None)
    if seed is None:
        env = os.environ.get(ENV_SEED)
        if env is not None:
            try:
                seed = int(env)
            except ValueError:
                raise UsageError(f"{ENV_SEED}={env!r} is not an integer") from None
        else:
            seed = DEFAULT_SEED

    fmt = pick("fmt", "format", str, "json")
    if fmt not in _FORMATS[command]:
        raise UsageError(f"{command} cannot emit format {fmt!r}")

    inputs = ()
    if command in _NEEDS_INPUT:
        path = pick("input", "input", str, None)
        if path is None:
            raise UsageError(f"{command} needs an input file")
        inputs = (path,)

    model = pick("model", "model", str, None)
    if command in _NEEDS_MODEL and model is None:
        raise UsageError(f"{command} needs --model")

    ctx = pick("ctx", "ctx", str, "z,x")
    contexts = tuple(part.strip() for part in ctx.split(",") if part.strip())

    return RunConfig(
        command=command,
        model=model,
        engine=pick("engine", "engine", str, None),
        seed=int(seed),
        pairs=pick("pairs", "pairs", int, 100),
        trials=pick("trials", "trials", int, 4096),
        inputs=inputs,
        enumerate_all=pick("enumerate_all", "all", _to_bool, False),
        limit=pick("limit", "limit", int, None),
        rho=pick("rho", "rho", str, "unpolarized"),
        contexts=contexts,
        fmt=fmt,
        output=pick("output", "output", str, None),
    )


def _emit(cfg: RunConfig, envelope: dict, text: str = "", csv_data=None):
    if cfg.fmt == "json":
        out = reports.canonical_json(envelope)
    elif cfg.fmt == "csv":
        out = reports.csv_text(*csv_data)
    else:
        out = text if text.endswith("\n") else text + "\n"
    if cfg.output:
        Path(cfg.output).write_text(out)
    else:
        sys.stdout.write(out)


def _require_implemented(model):
    if not model.implemented:
        raise UsageError(
            f"model {model.name} is declared-only; this command needs an "
            "implemented model"
        )


# ---------------------------------------------------------------------------
# Commands


def cmd_verify(cfg: RunConfig) -> int:
    model = get_model(cfg.model)
    _require_implemented(model)
    engine = parse_engine(cfg.engine or model.default_engine_spec, seed=cfg.seed)
    report = born_suite_pairs(model, cfg.pairs, cfg.seed, engine)
    body = report.to_jsonable()
    envelope = reports.build_report("verify", body, cfg.seed, engine.spec)
    lines = [
        f"verify {model.name}  engine={engine.spec}  seed={cfg.seed}",
        f"pairs={cfg.pairs}  outcomes={report.n_pairs}  "
        f"max deviation={report.max_deviation:.6g}",
        "PASS" if report.passed else "FAIL",
    ]
    csv_rows = [
        {
            "psi": d.psi_label, "phi": d.phi_label, "basis": d.basis_label,
            "predicted": d.predicted, "born": d.born,
            "deviation": d.deviation, "tolerance": d.tolerance,
        }
        for d in report.deviations
    ]
    csv_cols = ("psi", "phi", "basis", "predicted", "born", "deviation", "tolerance")
    _emit(cfg, envelope, "\n".join(lines), (csv_cols, csv_rows))
    return 0 if report.passed else 1


def cmd_classify(cfg: RunConfig) -> int:
    model = get_model(cfg.model)
    _require_implemented(model)
    report = classify(model, n_trials=cfg.trials, seed=cfg.seed)
    ok = report.matches_declared(model.declared)
    body = report.to_jsonable()
    body["matches_declared"] = ok
    envelope = reports.build_report("classify", body, cfg.seed)
    lines = [f"classify {model.name}  trials={cfg.trials}  seed={cfg.seed}"]
    for name in sorted(report.predicates):
        st = report.predicates[name]
        note = f"  ({st.note})" if st.note else ""
        lines.append(f"  {name}: {st.value}{note}")
    lines.append(f"deficient: {'yes' if report.deficient else 'no'}")
    lines.append("MATCH" if ok else "MISMATCH")
    _emit(cfg, envelope, "\n".join(lines))
    return 0 if ok else 1


def _declared_row(model) -> dict:
    d = model.declared
    return {
        "reciprocity": "yes" if d.reciprocal else "no",
        "determinism": "yes" if d.outcome_deterministic else "no",
        "contextual": "yes" if d.measurement_contextual else "no",
    }


def cmd_table(cfg: RunConfig, models=None) -> int:
    models = table_models() if models is None else list(models)
    rows = []
    any_mismatch = False
    for model in models:
        declared = _declared_row(model)
        row = {
            "name": model.name,
            "display_name": model.display_name,
            "type": model.table_type,
            "implemented": model.implemented,
        }
        if model.implemented:
            rep = classify(model, n_trials=cfg.trials, seed=cfg.seed)
            measured = rep.table_row()
            row.update(
                {k: measured[k] for k in ("reciprocity", "determinism", "contextual")}
            )
            row["source"] = "measured"
            mismatch = {
                name: {
                    "declared": "holds" if want else "fails",
                    "measured": st.value,
                }
                for name, st, want in _predicate_expectations(rep, model.declared)
                if st.value != "not_applicable"
                and (st.value == "falsified") == want
            }
            row["mismatch"] = mismatch or None
            if mismatch:
                any_mismatch = True
        else:
            row.update(declared)
            row["source"] = "declared"
            row["mismatch"] = None
        rows.append(row)

    body = {"rows": rows, "all_match": not any_mismatch, "n_trials": cfg.trials}
    envelope = reports.build_report("table", body, cfg.seed)

    widths = {c: max(len(c), max(len(str(r[c])) for r in rows)) for c in TABLE_COLUMNS}
    lines = ["  ".join(c.ljust(widths[c]) for c in TABLE_COLUMNS)]
    for r in rows:
        line = "  ".join(str(r[c]).ljust(widths[c]) for c in TABLE_COLUMNS)
        flags = []
        if not r["implemented"]:
            flags.append("unimplemented")
        if r["mismatch"]:
            flags.append("MISMATCH: " + ", ".join(sorted(r["mismatch"])))
        lines.append(line + ("  [" + "; ".join(flags) + "]" if flags else ""))
    lines.append("OK" if not any_mismatch else "MISMATCH")

    _emit(cfg, envelope, "\n".join(lines), (TABLE_COLUMNS, rows))
    return 0 if not any_mismatch else 1


def _predicate_expectations(report, declared):
    want = {
        "reciprocity": declared.reciprocal,
        "outcome_determinism": declared.outcome_deterministic,
        "measurement_noncontextuality": not declared.measurement_contextual,
        "preparation_noncontextuality": not declared.preparation_contextual,
        "response_state_independence": not declared.psi_dependent_response,
    }
    return [
        (name, report.predicates[name], expect) for name, expect in want.items()
    ]


def cmd_ksval(cfg: RunConfig) -> int:
    path = cfg.inputs[0]
    vset = load_vector_set(path)
    graph = build_graph(vset)
    if cfg.enumerate_all:
        valuations, stats = enumerate_valuations(graph, vset.dim, limit=cfg.limit)
        satisfiable = bool(valuations)
        valuation = list(valuations[0]) if valuations else None
        extra = {
            "n_valuations": len(valuations),
            "valuations": [list(v) for v in valuations],
        }
    else:
        result = find_valuation(graph, vset.dim)
        satisfiable = result.satisfiable
        valuation = list(result.valuation) if result.valuation else None
        stats = result.stats
        extra = {}
    body = {
        "file": Path(path).name,
        "dim": vset.dim,
        "radical": vset.radical,
        "n_rays": len(vset.vectors),
        "n_edges": len(graph.edges),
        "n_bases": len(graph.bases),
        "n_complete_bases": len(graph.complete_bases),
        "satisfiable": satisfiable,
        "valuation": valuation,
        "verified": True,  # SAT answers re-pass the independent checker
        "stats": {
            "decisions": stats.decisions,
            "assignments": stats.assignments,
            "conflicts": stats.conflicts,
            "solutions": stats.solutions,
            "completed": stats.completed,
        },
        **extra,
    }
    envelope = reports.build_report("ksval", body, cfg.seed, inputs=[path])
    verdict = "SAT" if satisfiable else "UNSAT"
    lines = [
        f"ksval {Path(path).name}  rays={body['n_rays']}  "
        f"edges={body['n_edges']}  bases={body['n_bases']}",
        f"decisions={stats.decisions}  conflicts={stats.conflicts}",
    ]
    if cfg.enumerate_all:
        lines.append(f"valuations={extra['n_valuations']}")
    lines.append(verdict)
    _emit(cfg, envelope, "\n".join(lines))
    return 0 if satisfiable else 1


def cmd_bound(cfg: RunConfig) -> int:
    path = cfg.inputs[0]
    fragment = load_fragment(path)
    body = analyze(fragment)
    envelope = reports.build_report("bound", body, cfg.seed, inputs=[path])
    f_star = body["f_star"]
    lines = [
        f"bound {fragment.name}  dim={body['dim']}  atoms={body['n_atoms']}",
        f"feasible={body['feasible']}",
        f"f_star={'undefined' if f_star is None else reports.format_float(f_star)}"
        f"  ({body['caveat']})",
    ]
    csv_cols = ("measured", "prepared", "born", "core_mass", "ratio")
    _emit(cfg, envelope, "\n".join(lines), (csv_cols, body["pairs"]))
    return 0 if body["feasible"] == "Feasible" else 1


_CTX_INDEX = {"z": 0, "standard": 0, "x": 1, "fourier": 1}
_RHO_NAMES = ("unpolarized", "mixed", "maximally-mixed")


def cmd_prepctx(cfg: RunConfig) -> int:
    model = get_model(cfg.model)
    _require_implemented(model)
    if cfg.rho not in _RHO_NAMES:
        raise UsageError(
            f"unknown rho {cfg.rho!r}; supported: {', '.join(_RHO_NAMES)}"
        )
    if len(cfg.contexts) != 2:
        raise UsageError("--ctx needs exactly two comma-separated names")
    for name in cfg.contexts:
        if name not in _CTX_INDEX:
            raise UsageError(
                f"unknown context {name!r}; supported: z, x, standard, fourier"
            )
    pair = canonical_mix_contexts(model.dim)
    ctx_a = pair[_CTX_INDEX[cfg.contexts[0]]]
    ctx_b = pair[_CTX_INDEX[cfg.contexts[1]]]
    rho = DensityOperator(np.eye(model.dim) / model.dim)
    if cfg.engine:
        engine = parse_engine(cfg.engine, seed=cfg.seed)
    else:
        engine = default_engine(model, for_densities=True)
    mix_deviation = max(
        float(np.max(np.abs(mix(ctx.payload).matrix - rho.matrix)))
        for ctx in (ctx_a, ctx_b)
    )
    tv = prep_context_distance(model, rho, ctx_a, ctx_b, engine)
    body = {
        "model": model.name,
        "dim": model.dim,
        "rho": "unpolarized",
        "ctx_a": ctx_a.label,
        "ctx_b": ctx_b.label,
        "tv_distance": float(tv),
        "threshold": PREP_TV_CONTEXTUAL,
        "preparation_contextual": bool(tv > PREP_TV_CONTEXTUAL),
        "mix_deviation": mix_deviation,
    }
    envelope = reports.build_report("prepctx", body, cfg.seed, engine.spec)
    lines = [
        f"prepctx {model.name}  {ctx_a.label} vs {ctx_b.label}  "
        f"engine={engine.spec}",
        f"tv_distance={tv:.6g}  threshold={PREP_TV_CONTEXTUAL}",
        f"preparation contextual: {'yes' if body['preparation_contextual'] else 'no'}",
    ]
    _emit(cfg, envelope, "\n".join(lines))
    return 0


_DISPATCH = {
    "verify": cmd_verify,
    "classify": cmd_classify,
    "table": cmd_table,
    "ksval": cmd_ksval,
    "bound": cmd_bound,
    "prepctx": cmd_prepctx,
}

_USAGE_ERRORS = (
    UsageError,
    UnknownModelError,
    UnsupportedDimensionError,
    EngineError,
    VectorFileError,
    FragmentError,
    PreparationMismatchError,
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = _config_from_args(args)
        return _DISPATCH[cfg.command](cfg)
    except _USAGE_ERRORS as exc:
        print(f"ontomodels: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
