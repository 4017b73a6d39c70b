"""Command-line front end: load data, build a function, select, report.

Selection output is JSON on stdout (or ``--output``):

    {"selection": [{"index": i, "gain": g}, ...],
     "function": ..., "optimizer": ..., "evaluations": n, "wall_ms": t}

``--benchmark optimizers`` times all four greedy strategies on the standard
synthetic clustered dataset and emits JSON; ``--benchmark scaling`` sweeps
the ground-set size and emits plot-ready CSV (n, wall_ms, evaluations).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import dataio, synthetic
from .classic import (CONCAVE_CHOICES, Clustered, DisparityMin, DisparitySum,
                      FacilityLocation, FeatureBased, GraphCut, LogDeterminant,
                      ProbabilisticSetCover, SetCover, clustered_function)
from .information import (ConcaveOverModular, FacilityLocationCG,
                          FacilityLocationCMI, FacilityLocationMI,
                          FacilityLocationQueryMI, GraphCutCG, GraphCutMI,
                          LogDeterminantCG, LogDeterminantCMI, LogDeterminantMI,
                          private_context, prob_set_cover_cg, prob_set_cover_cmi,
                          prob_set_cover_mi, query_context, set_cover_cg,
                          set_cover_cmi, set_cover_mi)
from .kernels import (build_cross_kernel, build_dense_kernel, build_sparse_kernel,
                      cluster_ground_set, per_cluster_kernels)
from .optimizers import OPTIMIZERS, OptimizeSpec, maximize

KERNEL_FUNCTIONS = ("fl", "gc", "logdet", "dmin", "dsum")
QUERY_FUNCTIONS = ("flvmi", "flqmi", "gcmi", "logdetmi", "com")
PRIVATE_FUNCTIONS = ("flcg", "gccg", "logdetcg")
BOTH_FUNCTIONS = ("flcmi", "logdetcmi")
CONCEPT_FUNCTIONS = ("sc", "psc", "fb", "scmi", "sccg", "sccmi",
                     "pscmi", "psccg", "psccmi")
ALL_FUNCTIONS = KERNEL_FUNCTIONS + QUERY_FUNCTIONS + PRIVATE_FUNCTIONS \
    + BOTH_FUNCTIONS + CONCEPT_FUNCTIONS


class ConfigError(ValueError):
    """Inconsistent flag combination or invalid parameter."""


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="submax",
        description="Greedy subset selection with submodular set functions.")
    p.add_argument("--function", choices=ALL_FUNCTIONS, help="set function to maximize")
    p.add_argument("--mode", choices=("dense", "sparse", "clustered"), default="dense",
                   help="kernel layout for similarity-driven functions")
    p.add_argument("--metric", choices=("euclidean", "cosine"), default="euclidean")
    p.add_argument("--k-neighbors", type=int, default=10,
                   help="neighbors kept per row in sparse mode")
    p.add_argument("--clusters", type=int, help="cluster count for clustered mode")
    p.add_argument("--budget", type=int, help="number of elements to select")
    p.add_argument("--optimizer", choices=OPTIMIZERS, default="naive")
    p.add_argument("--epsilon", type=float, default=0.1,
                   help="sampling accuracy for stochastic/lazier optimizers")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for sampling, clustering, and synthetic data")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5,
                   help="graph-cut diversity trade-off")
    p.add_argument("--eta", type=float, default=1.0, help="query-relevance scaling")
    p.add_argument("--nu", type=float, default=1.0, help="privacy-strictness scaling")
    p.add_argument("--reg", type=float, default=1e-6,
                   help="diagonal regularization for log-determinant forms")
    p.add_argument("--concave", choices=sorted(CONCAVE_CHOICES), default="sqrt")
    p.add_argument("--data", help="ground-set feature matrix (.csv or binary)")
    p.add_argument("--query-data", help="query feature matrix")
    p.add_argument("--private-data", help="private feature matrix")
    p.add_argument("--concepts", help="JSON file describing covers/probs/features")
    p.add_argument("--output", help="write the JSON/CSV report here instead of stdout")
    p.add_argument("--stop-if-zero-gain", action="store_true")
    p.add_argument("--stop-if-negative-gain", action="store_true")
    p.add_argument("--benchmark", choices=("optimizers", "scaling"),
                   help="run a timing benchmark instead of a selection")
    return p


def _need(args, attr: str, flag: str, why: str):
    value = getattr(args, attr)
    if value is None:
        raise ConfigError(f"{flag} is required {why}")
    return value


def _load_matrix(path: str) -> np.ndarray:
    return dataio.read_matrix(path)


def _ground_kernel(args, data: np.ndarray):
    if args.mode == "sparse":
        if args.function not in ("fl", "gc"):
            raise ConfigError(f"sparse mode supports fl and gc, not {args.function}")
        return build_sparse_kernel(data, args.metric, args.k_neighbors)
    return build_dense_kernel(data, args.metric)


def _clustered(args, data: np.ndarray):
    k = _need(args, "clusters", "--clusters", "in clustered mode")
    if args.function not in ("fl", "gc"):
        raise ConfigError(f"clustered mode supports fl and gc, not {args.function}")
    cmap = cluster_ground_set(data, k, seed=args.seed)
    kernels = per_cluster_kernels(data, cmap, args.metric)
    if args.function == "fl":
        return clustered_function(FacilityLocation, cmap, kernels)
    return clustered_function(lambda kern: GraphCut(kern, args.lam), cmap, kernels)


def _concepts_payload(args) -> dict:
    path = _need(args, "concepts", "--concepts", f"for --function {args.function}")
    return dataio.load_concept_json(path)


def _concept_key(payload: dict, key: str, path_hint: str):
    if key not in payload:
        raise ConfigError(f"concepts file is missing the {key!r} entry ({path_hint})")
    return payload[key]


def _coverage_arg(payload: dict, kind: str):
    """Concept-level query/private description: ids or probabilities."""
    if f"{kind}_coverage" in payload:
        return np.asarray(payload[f"{kind}_coverage"], dtype=float)
    if f"{kind}_concepts" in payload:
        return payload[f"{kind}_concepts"]
    raise ConfigError(f"concepts file needs {kind}_concepts or {kind}_coverage "
                      f"for this function")


def _build_concept_function(args):
    payload = _concepts_payload(args)
    hint = args.concepts
    m = payload.get("num_concepts")
    weights = np.asarray(payload["weights"], dtype=float) if "weights" in payload else None
    fn = args.function
    if fn in ("sc", "scmi", "sccg", "sccmi"):
        sc = SetCover(_concept_key(payload, "covers", hint), m, weights)
        if fn == "sc":
            return sc
        if fn == "scmi":
            return set_cover_mi(sc, _concept_key(payload, "query_concepts", hint))
        if fn == "sccg":
            return set_cover_cg(sc, _concept_key(payload, "private_concepts", hint))
        return set_cover_cmi(sc, _concept_key(payload, "query_concepts", hint),
                             _concept_key(payload, "private_concepts", hint))
    if fn in ("psc", "pscmi", "psccg", "psccmi"):
        psc = ProbabilisticSetCover(_concept_key(payload, "probs", hint), m, weights)
        if fn == "psc":
            return psc
        if fn == "pscmi":
            return prob_set_cover_mi(psc, _coverage_arg(payload, "query"))
        if fn == "psccg":
            return prob_set_cover_cg(psc, _coverage_arg(payload, "private"))
        return prob_set_cover_cmi(psc, _coverage_arg(payload, "query"),
                                  _coverage_arg(payload, "private"))
    # feature-based: dense rows or sparse (feature, score) pairs
    raw = _concept_key(payload, "features", hint)
    first = raw[0] if raw else []
    if first and isinstance(first[0], (list, tuple)):
        width = payload.get("num_features")
        if width is None:
            width = 1 + max((int(f) for row in raw for f, _ in row), default=-1)
        F = np.zeros((len(raw), width))
        for i, row in enumerate(raw):
            for fidx, score in row:
                F[i, int(fidx)] = float(score)
    else:
        F = np.asarray(raw, dtype=float)
    return FeatureBased(F, weights, args.concave)


def build_function(args):
    fn = args.function
    if fn in CONCEPT_FUNCTIONS:
        return _build_concept_function(args)

    data = _load_matrix(_need(args, "data", "--data", f"for --function {fn}"))

    if fn in KERNEL_FUNCTIONS:
        if args.mode == "clustered":
            return _clustered(args, data)
        kernel = _ground_kernel(args, data)
        if fn == "fl":
            return FacilityLocation(kernel)
        if fn == "gc":
            return GraphCut(kernel, args.lam)
        if fn == "logdet":
            return LogDeterminant(kernel, args.reg)
        if fn == "dmin":
            return DisparityMin(kernel)
        return DisparitySum(kernel)

    if args.mode != "dense":
        raise ConfigError(f"{fn} requires dense mode")
    needs_self = fn in ("logdetmi", "logdetcg", "logdetcmi")
    q = p = None
    if fn in QUERY_FUNCTIONS + BOTH_FUNCTIONS:
        qdata = _load_matrix(_need(args, "query_data", "--query-data",
                                   f"for --function {fn}"))
        q = query_context(data, qdata, args.metric, args.eta, with_self_kernel=needs_self)
    if fn in PRIVATE_FUNCTIONS + BOTH_FUNCTIONS:
        pdata = _load_matrix(_need(args, "private_data", "--private-data",
                                   f"for --function {fn}"))
        p = private_context(data, pdata, args.metric, args.nu, with_self_kernel=needs_self)

    if fn == "flqmi":
        return FacilityLocationQueryMI(q)
    if fn == "gcmi":
        return GraphCutMI(args.lam, q)
    if fn == "com":
        return ConcaveOverModular(q, args.concave)

    kernel = build_dense_kernel(data, args.metric)
    if fn == "flvmi":
        return FacilityLocationMI(kernel, q)
    if fn == "logdetmi":
        return LogDeterminantMI(kernel, q, args.reg)
    if fn == "flcg":
        return FacilityLocationCG(kernel, p)
    if fn == "gccg":
        return GraphCutCG(kernel, args.lam, p)
    if fn == "logdetcg":
        return LogDeterminantCG(kernel, p, args.reg)
    if fn == "flcmi":
        return FacilityLocationCMI(kernel, q, p)
    # logdetcmi: the composed route also needs query-to-private similarities
    qp = build_cross_kernel(_load_matrix(args.query_data),
                            _load_matrix(args.private_data), args.metric).values
    return LogDeterminantCMI(kernel, q, p, query_private=qp, reg=args.reg)


def run_selection(args) -> dict:
    f = build_function(args)
    budget = _need(args, "budget", "--budget", "to run a selection")
    spec = OptimizeSpec(budget=budget, optimizer=args.optimizer,
                        epsilon=args.epsilon, seed=args.seed,
                        stop_if_zero_gain=args.stop_if_zero_gain,
                        stop_if_negative_gain=args.stop_if_negative_gain)
    start = time.perf_counter()
    result = maximize(f, spec)
    wall_ms = (time.perf_counter() - start) * 1000.0
    return {
        "selection": [{"index": int(e), "gain": float(g)} for e, g in result.picks],
        "function": f.name,
        "optimizer": args.optimizer,
        "evaluations": result.gain_evaluations,
        "wall_ms": wall_ms,
    }


def run_benchmark(args) -> str:
    budget = args.budget
    if args.benchmark == "optimizers":
        data = synthetic.clustered_points(n=500, clusters=10, std=4.0, seed=args.seed)
        f = FacilityLocation(build_dense_kernel(data, args.metric))
        b = budget if budget is not None else 250
        rows = []
        for name in OPTIMIZERS:
            spec = OptimizeSpec(budget=b, optimizer=name,
                                epsilon=args.epsilon, seed=args.seed)
            start = time.perf_counter()
            result = maximize(f, spec)
            wall_ms = (time.perf_counter() - start) * 1000.0
            rows.append({"optimizer": name, "wall_ms": wall_ms,
                         "evaluations": result.gain_evaluations,
                         "value": result.value})
        return json.dumps({"benchmark": "optimizers", "n": 500, "budget": b,
                           "results": rows}, indent=2)
    # scaling sweep: one optimizer, growing ground set, CSV rows
    sizes = (50, 100, 200, 500, 1000, 2000)
    lines = ["n,wall_ms,evaluations"]
    for n in sizes:
        data = synthetic.clustered_points(n=n, clusters=10, std=4.0, seed=args.seed)
        f = FacilityLocation(build_dense_kernel(data, args.metric))
        b = min(budget if budget is not None else 100, n)
        spec = OptimizeSpec(budget=b, optimizer=args.optimizer,
                            epsilon=args.epsilon, seed=args.seed)
        start = time.perf_counter()
        result = maximize(f, spec)
        wall_ms = (time.perf_counter() - start) * 1000.0
        lines.append(f"{n},{wall_ms:.3f},{result.gain_evaluations}")
    return "\n".join(lines) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.benchmark:
            _emit(run_benchmark(args), args.output)
            return 0
        if args.function is None:
            raise ConfigError("--function is required (or use --benchmark)")
        report = run_selection(args)
        _emit(json.dumps(report, indent=2), args.output)
        return 0
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
