"""Command-line entry point: one sub-command per process, JSON report on stdout.

Exit status is 0 on success, 1 for usage or data errors and 2 when a
numerical solver fails to certify its answer.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import csw, datasets, kscolor, ncycle, onto, polytope, quantum, scenario
from .scenario import ScenarioError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _load(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, default=_json_default)
    sys.stdout.write("\n")


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _vector(text: str, size: int | None = None) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {text!r}") from exc
    if size is not None and len(v) != size:
        raise UsageError(f"expected {size} comma-separated numbers, got {text!r}")
    return v


def _seed(text: str) -> int:
    try:
        s = int(text, 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from exc
    if not 0 <= s < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return s


# -- sub-commands -------------------------------------------------------------

def cmd_scenario(args) -> int:
    s = scenario.scenario_from_json(_load(args.file))
    _emit({"valid": True, "dimension": s.dimension, "maximal_contexts": [list(c) for c in s.maximal_contexts], **s.to_json()})
    _say(f"valid scenario: {len(s.observables)} observables, {len(s.contexts)} contexts")
    return 0


def cmd_ncycle(args) -> int:
    n = args.n
    if args.emit == "inequalities":
        ineqs = ncycle.boole_inequalities(n)
        _emit({"n": n, "inequalities": [q.to_json() for q in ineqs]})
        _say(f"{len(ineqs)} inequalities, bound {n - 2} each")
    elif args.emit == "vertices":
        s = ncycle.ncycle_scenario(n)
        _emit({"n": n, "noncontextual": polytope.nc_vertices(s).to_json(), "no_disturbance": ncycle.nd_vertices(n).to_json()})
        _say(f"NC vertices {1 << n}, ND vertices {(1 << n) + (1 << (n - 1))}")
    elif args.emit == "realization":
        r = ncycle.quantum_realization(n)
        out = quantum.Realization(r.state, r.named_observables).to_json()
        out.update({"n": n, "inequality": r.inequality.to_json(), "value": r.value()})
        _emit(out)
        _say(f"realized value {r.value():.12f}")
    else:
        r = ncycle.quantum_realization(n)
        closed = ncycle.quantum_bound_closed_form(n)
        _emit({"n": n, "noncontextual": n - 2, "quantum_closed_form": closed, "quantum_realized": r.value(), "no_disturbance": n})
        _say(f"NC {n - 2}, quantum {closed:.12f}, ND {n}")
    return 0


def _model_or_expectations(obj):
    if "tables" in obj:
        return scenario.model_from_json(obj)
    if "expectations" in obj:
        return scenario.expectations_from_json(obj)
    raise UsageError("model file needs 'tables' or 'expectations'")


def cmd_decide(args) -> int:
    v = polytope.decide_contextuality(_model_or_expectations(_load(args.model)))
    _emit(v.to_json())
    if v.certificate is not None:
        _say(f"contextual: {v.certificate} violated by {v.violation}")
        if args.certificate:
            Path(args.certificate).write_text(json.dumps(v.certificate.to_json(), indent=2) + "\n")
    else:
        _say("noncontextual")
    return 0


def cmd_facets(args) -> int:
    s = scenario.scenario_from_json(_load(args.scenario))
    facets = polytope.facet_enumeration(polytope.nc_vertices(s))
    kinds = polytope.classify_facets(s, facets)
    _emit({"scenario": s.to_json(), "facets": [dict(q.to_json(), kind=k) for q, k in kinds]})
    nb = sum(k == "boole" for _, k in kinds)
    _say(f"{len(facets)} facets: {len(facets) - nb} positivity, {nb} Boole")
    return 0


def cmd_vertices(args) -> int:
    s, ineqs = polytope.hrep_from_json(_load(args.hrep))
    p = polytope.vertex_enumeration(ineqs, s.contexts)
    _emit(p.to_json())
    _say(f"{len(p)} vertices")
    return 0


def _theta_json(th: csw.ThetaResult) -> dict:
    return {"theta": th.value, "primal": th.primal, "dual": th.dual, "gap": th.gap,
            "outer_iterations": th.outer_iterations, "newton_steps": th.newton_steps}


def cmd_theta(args) -> int:
    out: dict = {}
    if args.family:
        if args.n is None:
            raise UsageError("--family needs --n")
        g = csw.family_graph(args.family, args.n)
        out["closed_form"] = csw.theta_closed_form(args.family, args.n)
    elif args.graph:
        g = csw.graph_from_json(_load(args.graph))
    else:
        form = csw.to_csw_form(polytope.inequality_from_json(_load(args.inequality)))
        g = csw.exclusivity_graph(form)
        out["nc_bound_events"] = str(form.nc_bound)
    th = csw.lovasz_theta(g)
    out.update({"vertices": g.order, "edges": len(g.edges)}, **_theta_json(th))
    _emit(out)
    _say(f"theta = {th.value:.10f}" + (f", closed form {out['closed_form']:.10f}" if "closed_form" in out else ""))
    return 0


def cmd_quantum_max(args) -> int:
    ineq = polytope.inequality_from_json(_load(args.inequality))
    r = csw.quantum_max(ineq)
    out = {
        "inequality": ineq.to_json(),
        "quantum_max": r.value,
        "upper_bound_only": r.upper_bound_only,
        "noncontextual_bound": str(ineq.bound),
        **_theta_json(r.theta),
    }
    if args.realization:
        real = quantum.realization_from_json(_load(args.realization))
        M = quantum.inequality_operator(ineq, real.observables)
        out["realized_value"] = quantum.expectation(quantum.as_density(real.state), M)
    _emit(out)
    _say(f"quantum max {r.value:.10f}" + (" (upper bound: Bell scenario)" if r.upper_bound_only else ""))
    return 0


def _pvm_from_json(obj) -> list:
    return [quantum.matrix_from_json(m) for m in obj]


def cmd_simulate(args) -> int:
    N, seed = args.samples, args.seed
    if N < 1:
        raise UsageError("--samples must be positive")
    psi = _vector(args.psi, 3)
    phi = _vector(args.phi, 3)
    if args.model == "ks":
        rep = onto.ks_model(psi, phi, N, seed)
    elif args.model == "bell":
        rep = onto.bell_qubit_model(psi, phi, N, seed)
    elif args.model == "ljbr":
        rep = onto.ljbr_qubit_model(psi, phi, N, seed)
    elif args.model == "bell-mermin":
        a = _vector(args.observable, 4)
        rep = onto.bell_mermin_model(psi, (a[0], a[1:]), N, seed)
    else:
        if not args.input:
            raise UsageError("bell-general needs --input with 'state' and 'pvm'")
        obj = _load(args.input)
        rep = onto.bell_general_model(quantum.state_from_json(obj["state"]), _pvm_from_json(obj["pvm"]), N, seed)
    _emit(rep.to_json())
    _say(f"{rep.model}: max |z| = {rep.max_abs_z:.3f} over {len(rep.queries)} queries")
    return 0


def cmd_ks_check(args) -> int:
    r = kscolor.ks_check(args.dataset)
    _emit(r.to_json())
    _say(f"{args.dataset}: {r.colorings} colorings" + (" (KS set)" if r.ks_set else ""))
    return 0


def cmd_verify_datasets(args) -> int:
    reports = [datasets.verify_projector_dataset(datasets.load_dataset(n)) for n in datasets.DATASETS]
    ok = all(r.ok for r in reports)
    _emit({"ok": ok, "datasets": [r.to_json() for r in reports]})
    for r in reports:
        worst = max((c.deviation for c in r.checks), default=0.0)
        _say(f"{r.name}: {'ok' if r.ok else 'FAILED'} (max deviation {worst:.2e})")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="contextuality", description="Contextuality scenarios, polytopes, quantum bounds and hidden-variable models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("scenario", help="validate a scenario file")
    sp.add_argument("action", choices=["validate"])
    sp.add_argument("file")
    sp.set_defaults(func=cmd_scenario)

    sp = sub.add_parser("ncycle", help="n-cycle inequalities, vertices, realization or bounds")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--emit", choices=["inequalities", "vertices", "realization", "bounds"], default="inequalities")
    sp.set_defaults(func=cmd_ncycle)

    sp = sub.add_parser("decide", help="decide contextuality of a model file")
    sp.add_argument("--model", required=True)
    sp.add_argument("--certificate", help="write the violated inequality here")
    sp.set_defaults(func=cmd_decide)

    sp = sub.add_parser("facets", help="facets of the noncontextual polytope of a scenario")
    sp.add_argument("--scenario", required=True)
    sp.set_defaults(func=cmd_facets)

    sp = sub.add_parser("vertices", help="vertices of an H-representation")
    sp.add_argument("--hrep", required=True)
    sp.set_defaults(func=cmd_vertices)

    sp = sub.add_parser("theta", help="Lovasz theta of a graph")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--graph")
    g.add_argument("--inequality")
    g.add_argument("--family", choices=["prism", "mobius"], help="prism Y_n (odd n) or Moebius ladder M_2n (even n)")
    sp.add_argument("--n", type=int)
    sp.set_defaults(func=cmd_theta)

    sp = sub.add_parser("quantum-max", help="quantum maximum of a correlation inequality")
    sp.add_argument("--inequality", required=True)
    sp.add_argument("--realization")
    sp.set_defaults(func=cmd_quantum_max)

    sp = sub.add_parser("simulate", help="sample an ontological model and compare with the Born rule")
    sp.add_argument("--model", choices=["ks", "bell", "bell-general", "bell-mermin", "ljbr"], required=True)
    sp.add_argument("--samples", type=int, default=10**6)
    sp.add_argument("--seed", type=_seed, default=0)
    sp.add_argument("--psi", default="0.8660254037844386,0,0.5", help="Bloch vector of the prepared state")
    sp.add_argument("--phi", default="0,0,1", help="Bloch vector of the outcome-0 projector")
    sp.add_argument("--observable", default="0,1,0,0", help="a0,ax,ay,az of A = a0 1 + a.sigma")
    sp.add_argument("--input", help="bell-general: JSON with 'state' and 'pvm' (list of matrices)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("ks-check", help="Kochen-Specker colorability of a bundled set")
    sp.add_argument("--dataset", choices=sorted(kscolor.KS_CHECKS), required=True)
    sp.set_defaults(func=cmd_ks_check)

    sp = sub.add_parser("verify-datasets", help="check every bundled relation")
    sp.set_defaults(func=cmd_verify_datasets)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _say(str(exc))
        return 1
    except csw.SolverError as exc:
        _say(f"solver failure: {exc}")
        return 2
    except (ValueError, KeyError, TypeError, ScenarioError) as exc:
        _say(f"error: {exc}")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
