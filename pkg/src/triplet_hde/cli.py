"""Command-line entry point.

Exit codes: 0 everything holds, 1 a condition/bound/lemma fails (or sampling
fails), 2 input error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import secrets
import sys
from pathlib import Path


from . import __version__
from .constructions import conlon_pipeline, load_three_product_spec, sample_sidon, three_product_pipeline
from .errors import (ConfigurationError, DomainError, NumericalError, SamplingError, StructuralError,
                     TripletError)
from .graphs import format_edge_list, read_edge_list
from .groups import load_group
from .products import format_rep_header, replacement_graph, zigzag_operator
from .report import EXIT_FAILURE, EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK, Report, certificate_rows
from .spectra import ITERATIVE_TOL, spectral_lambda
from .triplet import build_structure, check_all, load_triples
from .walk import BoundCheck, Pipeline, certify_main_theorem, hoeffding_envelope, simulate_walk, verify_lift


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--tol", type=float, default=ITERATIVE_TOL, help="iterative solver tolerance")
    common.add_argument("--deterministic", action="store_true", help="omit timestamps from the report")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads for Monte Carlo walks")

    structure = argparse.ArgumentParser(add_help=False)
    structure.add_argument("group", help="group descriptor JSON")
    structure.add_argument("triples", help="triple-set JSON")

    p = _Parser(prog="triplet-hde", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("check", parents=[common, structure], help="evaluate conditions 0-E")
    sub.add_parser("certify", parents=[common, structure], help="verify lemmas and certify the spectral bounds")

    c = sub.add_parser("conlon", parents=[common], help="Conlon construction over F_2^t")
    c.add_argument("--t", type=int, required=True)
    c.add_argument("--size", type=int, required=True)
    c.add_argument("--seed", type=int)
    c.add_argument("--max-attempts", type=int, default=100)

    tp = sub.add_parser("three-product", parents=[common], help="3-product construction")
    tp.add_argument("--spec", required=True, help="3-product spec JSON")

    w = sub.add_parser("walk", parents=[common], help="simulate the 2D random walk")
    w.add_argument("inputs", nargs="+", help="GROUP TRIPLES, or a single edge-list file")
    w.add_argument("--steps", type=int, required=True)
    w.add_argument("--trials", type=int, required=True, help="0 selects the exact (matvec) curve")
    w.add_argument("--seed", type=int)
    w.add_argument("--start", type=int, default=0)
    w.add_argument("--csv", required=True, help="mixing curve output")

    lf = sub.add_parser("lift", parents=[common, structure], help="check the covering map onto G_walk")
    lf.add_argument("--blue", help="JSON list overriding the blue matching permutation")

    ex = sub.add_parser("export", parents=[common, structure], help="write a derived graph as an edge list")
    ex.add_argument("--what", required=True, choices=["L", "gcay", "gwalk", "rep", "zigzag"])
    return p


def _seed(args) -> int:
    return args.seed if args.seed is not None else secrets.randbits(63)


def _structure(args, report):
    group = load_group(args.group)
    triples = load_triples(args.triples, group)
    report.inputs.update({"group": group.to_descriptor() if group.kind != "table" else {"kind": "table",
                          "order": group.order}, "triples": [list(t) for t in triples]})
    cond = check_all(group, triples)
    report.conditions = cond.to_dict()
    if not cond.passed:
        report.exit_code = EXIT_FAILURE
        report.message = f"conditions failed: {', '.join(cond.failures)}"
        return None
    H = build_structure(group, triples)
    report.sizes = H.sizes()
    return H


def cmd_check(args, report):
    _structure(args, report)


def cmd_certify(args, report):
    H = _structure(args, report)
    if H is None:
        return
    cert = certify_main_theorem(H, args.tol)
    report.spectra, report.bounds, report.lemmas = certificate_rows(cert)
    report.extras["spectrum_details"] = cert.spectrum_details


def _pipeline_report(result, report):
    cert = result.certificate
    report.conditions = result.pipeline.structure.report.to_dict()
    report.sizes = cert.sizes
    report.spectra, report.bounds, report.lemmas = certificate_rows(cert)
    report.bounds += [c.to_dict() for c in result.checks]
    report.extras.update(result.extras)


def cmd_conlon(args, report):
    seed = _seed(args)
    report.inputs.update({"t": args.t, "size": args.size, "seed": seed, "max_attempts": args.max_attempts})
    sidon = sample_sidon(args.t, args.size, seed, args.max_attempts)
    _pipeline_report(conlon_pipeline(sidon), report)


def cmd_three_product(args, report):
    spec = load_three_product_spec(args.spec)
    report.inputs["spec"] = spec.to_dict()
    _pipeline_report(three_product_pipeline(spec), report)


def cmd_walk(args, report):
    seed = _seed(args)
    report.inputs.update({"steps": args.steps, "trials": args.trials, "seed": seed, "start": args.start})
    if len(args.inputs) == 1:
        graph = read_edge_list(args.inputs[0])
        report.inputs["graph"] = args.inputs[0]
    elif len(args.inputs) == 2:
        args.group, args.triples = args.inputs
        H = _structure(args, report)
        if H is None:
            return
        graph = Pipeline.build(H).gwalk.graph
    else:
        raise ConfigurationError("walk takes GROUP TRIPLES or a single edge-list file")
    curve = simulate_walk(graph, args.steps, args.trials, seed, args.start, args.threads)
    Path(args.csv).write_text(curve.to_csv())
    report.mixing_curve = args.csv
    lam = spectral_lambda(graph).lam
    # ||p_t - u||_1 <= sqrt(n) ||p_t - u||_2 <= sqrt(n) lam^t
    slack = 0.0 if args.trials == 0 else hoeffding_envelope(args.trials)
    envelope = [0.5 * math.sqrt(graph.vertex_count) * lam ** t + slack for t in range(args.steps + 1)]
    worst = max(range(args.steps + 1), key=lambda t: curve.tv[t] - envelope[t])
    report.spectra = {"lambda": lam}
    report.bounds.append(BoundCheck.leq("tv_envelope", curve.tv[worst], envelope[worst]).to_dict())
    report.extras.update({"final_tv": curve.tv[-1], "vertex_count": graph.vertex_count,
                          "sampling_envelope": slack})


def cmd_lift(args, report):
    H = _structure(args, report)
    if H is None:
        return
    p = Pipeline.build(H)
    rep = p.rep
    if args.blue:
        doc = json.loads(Path(args.blue).read_text())
        blue = doc["blue"] if isinstance(doc, dict) else doc
        report.inputs["blue"] = args.blue
        rep = rep.with_blue(blue)
    report.lemmas.append(verify_lift(H, rep, p.gwalk).to_dict())


def cmd_export(args, report):
    H = _structure(args, report)
    if H is None:
        return
    p = Pipeline.build(H)
    header = None
    if args.what == "L":
        g = p.L
    elif args.what == "gcay":
        g = p.gcay
    elif args.what == "gwalk":
        g = p.gwalk.graph
    elif args.what == "rep":
        g, header = replacement_graph(p.rep), format_rep_header(p.rep)
    else:
        g, header = zigzag_operator(p.rep), format_rep_header(p.rep)
    if not args.out:
        raise ConfigurationError("export needs --out for the edge list")
    Path(args.out).write_text(format_edge_list(g, header))
    args.out = None  # report goes to stdout
    report.extras.update({"what": args.what, "vertex_count": g.vertex_count, "edge_count": g.edge_count})


COMMANDS = {"check": cmd_check, "certify": cmd_certify, "conlon": cmd_conlon,
            "three-product": cmd_three_product, "walk": cmd_walk, "lift": cmd_lift, "export": cmd_export}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report = Report(command=args.command)
    try:
        COMMANDS[args.command](args, report)
        if report.exit_code == EXIT_OK and not report.passed:
            report.exit_code = EXIT_FAILURE
            failed = [b["name"] for b in report.bounds if not b["pass"]]
            failed += [l["name"] for l in report.lemmas if not l["passed"]]
            report.message = f"failed: {', '.join(failed)}"
    except NumericalError as exc:
        report.exit_code, report.message = EXIT_NUMERICAL, str(exc)
    except (SamplingError, StructuralError) as exc:
        report.exit_code, report.message = EXIT_FAILURE, str(exc)
        if getattr(exc, "report", None) is not None:
            report.conditions = exc.report.to_dict()
        if getattr(exc, "witness", None) is not None:
            report.extras["witness"] = exc.witness
    except (ConfigurationError, DomainError, OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        print(f"triplet-hde: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TripletError as exc:
        report.exit_code, report.message = EXIT_FAILURE, str(exc)
    if not args.deterministic:
        report.stamp()
    text = report.to_json()
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if report.message and report.exit_code != EXIT_OK:
        print(f"triplet-hde: {report.message}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
