"""Command-line interface: ``capsched check|analyze|simulate|gantt``.

Exit status is 0 on success, 1 when the model is rejected or a deadline can
be missed, and 2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional, Sequence

from . import __version__, gantt, report
from .analysis import AnalysisConfig, analyze
from .dsl import ParseError, ParsedModel, parse_document
from .model import validate
from .sim import Scenario, adversarial_scenario, random_scenario, simulate, sweep
from .sim.scenario import default_duration

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Failure(Exception):
    def __init__(self, status: int):
        self.status = status


def _load(path: str, err) -> ParsedModel:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"{path}: {exc.strerror or exc}", file=err)
        raise _Failure(EXIT_USAGE) from None
    try:
        return parse_document(text)
    except ParseError as exc:
        print(f"{path}:{exc}", file=err)
        raise _Failure(EXIT_FAIL) from None


def _validated(path: str, err) -> ParsedModel:
    doc = _load(path, err)
    rep = validate(doc.model)
    for d in rep.diagnostics:
        span = doc.spans.get(d.subject)
        where = f"{path}:{span}" if span else path
        print(f"{where}: {d}", file=err)
    if not rep.ok:
        raise _Failure(EXIT_FAIL)
    return doc


def cmd_check(args, out, err) -> int:
    doc = _validated(args.model, err)
    m = doc.model
    print(f"{args.model}: ok ({len(m.transactions)} transactions, {len(m.actions)} actions, "
          f"{len(m.events)} events)", file=out)
    return EXIT_OK


def _fmt(v) -> str:
    return "-" if v is None else str(v)


def cmd_analyze(args, out, err) -> int:
    model = _validated(args.model, err).model
    try:
        config = AnalysisConfig(max_window=args.max_window, stages=args.stages)
    except ValueError as exc:
        print(f"capsched: {exc}", file=err)
        return EXIT_USAGE
    rep = analyze(model, config)
    if args.format == "json":
        out.write(report.emit(report.from_analysis(rep)))
    else:
        u = rep.utilization
        print(f"model: {rep.model}", file=out)
        print(f"utilization: {u.numerator}/{u.denominator} ({float(u):.6f})", file=out)
        rows = [("transaction", "wcrt", "deadline", "blocking", "instances", "verdict")]
        rows += [(r.transaction, _fmt(r.wcrt), str(r.deadline), str(r.blocking),
                  str(r.instances_examined), r.verdict) for r in rep.results]
        _table(rows, out)
        if rep.stages is not None:
            print("", file=out)
            rows = [("job", "transaction", "jitter", "wcrt")]
            rows += [(s.root, s.transaction, _fmt(s.jitter), _fmt(s.wcrt)) for s in rep.stages]
            _table(rows, out)
        print(f"overall: {rep.verdict}", file=out)
    return EXIT_OK if rep.schedulable else EXIT_FAIL


def _table(rows: List[Sequence[str]], out) -> None:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        print("  ".join(cells).rstrip(), file=out)


def cmd_simulate(args, out, err) -> int:
    model = _validated(args.model, err).model
    bounds = analyze(model).wcrts()
    deadlines = {t.id: t.deadline for t in model.transactions}
    if args.adversarial:
        trace = simulate(model, adversarial_scenario(model, args.duration))
        if args.trace:
            _write(args.trace, trace.to_lines(), err)
        peak = trace.max_responses()
        missed = {t.id: 0 for t in model.transactions}
        for inst in trace.misses():
            missed[inst.transaction] += 1
        header = "scenarios: 1 (adversarial)"
    else:
        if args.scenarios < 1:
            print("capsched: --scenarios must be >= 1", file=err)
            return EXIT_USAGE
        summary = sweep(model, args.scenarios, seed=args.seed, duration=args.duration,
                        jitter=args.jitter)
        peak, missed = summary.max_response, summary.misses
        header = f"scenarios: {summary.scenarios} (seed {args.seed}, jitter {args.jitter})"
    print(f"model: {model.name}", file=out)
    print(header, file=out)
    rows = [("transaction", "max_response", "wcrt", "deadline", "misses")]
    rows += [(t.id, _fmt(peak.get(t.id)), _fmt(bounds[t.id]), str(deadlines[t.id]),
              str(missed.get(t.id, 0))) for t in model.transactions]
    _table(rows, out)
    total = sum(missed.values())
    print(f"overall: {'no deadline misses' if total == 0 else f'{total} deadline misses'}", file=out)
    return EXIT_OK if total == 0 else EXIT_FAIL


def _write(path: str, text: str, err) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"{path}: {exc.strerror or exc}", file=err)
        raise _Failure(EXIT_USAGE) from None


def cmd_gantt(args, out, err) -> int:
    model = _validated(args.model, err).model
    duration = args.duration
    if duration is None:
        duration = min(default_duration(model),
                       max(model.pattern(t.id).outer_period for t in model.transactions))
    if args.scenario == "adversarial":
        scn = adversarial_scenario(model, duration)
    elif args.scenario == "random":
        scn = random_scenario(model, args.seed, duration)
    else:
        scn = Scenario(duration)
    trace = simulate(model, scn)
    if args.format == "text":
        text = gantt.render_text(trace)
    else:
        text = gantt.render_svg(trace, title=f"{model.name} ({args.scenario})")
    if args.out:
        _write(args.out, text, err)
    else:
        out.write(text)
    return EXIT_OK


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="capsched", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"capsched {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="parse and validate a model")
    c.add_argument("model")
    c.set_defaults(func=cmd_check)

    a = sub.add_parser("analyze", help="worst-case response times")
    a.add_argument("model")
    a.add_argument("--format", choices=("text", "json"), default="text")
    a.add_argument("--max-window", type=_positive, default=None,
                   help="busy-period bound in ticks (default: 10 x hyperperiod)")
    a.add_argument("--stages", action="store_true", help="also report per-job response bounds")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="run seeded scenarios through the simulator")
    s.add_argument("model")
    s.add_argument("--duration", type=_positive, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--scenarios", type=int, default=100)
    s.add_argument("--jitter", choices=("zero", "max", "random"), default="random")
    s.add_argument("--adversarial", action="store_true",
                   help="run only the constructed worst-phasing scenario")
    s.add_argument("--trace", metavar="PATH", help="with --adversarial, write the event trace here")
    s.set_defaults(func=cmd_simulate)

    g = sub.add_parser("gantt", help="draw a simulated schedule")
    g.add_argument("model")
    g.add_argument("--scenario", choices=("adversarial", "zero", "random"), default="adversarial")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--duration", type=_positive, default=None)
    g.add_argument("--format", choices=("svg", "text"), default="svg")
    g.add_argument("--out", metavar="PATH")
    g.set_defaults(func=cmd_gantt)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args, out, err)
    except _Failure as f:
        return f.status


if __name__ == "__main__":
    sys.exit(main())
