"""Command line interface.

    tomsim run <scenario.tom> [--script events.evt] [--trace out] [--ticks N]
    tomsim check <scenario.tom>
    tomsim oracle --worlds N --atoms A
    tomsim serve <scenario.tom> [--port P] [--profile A|B|C|random] [--seed S]

Exit codes: 0 success, 1 diagnostics, 2 runtime error. An events file has
one event per line, `TICK: <actor,recipient,act>`, with `#` comments.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .engine import EngineError, run_script
from .parsing import FormulaError, FormulaParser, TokenStream, tokenize
from .scenario import ScenarioError, load_scenario


def parse_events_file(text: str):
    """Per-tick event batches from a script file."""
    batches: dict[int, list] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ValueError(f"line {lineno}: expected 'TICK: <event>'")
        tick_text, event_text = line.split(":", 1)
        try:
            tick = int(tick_text.strip())
        except ValueError:
            raise ValueError(f"line {lineno}: bad tick number {tick_text.strip()!r}") from None
        ts = TokenStream(tokenize(event_text.strip()))
        event = FormulaParser(ts).event()
        if ts.peek().kind != "EOF":
            raise ValueError(f"line {lineno}: trailing input after event")
        batches.setdefault(tick, []).append(event)
    if not batches:
        return []
    top = max(batches)
    return [batches.get(t, []) for t in range(top + 1)]


def _cmd_run(args) -> int:
    try:
        doc = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(exc, file=sys.stderr)
        return 1
    script = []
    if args.script:
        try:
            script = parse_events_file(Path(args.script).read_text(encoding="utf-8"))
        except (ValueError, FormulaError) as exc:
            print(f"{args.script}: {exc}", file=sys.stderr)
            return 1
    try:
        trace = run_script(doc, script, ticks=args.ticks, owner=args.agent)
    except EngineError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return 2
    text = trace.text()
    if args.trace:
        Path(args.trace).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_check(args) -> int:
    try:
        doc = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print(exc, file=sys.stderr)
        return 2
    print(
        f"{args.scenario}: ok ({len(doc.agents)} agents, {len(doc.initial_facts)} facts, "
        f"{len(doc.rules)} rules, {len(doc.topics)} topics, {len(doc.profiles)} profiles)"
    )
    return 0


def _cmd_oracle(args) -> int:
    from .worlds import sweep_belief_laws

    try:
        report = sweep_belief_laws(args.atoms, args.worlds)
    except ValueError as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
        return 2
    print(f"checked {report.models} models: {len(report.violations)} violations")
    for violation in report.violations[:50]:
        print(f"  {violation}")
    return 0 if report.ok else 1


def _cmd_serve(args) -> int:
    try:
        doc = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(exc, file=sys.stderr)
        return 1
    import uvicorn

    from .service import create_app

    app = create_app(doc, default_profile=args.profile, seed=args.seed)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="tomsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario deterministically")
    p_run.add_argument("scenario")
    p_run.add_argument("--script", help="per-tick events file")
    p_run.add_argument("--trace", help="write the trace here instead of stdout")
    p_run.add_argument("--ticks", type=int, default=None)
    p_run.add_argument("--agent", default=None, help="which agent's engine to run")
    p_run.set_defaults(func=_cmd_run)

    p_check = sub.add_parser("check", help="parse and validate a scenario")
    p_check.add_argument("scenario")
    p_check.set_defaults(func=_cmd_check)

    p_oracle = sub.add_parser("oracle", help="sweep the belief laws on finite models")
    p_oracle.add_argument("--worlds", type=int, default=3)
    p_oracle.add_argument("--atoms", type=int, default=2)
    p_oracle.set_defaults(func=_cmd_oracle)

    p_serve = sub.add_parser("serve", help="start the interview session service")
    p_serve.add_argument("scenario")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--profile", default="random", choices=["A", "B", "C", "random"])
    p_serve.add_argument("--seed", type=int, default=None)
    p_serve.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not crashes
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
