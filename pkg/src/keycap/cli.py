"""Command line entry points.

    keycap serve           run the verification service
    keycap experiment run  run a seeded adversarial evaluation
    keycap trace synth     print one synthetic trace as JSON
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import (
    BotStrategy,
    ExperimentConfig,
    HumanProfile,
    STRATEGY_HUMAN,
    emit_report,
    run_experiment,
    synthesize_bot_trace,
    synthesize_human_trace,
    write_trial_records,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="keycap")
    top = parser.add_subparsers(dest="command", required=True)

    serve = top.add_parser("serve", help="run the verification service")
    serve.add_argument("--config", help="JSON config file")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    serve.add_argument("--ttl-ms", type=float, dest="ttl_ms")
    serve.add_argument("--capacity", type=int)
    serve.add_argument("--seed", type=int)
    serve.add_argument("--template-bank", dest="template_bank")
    serve.add_argument("--static-dir", dest="static_dir")
    serve.add_argument("--provider-url", dest="provider_url")
    serve.add_argument(
        "--provider-timeout-ms", type=float, dest="provider_timeout_ms"
    )

    experiment = top.add_parser("experiment", help="adversarial evaluation")
    experiment_sub = experiment.add_subparsers(dest="experiment_command", required=True)
    run = experiment_sub.add_parser("run", help="run an experiment config")
    run.add_argument("--config", required=True, help="experiment JSON config")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--format", choices=["text", "csv"], default="text")
    run.add_argument("--out", help="write trial records as JSONL here")
    run.add_argument(
        "--http",
        metavar="BASE_URL",
        help="drive a live service at BASE_URL instead of the in-process path",
    )

    trace = top.add_parser("trace", help="trace synthesis")
    trace_sub = trace.add_subparsers(dest="trace_command", required=True)
    synth = trace_sub.add_parser("synth", help="synthesize one trace")
    synth.add_argument(
        "--strategy",
        required=True,
        choices=["paste", "fixed_delay", "random_delay", "human"],
    )
    synth.add_argument("--answer", required=True)
    synth.add_argument("--delay-ms", type=float, default=50.0, dest="delay_ms")
    synth.add_argument("--mean-ms", type=float, default=180.0, dest="mean_ms")
    synth.add_argument("--stddev-ms", type=float, default=60.0, dest="stddev_ms")
    synth.add_argument("--seed", type=int, default=0)

    return parser


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .config import build_service, load_config
    from .server import create_app

    overrides = {
        key: value
        for key, value in (
            ("host", args.host),
            ("port", args.port),
            ("ttl_ms", args.ttl_ms),
            ("capacity", args.capacity),
            ("seed", args.seed),
            ("template_bank", args.template_bank),
            ("static_dir", args.static_dir),
        )
        if value is not None
    }
    provider = {}
    if args.provider_url is not None:
        provider = {"enabled": True, "endpoint_url": args.provider_url}
    if args.provider_timeout_ms is not None:
        provider["timeout_ms"] = args.provider_timeout_ms
    if provider:
        overrides["provider"] = provider
    cfg = load_config(args.config, overrides=overrides)
    service = build_service(cfg)
    app = create_app(service, static_dir=cfg.static_dir, sweep_interval_s=cfg.sweep_interval_s)
    uvicorn.run(app, host=cfg.host, port=cfg.port)
    return 0


def _cmd_experiment_run(args: argparse.Namespace) -> int:
    with open(args.config, encoding="utf-8") as fh:
        data = json.load(fh)
    if args.seed is not None:
        data["seed"] = args.seed
    if args.http:
        data["challenge_source"] = "http"
        data["http_base_url"] = args.http
    config = ExperimentConfig.from_dict(data)
    report, records = run_experiment(config)
    fmt = "csv" if args.format == "csv" else "text_table"
    sys.stdout.write(emit_report(report, fmt))
    if args.out:
        write_trial_records(records, args.out)
    return 0


def _cmd_trace_synth(args: argparse.Namespace) -> int:
    if args.strategy == STRATEGY_HUMAN:
        trace = synthesize_human_trace(
            args.answer,
            args.seed,
            HumanProfile(mean_gap_ms=args.mean_ms, gap_stddev_ms=args.stddev_ms),
        )
    else:
        strategy = BotStrategy(
            kind=args.strategy,
            delay_ms=args.delay_ms,
            delay_mean_ms=args.mean_ms,
            delay_stddev_ms=args.stddev_ms,
            rng_seed=args.seed,
        )
        trace = synthesize_bot_trace(strategy, args.answer)
    json.dump(trace.to_dict(), sys.stdout)
    sys.stdout.write("\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        return _cmd_serve(args)
    if args.command == "experiment":
        return _cmd_experiment_run(args)
    return _cmd_trace_synth(args)


if __name__ == "__main__":
    sys.exit(main())
