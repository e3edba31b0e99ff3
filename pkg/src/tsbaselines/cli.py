"""Command-line interface.

Subcommands mirror the pipeline stages (`ingest`, `fit`, `forecast`,
`evaluate`, `report`, `run`) plus `replay-metrics`, which normalizes a
pre-filled raw metric table without any fitting.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 partial failure
(some tasks errored but the run completed).
"""

from __future__ import annotations

import logging
import sys

import click

from .core import LONG_TERM, SHORT_TERM
from .errors import ConfigError, DataError, TsBaselinesError
from .harness import (
    load_config,
    read_raw_metrics_csv,
    replay_metrics,
    run_experiment,
    write_replay_outputs,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_PARTIAL = 3

PROTOCOLS = {"long": LONG_TERM, "short": SHORT_TERM}


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool):
    """Forecasting baselines and benchmark harness for hourly event streams."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _stage_command(stage: str, help_text: str):
    @click.command(name=stage, help=help_text)
    @click.option("--config", "config_path", required=True, type=click.Path(), help="TOML config.")
    @click.option("--seed", type=int, default=None, help="Override the config seed.")
    @click.option("--strict", is_flag=True, default=None, help="Abort on malformed input lines.")
    @click.option(
        "--protocol", type=click.Choice(sorted(PROTOCOLS)), default=None,
        help="Forecast protocol override.",
    )
    @click.option("--out", type=click.Path(), default=None, help="Output directory override.")
    def command(config_path, seed, strict, protocol, out):
        overrides = {}
        if seed is not None:
            overrides["seed"] = seed
        if strict is not None and strict:
            overrides["strict"] = True
        if protocol is not None:
            overrides["protocol"] = PROTOCOLS[protocol]
        if out is not None:
            overrides["output_dir"] = out
        try:
            config = load_config(config_path, **overrides)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        try:
            manifest = run_experiment(config, stage=stage)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except DataError as exc:
            click.echo(f"data error: {exc}", err=True)
            sys.exit(EXIT_DATA)
        except TsBaselinesError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_DATA)
        failed = [t for t in manifest.tasks if t.status != "ok"]
        for task in failed:
            click.echo(f"task failed: {'/'.join(task.key)}: {task.error}", err=True)
        click.echo(
            f"{stage}: {len(manifest.tasks) - len(failed)}/{len(manifest.tasks)} tasks ok, "
            f"artifacts in {config.output_dir}"
        )
        sys.exit(EXIT_PARTIAL if failed or manifest.failed else EXIT_OK)

    return command


main.add_command(_stage_command("ingest", "Parse event files, bin them, and write ground-truth CSVs."))
main.add_command(_stage_command("fit", "Fit every configured model; write model JSON and grid scores."))
main.add_command(_stage_command("forecast", "Fit and forecast the test window; write forecast CSVs."))
main.add_command(_stage_command("evaluate", "Score all metrics per (topic, model); write metrics.csv."))
main.add_command(_stage_command("report", "Full pipeline plus normalized-error reports and plots."))
main.add_command(_stage_command("run", "Full pipeline: ingest through reports, with a run manifest."))


@main.command("replay-metrics")
@click.option("--table", "table_path", required=True, type=click.Path(),
              help="Raw metric CSV (domain,platform,topic,model,ape,rmse,smape,dtw,ve,ske).")
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
def replay_command(table_path, out):
    """Normalize a pre-filled metric table into ONME reports (no fitting)."""
    try:
        rows = read_raw_metrics_csv(table_path)
        reports, summary = replay_metrics(rows)
    except FileNotFoundError:
        click.echo(f"data error: table not found: {table_path}", err=True)
        sys.exit(EXIT_DATA)
    except (TsBaselinesError, KeyError, ValueError) as exc:
        click.echo(f"data error: {exc}", err=True)
        sys.exit(EXIT_DATA)
    write_replay_outputs(reports, summary, out)
    for name, value in summary.items():
        click.echo(f"{name}: {value:.4f}")
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
