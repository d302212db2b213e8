"""Load a demo config and run its sweep with the CLI machinery."""

from pathlib import Path

from wgqed.cli import parse_config, run_sweep

CONFIGS = Path(__file__).with_name("configs")


def sweep(name, subcommand):
    spec = parse_config((CONFIGS / name).read_text(), subcommand).sweep
    return spec, run_sweep(spec)


def column(rows, key):
    return [r.columns[key] for r in rows]
