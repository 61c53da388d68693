"""Command-line launcher: model-backed serving or fixture echo mode."""

from __future__ import annotations

import dataclasses

import click
import uvicorn

from .config import load_config
from .service import build_state, create_app, echo_mode

_DEFAULT_ECHO_PORT = 8601


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON config file; BPB_ADAPTER_* env vars override its values.",
)
@click.option(
    "--echo",
    "fixtures",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Serve lookups from this fixture file instead of loading models.",
)
@click.option(
    "--strict/--lenient",
    default=False,
    show_default=True,
    help="In echo mode, reply 404 on fixture misses instead of empty answers.",
)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None, help="Override the configured port.")
def main(config_path, fixtures, strict, host, port):
    """Serve reading, question-generation, and parsing models over HTTP."""
    if fixtures is not None:
        try:
            app = echo_mode(fixtures, strict=strict)
        except (OSError, ValueError) as exc:
            raise click.ClickException(str(exc)) from exc
        uvicorn.run(app, host=host, port=port or _DEFAULT_ECHO_PORT)
        return
    try:
        config = load_config(config_path)
        if port is not None:
            config = dataclasses.replace(config, port=port)
    except (OSError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    uvicorn.run(create_app(build_state(config)), host=host, port=config.port)


if __name__ == "__main__":
    main()
