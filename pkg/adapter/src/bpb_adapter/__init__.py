"""HTTP adapter for the bpb wire protocols.

Wraps user-supplied reading-comprehension, question-generation, and
decomposition-parsing models (or fixture files, for offline contract tests)
behind the JSON-over-POST endpoints the bpb pipeline's HTTP backends speak.
"""

from .config import AdapterConfig, load_config
from .runners import ParseRunner, QGRunner, RCRunner, load_runner
from .service import (
    FixtureParseBackend,
    ServiceState,
    build_state,
    create_app,
    echo_mode,
    load_fixture_sections,
    serve,
)

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig",
    "FixtureParseBackend",
    "ParseRunner",
    "QGRunner",
    "RCRunner",
    "ServiceState",
    "build_state",
    "create_app",
    "echo_mode",
    "load_config",
    "load_fixture_sections",
    "load_runner",
    "serve",
    "__version__",
]
