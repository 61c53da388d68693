"""Model runners: the user-supplied code behind each endpoint.

A runner wraps whatever model library the user prefers; the service only
needs the three call signatures below. Runners are resolved from import
specs ``"module:factory"`` so deployments can point at their own loaders
without this package depending on any model framework.
"""

from __future__ import annotations

import importlib
import inspect
from typing import Protocol, Sequence


class RCRunner(Protocol):
    def answer(self, question: str, context: str) -> tuple[str, float]:
        """Answer ``question`` against ``context``; returns (text, score)."""


class QGRunner(Protocol):
    def generate(self, steps: Sequence[str]) -> str:
        """Render a decomposition's step texts into one question."""


class ParseRunner(Protocol):
    def parse(self, question: str) -> list[str]:
        """Decompose ``question``; returns the list of step texts."""


def load_runner(model_id: str, *, max_batch: int = 1):
    """Resolve ``"module:factory"`` into a runner instance.

    The factory is called with ``max_batch=<n>`` when its signature accepts
    it (runners that batch internally use it as their cap), otherwise with no
    arguments. It must return an object implementing the endpoint's runner
    protocol.
    """
    module_name, sep, attr = model_id.partition(":")
    if not sep or not module_name or not attr:
        raise ValueError(f"model id {model_id!r} is not of the form 'module:factory'")
    module = importlib.import_module(module_name)
    try:
        factory = getattr(module, attr)
    except AttributeError:
        raise ValueError(f"module {module_name!r} has no attribute {attr!r}") from None
    if not callable(factory):
        raise ValueError(f"{model_id!r} is not callable")
    parameters = inspect.signature(factory).parameters
    accepts_batch = "max_batch" in parameters or any(
        p.kind is inspect.Parameter.VAR_KEYWORD for p in parameters.values()
    )
    return factory(max_batch=max_batch) if accepts_batch else factory()
