"""Statistical models: coordinate fixed-point operators and variational objectives.

Each model module exposes the same surface, so the solver can drive any of
them generically:

* ``State`` dataclass with an ``xi_y`` field (mean of the tilted predictive),
* ``init_state(data, prior)``,
* ``fixed_point_step(state, data, prior, delta, lam)``,
* ``objective(state, data, prior, delta, lam)``,
* ``state_change(a, b)`` (max-norm parameter movement between two states).
"""

from __future__ import annotations

from . import ar, gg, gp, gw
from .asymptotics import markowitz_plugin_target

_REGISTRY = {"gw": gw, "ar": ar, "gp": gp, "gg": gg}

MODEL_NAMES = tuple(sorted(_REGISTRY))


def get_model(name):
    """Resolve a model name to its module."""
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; expected one of {MODEL_NAMES}") from None


__all__ = [
    "MODEL_NAMES",
    "ar",
    "gg",
    "gp",
    "gw",
    "get_model",
    "markowitz_plugin_target",
]
