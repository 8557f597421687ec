"""Generic entity/milieu/update-function metamodel with cellular automaton and
threshold-network instantiations and random-restart search experiments."""
from .core import (
    BINARY,
    REAL,
    MetastableSystem,
    MilieuMatrix,
    MilieuView,
    StateDomain,
    System,
    Trace,
    UpdateFunction,
    compose_system,
    milieu_of,
    parameterize,
    run,
    step,
)
from .errors import *  # noqa: F401,F403

__version__ = "0.1.0"
