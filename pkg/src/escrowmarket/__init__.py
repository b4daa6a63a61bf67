"""Desk-scale P2P marketplace with escrowed shipping.

Token ledger, the full order/escrow state machine, sealed-envelope address
privacy, an event-sourced node with an HTTP wire API, a role CLI, and a
deterministic adversarial scenario harness.
"""

from .config import NodeConfig, load_config
from .contract import Market, OrderState
from .errors import ERROR_CODES, MarketError
from .node import Node, state_hash_of
from .scenarios import Params, Scenario, builtin_scenario, list_builtin, run_scenario

__version__ = "0.1.0"

__all__ = [
    "ERROR_CODES",
    "Market",
    "MarketError",
    "Node",
    "NodeConfig",
    "OrderState",
    "Params",
    "Scenario",
    "builtin_scenario",
    "list_builtin",
    "load_config",
    "run_scenario",
    "state_hash_of",
    "__version__",
]
