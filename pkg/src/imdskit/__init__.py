"""Verification workbench for server/agent-view models of distributed systems."""

from .model import (Action, Configuration, Message, ServerDecl, ServerState,
                    SystemModel, apply_action, config_text,
                    enabled_actions, initial_configuration, validate_model)
from .parser import parse, parse_file, render
from .explore import Limits, LimitExceeded
from .lts import Lts, build_lts, shortest_path

__all__ = [
    "Action", "Configuration", "Message", "ServerDecl", "ServerState",
    "SystemModel", "apply_action", "config_text", "enabled_actions",
    "initial_configuration", "validate_model", "parse", "parse_file",
    "render", "Limits", "LimitExceeded", "Lts", "build_lts", "shortest_path",
]
