"""Generators that turn an annotated grammar into ANTLR 3 input."""

from .antlr import AntlrGenConfig, generate, substitute_action
from .builders import (BuilderGenConfig, BuilderSignature, Call, generate_builders, parse_builders,
                       parse_call)

__all__ = [
    "AntlrGenConfig", "generate", "substitute_action", "BuilderGenConfig", "BuilderSignature",
    "Call", "generate_builders", "parse_builders", "parse_call",
]
