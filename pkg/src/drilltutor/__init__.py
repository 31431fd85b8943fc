"""Pattern drill tutor.

Language tutoring built on sentence pattern drills: a goal-indexed pattern
inventory, drill sessions with self-reported scoring, corpus mining for new
patterns and values, and an expert/student HTTP service on top.
"""

__version__ = "0.1.0"

from .patterns import (  # noqa: F401
    Binding,
    LexicalValue,
    MatchLimits,
    PatternTemplate,
    Variable,
    enumerate_sentences,
    instantiate,
    match,
    parse_template,
    unparse,
)
