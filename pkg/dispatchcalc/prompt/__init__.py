"""Few-shot example sets, prompt rendering and response parsing."""

from .few_shot import (
    FewShotExample,
    FewShotSet,
    ScenarioSpec,
    build_few_shot_set,
    random_eval_pds,
    round_dispatch,
)
from .parser import ParsedResponse, parse_response
from .template import TEMPLATE_VERSION, PromptBundle, render_prompt

__all__ = [
    "FewShotExample",
    "FewShotSet",
    "ParsedResponse",
    "PromptBundle",
    "ScenarioSpec",
    "TEMPLATE_VERSION",
    "build_few_shot_set",
    "parse_response",
    "random_eval_pds",
    "render_prompt",
    "round_dispatch",
]
