"""
Prompt texts for the two few-shot strategies.

The wording is versioned: every change to a text block below must bump
TEMPLATE_VERSION, which is part of each prompt fingerprint and therefore of
every replay store key.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

from ..const import PromptStrategy
from ..errors import InfeasibleDemandError
from ..system.model import PowerSystem
from .few_shot import FewShotSet

TEMPLATE_VERSION = "1"

SECTION_PROBLEM = "Description of Problem"
SECTION_EXAMPLES = "In-Context Examples (Population)"
SECTION_TASK = {
    PromptStrategy.NON_EVOLUTIONARY: "Non-Evolutionary Algorithm Task Instruction",
    PromptStrategy.EVOLUTIONARY: "Evolutionary Algorithm Task Instruction",
}

PROBLEM_DESCRIPTION = (
    "You are provided with a set of optimal generation dispatches (PG) for various loading "
    "scenarios, each associated with a specific total load demand (PD) and the corresponding "
    "minimum cost. The goal is to determine a new generation dispatch list for a total load "
    "demand, ensuring that the sum of the generation values equals the load demand while "
    "maintaining economic efficiency."
)

NON_EVOLUTIONARY_INSTRUCTION = (
    "Generate a new list of generation dispatches PG for a total load demand PD = {pd} MW. "
    "The solution should follow the trend observed in the given data, maintaining "
    "proportionality and logical scaling of generator contributions with minimum cost value."
)

EVOLUTIONARY_LEAD_IN = (
    "Generate a new list of generation dispatches PG for a total load demand PD = {pd} MW "
    "by following these steps:"
)
EVOLUTIONARY_STEPS = (
    "Choose two dispatch scenarios from the provided data. These sets serve as parent "
    "solutions for generating a new candidate.",
    "Combine elements from the two selected parent dispatches to form a new candidate dispatch.",
    "Mutate the candidate dispatch obtained from the crossover.",
    "Repeat the selection, crossover, and mutation steps until you generate 10 candidate "
    "dispatch sets.",
    "Evaluate these 10 candidates based on their estimated cost, then select the best "
    "solution and provide its vector form.",
)
EVOLUTIONARY_NOTE = (
    "Note: Do not include any code; ensure the solution maintains exact power balance and "
    "respects the observed generator limits."
)


@dataclass(frozen=True)
class PromptBundle:
    strategy: PromptStrategy
    target_pd: float
    text: str
    fingerprint: str

    def to_record(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "target_pd": self.target_pd,
            "text": self.text,
            "fingerprint": self.fingerprint,
        }

    def write_text(self, path: str | os.PathLike) -> None:
        """Export the prompt for pasting into a web chat"""
        with open(path, "w", encoding="utf-8", newline="\n") as file:
            file.write(self.text)


def format_number(value: float) -> str:
    """At most two decimals, no trailing zeros: 700 -> '700', 59.420 -> '59.42'"""
    text = f"{value:.2f}".rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


def format_vector(values) -> str:
    return "[" + ", ".join(format_number(value) for value in values) + "]"


def prompt_fingerprint(
    strategy: PromptStrategy, target_pd: float, few_shot: FewShotSet
) -> str:
    canonical = json.dumps(
        {
            "template_version": TEMPLATE_VERSION,
            "strategy": PromptStrategy(strategy).value,
            "target_pd": float(target_pd),
            "examples": [
                {
                    "pd": example.pd,
                    "cost": example.cost,
                    "pg": list(example.dispatch.pg),
                }
                for example in few_shot
            ],
        },
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def render_prompt(
    system: PowerSystem,
    few_shot: FewShotSet,
    target_pd: float,
    strategy: PromptStrategy,
) -> PromptBundle:
    strategy = PromptStrategy(strategy)
    if not system.is_feasible_demand(target_pd):
        raise InfeasibleDemandError(target_pd, system.pd_min, system.pd_max)
    for example in few_shot:
        system.check_dispatch(example.dispatch)

    pd_text = format_number(target_pd)
    lines = [SECTION_PROBLEM, PROBLEM_DESCRIPTION, "", SECTION_EXAMPLES]
    for index, example in enumerate(few_shot):
        if index:
            lines.append("")
        lines.append(
            f"PD = {format_number(example.pd)} MW, Cost = {format_number(example.cost)}"
        )
        lines.append(f"PG = {format_vector(example.dispatch.pg)}")

    lines += ["", SECTION_TASK[strategy]]
    if strategy == PromptStrategy.NON_EVOLUTIONARY:
        lines.append(NON_EVOLUTIONARY_INSTRUCTION.format(pd=pd_text))
    else:
        lines.append(EVOLUTIONARY_LEAD_IN.format(pd=pd_text))
        lines += [f"{number}. {step}" for number, step in enumerate(EVOLUTIONARY_STEPS, 1)]
        lines += ["", EVOLUTIONARY_NOTE]

    return PromptBundle(
        strategy=strategy,
        target_pd=float(target_pd),
        text="\n".join(lines) + "\n",
        fingerprint=prompt_fingerprint(strategy, target_pd, few_shot),
    )
