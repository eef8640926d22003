import pytest

from dispatchcalc.llm.replay import ReplayStore
from dispatchcalc.prompt.few_shot import FewShotSet, build_few_shot_set
from dispatchcalc.system.loader import load_bundled_system
from dispatchcalc.system.model import PowerSystem

from .common import prompt_dispatches


@pytest.fixture(scope="session")
def system() -> PowerSystem:
    """The bundled IEEE 118-bus system"""
    return load_bundled_system()


@pytest.fixture(scope="session")
def few_shot(system: PowerSystem) -> FewShotSet:
    """Solver generated examples at the default few-shot demands"""
    return build_few_shot_set(system)


@pytest.fixture(scope="session")
def published_few_shot(system: PowerSystem) -> FewShotSet:
    """The in-context examples exactly as printed in the published prompt"""
    return FewShotSet.from_dispatches(system, prompt_dispatches())


@pytest.fixture
def replay_store(tmp_path) -> ReplayStore:
    return ReplayStore.open(tmp_path / "replay.jsonl", create=True)
