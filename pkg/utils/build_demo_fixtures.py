"""Fill the replay store of a run config with exact-solver answers for every cell."""

import argparse
import logging
import sys

from dispatchcalc.benchmark.fixtures import record_oracle_exchanges
from dispatchcalc.benchmark.run_config import load_run_config
from dispatchcalc.errors import DispatchCalcError
from dispatchcalc.llm.replay import ReplayStore

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
)

_LOGGER = logging.getLogger("build_demo_fixtures")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default="demo/bench.toml")
    parser.add_argument(
        "--append",
        action="store_true",
        help="Keep existing records instead of starting a new store",
    )
    args = parser.parse_args()

    try:
        run_config = load_run_config(args.config)
        if run_config.replay_path is None:
            raise DispatchCalcError("The run config has no replay_path")
        if run_config.replay_path.exists() and not args.append:
            run_config.replay_path.unlink()
        system = run_config.load_system()
        store = ReplayStore.open(run_config.replay_path, create=True)
        record_oracle_exchanges(
            system,
            store,
            run_config.scenario(system),
            [model.name for model in run_config.models],
            run_config.strategies,
        )
    except DispatchCalcError as err:
        _LOGGER.error(err)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
