"""The dispatchcalc constants."""

from enum import Enum

BALANCE_TOL = 1e-6
KKT_TOL = 1e-6
REPAIR_TOL = 1e-9

BUNDLED_SYSTEM_FILE = "ieee118_gen19.csv"

SYSTEM_FIELDS = ("bus", "p_min", "p_max", "a", "b", "c")

DEFAULT_FEW_SHOT_PDS = (700.0, 2150.0, 3600.0, 5050.0, 6500.0)
DEFAULT_EVAL_PDS = (
    727.0,
    1257.0,
    2802.0,
    3227.0,
    3747.0,
    3951.0,
    4398.0,
    5627.0,
    5917.0,
    6122.0,
)
DEFAULT_MODELS = ("o3-mini-high", "o3-mini", "o1", "deepseek-r1")

GA_BASELINE_MODEL = "ga-baseline"


class PromptStrategy(str, Enum):
    NON_EVOLUTIONARY = "non-evolutionary"
    EVOLUTIONARY = "evolutionary"


class CrossoverMode(str, Enum):
    UNIFORM = "uniform"
    SINGLE_POINT = "single-point"


class SelectionSource(str, Enum):
    """Where the two parents of every candidate are drawn from"""

    PARENTS = "parents"
    POPULATION = "population"


class BackendType(str, Enum):
    LIVE = "live"
    REPLAY = "replay"


class Binding(str, Enum):
    MIN = "min"
    MAX = "max"
    INTERIOR = "interior"


CONF_SYSTEM = "system"
CONF_FEW_SHOT_PDS = "few_shot_pds"
CONF_EVAL_PDS = "eval_pds"
CONF_STRATEGIES = "strategies"
CONF_BACKEND = "backend"
CONF_REPLAY_PATH = "replay_path"
CONF_RECORD = "record"
CONF_OUTPUT_DIR = "output_dir"
CONF_SEED = "seed"
CONF_MAX_IN_FLIGHT = "max_in_flight"
CONF_INCLUDE_CONSTANTS = "include_constants"
CONF_GA_BASELINE = "ga_baseline"
CONF_GA = "ga"
CONF_SINGLE_PASS = "single_pass"
CONF_MODELS = "models"
CONF_NAME = "name"
CONF_ENDPOINT = "endpoint"
CONF_API_KEY_ENV = "api_key_env"
CONF_TEMPERATURE = "temperature"
CONF_MAX_TOKENS = "max_tokens"
CONF_TIMEOUT = "timeout"
CONF_EXTRA = "extra"

DEFAULT_SEED = 42
DEFAULT_OUTPUT_DIR = "output"
