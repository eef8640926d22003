import logging

from decouple import config

LOG_LEVEL = config("DISPATCHCALC_LOG_LEVEL", default=logging.getLevelName(logging.INFO))

LLM_MAX_RETRIES = config("LLM_MAX_RETRIES", default=5, cast=int)
LLM_BACKOFF_INITIAL = config("LLM_BACKOFF_INITIAL", default=1.0, cast=float)
LLM_BACKOFF_MAX = config("LLM_BACKOFF_MAX", default=30.0, cast=float)
LLM_MAX_IN_FLIGHT = max(config("LLM_MAX_IN_FLIGHT", default=2, cast=int), 1)
LLM_TIMEOUT = config("LLM_TIMEOUT", default=300.0, cast=float)
