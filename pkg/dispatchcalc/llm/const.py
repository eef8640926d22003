CHAT_COMPLETIONS_PATH = "chat/completions"

DEFAULT_TEMPERATURE = 1.0

AUTH_FAILURE_STATUSES = (401, 403)
RATE_LIMIT_STATUS = 429
