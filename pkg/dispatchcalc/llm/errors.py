from __future__ import annotations

import os


class LlmError(Exception):
    """Raised when a completion could not be obtained from a model."""

    def __init__(self, message: str, model: str | None = None):
        self.model = model
        if model:
            message = f"{model}: {message}"
        super().__init__(message)


class LlmTransportError(LlmError):
    pass


class LlmAuthError(LlmError):
    pass


class LlmTimeoutError(LlmError):
    pass


class LlmRateLimitError(LlmError):
    pass


class FixtureMissError(LlmError):
    def __init__(self, fingerprint: str, model: str):
        self.fingerprint = fingerprint
        super().__init__(f"No recorded response for prompt {fingerprint}", model)


class ReplayStoreNotFoundError(LlmError):
    def __init__(self, path: str | os.PathLike):
        self.path = os.fspath(path)
        super().__init__(f"Replay store {self.path} does not exist")


class CredentialMissingError(LlmError):
    def __init__(self, env_var: str, model: str | None = None):
        self.env_var = env_var
        super().__init__(f"Environment variable {env_var} with the API key is not set", model)
