"""Economic dispatch benchmark harness for few-shot LLM prompting."""

__version__ = "0.1.0"
