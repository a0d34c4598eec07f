"""Two-stage assessment workflow with human approval gates."""

__version__ = "0.1.0"
