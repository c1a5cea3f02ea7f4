"""Evidence for the absence of an effect in original/replication study pairs."""

__version__ = "0.1.0"
