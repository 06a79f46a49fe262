"""Primary adapters."""
