"""Infrastructure layer - logging, configuration, metrics."""
