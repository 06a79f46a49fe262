"""Domain layer - Pure numerical logic."""
