"""Memory planner domain types."""
