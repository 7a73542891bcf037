"""Signal domain types."""
