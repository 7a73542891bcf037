"""Scheduler domain types."""
