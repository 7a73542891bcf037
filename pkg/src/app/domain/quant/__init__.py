"""Quantization domain types."""
