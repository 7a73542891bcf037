"""Infrastructure layer: file formats and exporters.

Depends on the domain layer only.
"""
