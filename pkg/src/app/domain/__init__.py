"""Domain layer: pure types, configuration schemas, and the error hierarchy.

No dependencies on application or infrastructure layers.
"""
