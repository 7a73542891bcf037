"""Application layer: signal processing, inference, quantization, planning, and scheduling.

Depends on the domain layer. No dependencies on infrastructure implementations.
"""
