"""Reverse-mode differentiation over dense matrices."""

from app.autodiff.tensor import Tape, Tensor, active_tape, const

__all__ = ["Tape", "Tensor", "active_tape", "const"]
