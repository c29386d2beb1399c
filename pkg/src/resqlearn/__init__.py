"""Residual quantum learner: staged training of small variational
circuits where each stage fits the remaining residual."""

__version__ = "0.1.0"
