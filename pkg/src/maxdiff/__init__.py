"""Nonparametric K-sample tests built on the maximum of the observation statistics."""

from .camod import camod_test
from .mod import mod_test
from .model import (
    PooledSample,
    RegressionSample,
    TestConfig,
    TestReport,
    validate_regression_sample,
    validate_sample,
)
from .regression import regression_test

__all__ = [
    "PooledSample",
    "RegressionSample",
    "TestConfig",
    "TestReport",
    "camod_test",
    "mod_test",
    "regression_test",
    "validate_regression_sample",
    "validate_sample",
]
