#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Multact Lab Errors
Exception hierarchy shared by the library modules and the experiment runner.
"""


class MultactError(Exception):
    """Base class for every error raised by the library."""


class SchemaError(MultactError):
    """Config failed validation; the CLI maps this to exit code 2."""


class UnknownExperimentError(SchemaError):
    def __init__(self, name, registry):
        self.name = name
        self.registry = sorted(registry)
        super().__init__(
            f"unknown experiment '{name}'; available: {', '.join(self.registry)}"
        )


# numtheory
class LimitTooLargeError(MultactError):
    pass


class InvalidProgressionError(MultactError):
    pass


class FactorizationBoundError(MultactError):
    pass


# multfn / folner
class NonUnimodularError(MultactError):
    pass


class EmptyRestrictionError(MultactError):
    pass


class EnumerationTooLargeError(MultactError):
    pass


class OutOfRangeError(MultactError):
    pass


# linforms / equations
class TrivialFormError(MultactError):
    pass


class UndefinedEvaluationError(MultactError):
    pass


class DegenerateSubstitutionError(MultactError):
    pass


class SingularMatrixError(MultactError):
    pass


class EmptyAfterExclusionError(MultactError):
    pass


class HypothesisViolationError(MultactError):
    pass


class InvalidShiftError(MultactError):
    pass


# actions / averages / uniformity
class NonCommutingGeneratorsError(MultactError):
    def __init__(self, i, j):
        self.pair = (i, j)
        super().__init__(f"generators {i} and {j} do not commute")


class NonInvertibleArgumentError(MultactError):
    pass


class UnsupportedActionError(MultactError):
    pass


class InvalidPartitionError(MultactError):
    pass


class SpaceMismatchError(MultactError):
    pass


class AllPointsExcludedError(MultactError):
    pass


class EmptySetError(MultactError):
    pass


class CostGuardError(MultactError):
    pass


class DegenerateRangeError(MultactError):
    pass
