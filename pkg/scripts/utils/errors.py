#!/usr/bin/env python3
"""
Exception hierarchy for booktor.
Every failure the CLI can report is a BooktorError; exit codes live here too.
"""

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CAP = 2
EXIT_MALFORMED = 3


class BooktorError(Exception):
    """Base exception for booktor errors."""
    exit_code = EXIT_FAILED


class MalformedInputError(BooktorError):
    """Input file or argument could not be parsed."""
    exit_code = EXIT_MALFORMED


class InvalidBookError(BooktorError):
    """Book violates the standing hypotheses."""
    def __init__(self, message: str, violations: list = None):
        super().__init__(message)
        self.violations = violations or []


class NotAHomomorphismError(BooktorError):
    """Some relator does not map to the identity permutation."""
    pass


class CapExceededError(BooktorError):
    """A desk-scale cap was exceeded."""
    exit_code = EXIT_CAP

    def __init__(self, cap_name: str, limit: int, actual: int = None):
        shown = "more" if actual is None else str(actual)
        super().__init__(f"{cap_name} cap exceeded: {shown} > {limit} (quotient too large for desk scale)")
        self.cap_name = cap_name
        self.limit = limit
        self.actual = actual


class TowerMismatchError(BooktorError):
    """Tower levels disagree on the generator set."""
    pass


class SingularMonodromyError(BooktorError):
    """A^n - I is singular, or A is not invertible over the integers."""
    pass


class InternalConsistencyError(BooktorError):
    """A law that holds for every correct input was violated."""
    pass


class OracleDisagreementError(BooktorError):
    """Graph-of-spaces homology and the Reidemeister-Schreier oracle differ."""
    def __init__(self, message: str, primary: dict = None, oracle: dict = None):
        super().__init__(message)
        self.primary = primary
        self.oracle = oracle


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit code."""
    if isinstance(exc, BooktorError):
        return exc.exit_code
    if isinstance(exc, (FileNotFoundError, ValueError)):
        return EXIT_MALFORMED
    return EXIT_FAILED
