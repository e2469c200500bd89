"""
Status lines for command-line runs

Diagnostics go to stderr so stdout only ever carries data.
"""

import sys

import config

RULE = "=" * 60


def _emit(line: str):
    print(line, file=sys.stderr, flush=True)


def banner(title: str):
    """Print a ruled section title"""
    if config.VERBOSE:
        _emit(RULE)
        _emit(title)
        _emit(RULE)


def info(message: str):
    if config.VERBOSE:
        _emit(f"ℹ {message}")


def ok(message: str):
    if config.VERBOSE:
        _emit(f"✓ {message}")


def warn(message: str):
    _emit(f"⚠ {message}")


def fail(message: str):
    _emit(f"✗ {message}")
