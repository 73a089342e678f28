"""Collected pass/fail lines for the acceptance summary."""

LINES = []
