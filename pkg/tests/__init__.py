"""
Test Suite for Krein Extension Analyzer

Unit tests for the exact boundary operator, extension classification and
the numerical Weyl function and eigenvalue scans.
"""
