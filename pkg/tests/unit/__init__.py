"""
Unit tests for relscat components.
"""
