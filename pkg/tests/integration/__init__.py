"""
Integration tests for relscat command-line workflows.
"""
