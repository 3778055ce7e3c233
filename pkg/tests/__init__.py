"""
Test suite for relscat.
"""
