"""
Experiment catalog for relscat.

Each experiment is an Experiment subclass living in one of the catalog
modules of this package; the ExperimentManager discovers them by name.
"""
