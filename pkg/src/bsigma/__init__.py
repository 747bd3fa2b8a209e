"""Weihrauch reductions between bounding principles and Ramsey-type problems, run at desk scale."""
