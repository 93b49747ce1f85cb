"""Experiment registry, Monte Carlo risk summaries and the command line."""
