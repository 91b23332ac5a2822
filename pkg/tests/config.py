"""Shared constants for the test suite."""

SEED = 20240611

# geometry oracle suite
N_ROUNDTRIPS = 1000

# fast smoke versions of the Monte Carlo checks
N_REPLICATES_SMOKE = 40
BOOTSTRAP_B_SMOKE = 200

# desk-scale acceptance runs (--run-slow)
N_REPLICATES = 500
BOOTSTRAP_B = 500
