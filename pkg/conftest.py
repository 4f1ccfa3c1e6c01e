"""Root conftest.py: isolate the test session from the caller's environment.

FSSQM_TOL overrides every config tolerance and FSSQM_LOG_LEVEL changes what
the CLI prints to stderr, so both are cleared before any test module imports
``app``. conftest.py at the repo root is collected before test_cli.py and
test/*.py, which makes import time early enough.
"""
import os

for _name in ("FSSQM_TOL", "FSSQM_LOG_LEVEL"):
    os.environ.pop(_name, None)
