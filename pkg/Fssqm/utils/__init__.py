# Shared numerical and service helpers.
