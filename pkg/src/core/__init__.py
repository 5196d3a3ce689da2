# This file makes 'core' a sub-package: expressions, numerics and dynamics.
