# This file makes 'cli' a sub-package.
