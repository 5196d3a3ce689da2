# This file makes 'src' a package.

__version__ = "1.0.0"
