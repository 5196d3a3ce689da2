# This file makes 'utils' a sub-package: workers, images and bundles.
