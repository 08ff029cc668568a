#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

# Read in command line and artifact headers
__version__ = "0.1.0"
"""mpcnn Version."""
