#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""mpcnn command line."""
