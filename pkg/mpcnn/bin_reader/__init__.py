#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Binary readers and writers."""

from mpcnn.bin_reader.reader import BinaryReader, BinaryWriter
