#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""Byte reader and writer classes."""


import io
import os
from pathlib import Path
from typing import Union

import numpy as np
import numpy.typing as npt


class BinaryReader:
    """BinaryReader manages loading and accessing areas of binary file."""

    def __init__(self, source: str, data: bytes) -> None:
        """__init__ Initialize reader.

        :param source: Where the bytes came from, used in messages
        :type source: str
        :param data: The content to read
        :type data: bytes
        """
        self.length = len(data)
        self.reader = io.BytesIO(data)
        self.source = source

    @classmethod
    def read_from_file(cls, path: Union[str, Path]) -> "BinaryReader":
        """read_from_file instantiates a reader from a file path.

        :raises FileNotFoundError: If file does not exist
        :return: the instantiated reader
        :rtype: BinaryReader
        """
        fq_mp = Path(os.path.expanduser(path))
        if fq_mp.exists():
            return cls(str(fq_mp), fq_mp.read_bytes())
        raise FileNotFoundError(f"{path} file does not exist")

    def pos(self) -> int:
        """pos Report the current reader position.

        :return: Current positiion of reader
        :rtype: int
        """
        return self.reader.tell()

    def remaining(self) -> int:
        """Bytes left after the current position."""
        return self.length - self.pos()

    def read(self, size: int = None) -> bytes:
        """Read exactly size bytes or raise EOFError."""
        size = 1 if size is None else size
        data = self.reader.read(size)
        if len(data) != size:
            raise EOFError(f"{self.source}: wanted {size} bytes at {self.pos() - len(data)}, got {len(data)}")
        return data

    def read_as_int(self, size: int = None) -> int:
        """read_as_int Read in size bytes and convert to int.

        :param size: The number of bytes to read, defaults to None
        :type size: int, optional
        :return: The read bytes converted to little endien int
        :rtype: int
        """
        return int.from_bytes(self.read(size), "little")

    def read_array(self, dtype: npt.DTypeLike, count: int) -> np.ndarray:
        """read_array reads count items of a little endian numpy dtype.

        :param dtype: numpy dtype, byte order must be explicit
        :type dtype: npt.DTypeLike
        :param count: Number of items
        :type count: int
        :return: A read only array over a copy of the bytes
        :rtype: np.ndarray
        """
        dtype = np.dtype(dtype)
        return np.frombuffer(self.read(dtype.itemsize * count), dtype=dtype, count=count)


class BinaryWriter:
    """BinaryWriter accumulates little endian content."""

    def __init__(self) -> None:
        """__init__ Initialize writer."""
        self.writer = io.BytesIO()

    def write(self, data: bytes) -> "BinaryWriter":
        """Append raw bytes."""
        self.writer.write(data)
        return self

    def write_int(self, value: int, size: int) -> "BinaryWriter":
        """Append value as a size byte little endian unsigned int."""
        return self.write(int(value).to_bytes(size, "little"))

    def write_array(self, array: np.ndarray, dtype: npt.DTypeLike) -> "BinaryWriter":
        """Append array converted to dtype."""
        return self.write(np.ascontiguousarray(array, dtype=np.dtype(dtype)).tobytes())

    def getvalue(self) -> bytes:
        """Content written so far."""
        return self.writer.getvalue()
