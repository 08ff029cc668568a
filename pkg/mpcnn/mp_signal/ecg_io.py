#    Copyright mpcnn contributors
#    SPDX-License-Identifier: Apache-2.0

# -*- coding: utf-8 -*-

"""PhysioNet style record ingestion.

Reads `.hea` headers, format 16 and 212 `.dat` sample files, MIT `.apn`
annotation files and the `.apn.txt` one label per line fallback. Only the first
signal of a record is used.
"""

import logging
import math
import re
from pathlib import Path
from typing import Optional, Union

import numpy as np

from mpcnn.bin_reader.reader import BinaryReader, BinaryWriter
from mpcnn.mp_constants import (
    ANN_CODE_AUX,
    ANN_CODE_SKIP,
    ANN_STRUCTURAL_CODES,
    DEFAULT_ADC_GAIN,
    DEFAULT_CODE_MAP,
    SECONDS_PER_MINUTE,
    SUPPORTED_FORMATS,
)
from mpcnn.mp_excepts import (
    BadLabelChar,
    EcgIoError,
    MalformedHeader,
    NoRecords,
    SizeMismatch,
    TruncatedFile,
    UnknownCode,
    UnsupportedFormat,
)
from mpcnn.mp_types import EcgRecord, Label, LabelSource, MinuteLabels, RecordHeader, SignalSpec

logger = logging.getLogger("mpcnn.ecg_io")
if not logging.getLogger().handlers:
    logger.addHandler(logging.NullHandler())
    logger.propagate = False

PathLike = Union[str, Path]

_NUMBER_PREFIX = re.compile(r"^[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?")
_DEFAULT_LABEL_MAP: dict[int, Label] = {code: Label(lbl) for code, lbl in DEFAULT_CODE_MAP.items()}


def _number_prefix(token: str, what: str) -> float:
    """Leading number of tokens like `100/1000`, `200(0)/mV` or `16x2`."""
    match = _NUMBER_PREFIX.match(token)
    if not match:
        raise MalformedHeader(f"Cannot parse {what} from {token!r}")
    return float(match.group(0))


def _parse_signal_line(tokens: list[str]) -> SignalSpec:
    """Signal spec line: file format [gain[(baseline)][/units] ...] description."""
    if len(tokens) < 2:
        raise MalformedHeader(f"Signal line needs file name and format: {' '.join(tokens)}")
    format_code = int(_number_prefix(tokens[1], "format"))
    if format_code not in SUPPORTED_FORMATS:
        raise UnsupportedFormat(format_code)
    gain = DEFAULT_ADC_GAIN
    baseline = 0
    if len(tokens) > 2:
        gain = _number_prefix(tokens[2], "gain") or DEFAULT_ADC_GAIN
        base_match = re.search(r"\((-?\d+)\)", tokens[2])
        if base_match:
            baseline = int(base_match.group(1))
    description = " ".join(tokens[8:]) if len(tokens) > 8 else ""
    return SignalSpec(tokens[0], format_code, gain, baseline, description)


def parse_header(text: str, source: str = "<header>") -> RecordHeader:
    """parse_header parses record header text.

    :param text: Header content
    :type text: str
    :param source: Name used in messages
    :type source: str
    :raises MalformedHeader: Token count or number parse failure
    :raises UnsupportedFormat: A signal uses a format other than 16 or 212
    :return: The parsed header
    :rtype: RecordHeader
    """
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise MalformedHeader(f"{source}: empty header")
    tokens = lines[0].split()
    if len(tokens) < 4:
        raise MalformedHeader(f"{source}: record line needs 4 tokens, found {len(tokens)}")
    try:
        record_id = tokens[0].split("/")[0]
        num_signals = int(tokens[1])
        sampling_rate = _number_prefix(tokens[2], "sampling rate")
        num_samples = int(tokens[3])
    except ValueError as exc:
        raise MalformedHeader(f"{source}: {exc}") from exc
    if sampling_rate <= 0 or num_signals < 1 or num_samples < 0:
        raise MalformedHeader(f"{source}: invalid record line {lines[0]!r}")
    signals = tuple(_parse_signal_line(line.split()) for line in lines[1 : 1 + num_signals])
    if not signals:
        signals = (SignalSpec(f"{record_id}.dat", 16, DEFAULT_ADC_GAIN),)
    return RecordHeader(record_id, num_signals, sampling_rate, num_samples, signals)


def read_header(path: PathLike) -> RecordHeader:
    """Read and parse a `.hea` file."""
    hea = Path(path)
    try:
        text = hea.read_text(encoding="utf8")
    except OSError as exc:
        raise EcgIoError(f"Unable to read {hea}: {exc}") from exc
    return parse_header(text, str(hea))


def format_header(header: RecordHeader) -> str:
    """Header text for a record, one signal line per signal."""
    lines = [f"{header.record_id} {header.num_signals} {header.sampling_rate:g} {header.num_samples}"]
    for sig in header.signals:
        line = f"{sig.file_name} {sig.format_code} {sig.gain:g}({sig.baseline})/mV 16 0 0 0 0"
        if sig.description:
            line += f" {sig.description}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def write_header(header: RecordHeader, path: PathLike) -> None:
    """Write a `.hea` file."""
    Path(path).write_text(format_header(header), encoding="utf8")


def _expected_212_sizes(count: int) -> tuple[int, ...]:
    """A trailing odd sample may be stored in 2 or 3 bytes."""
    return tuple(sorted({(3 * count + 1) // 2, 3 * math.ceil(count / 2)}))


def decode_212(data: bytes, count: int) -> np.ndarray:
    """Unpack 12 bit pairs (3 bytes per 2 samples) to int16."""
    raw = np.frombuffer(data, dtype=np.uint8)
    pairs = math.ceil(count / 2)
    if raw.size < 3 * pairs:
        raw = np.concatenate([raw, np.zeros(3 * pairs - raw.size, dtype=np.uint8)])
    trip = raw[: 3 * pairs].reshape(pairs, 3).astype(np.int16)
    first = trip[:, 0] | ((trip[:, 1] & 0x0F) << 8)
    second = trip[:, 2] | ((trip[:, 1] & 0xF0) << 4)
    out = np.empty(2 * pairs, dtype=np.int16)
    out[0::2] = first
    out[1::2] = second
    out[out > 2047] -= 4096
    return out[:count]


def encode_212(values: np.ndarray) -> bytes:
    """Pack int values in [-2048, 2047] as 12 bit pairs."""
    vals = np.asarray(values, dtype=np.int64)
    if vals.size and (vals.min() < -2048 or vals.max() > 2047):
        raise ValueError("Format 212 holds values in [-2048, 2047]")
    if vals.size % 2:
        vals = np.append(vals, 0)
    unsigned = (vals & 0x0FFF).astype(np.uint16).reshape(-1, 2)
    trip = np.empty((unsigned.shape[0], 3), dtype=np.uint8)
    trip[:, 0] = unsigned[:, 0] & 0xFF
    trip[:, 1] = ((unsigned[:, 0] >> 8) & 0x0F) | ((unsigned[:, 1] >> 4) & 0xF0)
    trip[:, 2] = unsigned[:, 1] & 0xFF
    return trip.tobytes()


def read_samples(header: RecordHeader, path: PathLike) -> np.ndarray:
    """read_samples reads the first signal in mV.

    :param header: The record header
    :type header: RecordHeader
    :param path: The `.dat` file
    :type path: PathLike
    :raises SizeMismatch: File size disagrees with the header
    :raises EcgIoError: File cannot be read
    :return: num_samples values, adc / gain
    :rtype: np.ndarray
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise EcgIoError(f"Unable to read {path}: {exc}") from exc
    count = header.num_samples * header.num_signals
    if header.format_code == 16:
        expected = 2 * count
        if len(data) != expected:
            raise SizeMismatch(expected, len(data))
        adc = BinaryReader(str(path), data).read_array("<i2", count)
    else:
        sizes = _expected_212_sizes(count)
        if len(data) not in sizes:
            raise SizeMismatch(sizes[-1], len(data))
        adc = decode_212(data, count)
    first = adc.reshape(header.num_samples, header.num_signals)[:, 0]
    return first.astype(np.float64) / header.gain


def write_samples(samples: np.ndarray, header: RecordHeader, path: PathLike) -> None:
    """write_samples writes a single signal in the header's first format.

    Values are quantized to round(mV * gain).

    :param samples: Signal in mV
    :type samples: np.ndarray
    :param header: Single signal header describing the output
    :type header: RecordHeader
    :param path: Output `.dat` file
    :type path: PathLike
    """
    if header.num_signals != 1:
        raise ValueError("Only single signal records are written")
    adc = np.rint(np.asarray(samples, dtype=np.float64) * header.gain)
    if header.format_code == 16:
        adc = np.clip(adc, -32768, 32767)
        Path(path).write_bytes(BinaryWriter().write_array(adc, "<i2").getvalue())
    else:
        Path(path).write_bytes(encode_212(np.clip(adc, -2048, 2047)))


def decode_annotations(data: bytes, source: str = "<annotations>") -> list[tuple[int, int]]:
    """decode_annotations walks an MIT annotation stream.

    Each 16 bit little endian word holds a 6 bit code and a 10 bit time increment.
    Code 59 is followed by a 4 byte interval (high word first), code 63 by aux
    bytes padded to even, codes 60 to 62 carry no time, word 0 ends the stream.

    :param data: File content
    :type data: bytes
    :param source: Name used in messages
    :type source: str
    :raises TruncatedFile: The stream ends early
    :return: (cumulative sample time, code) for each labeling annotation, time sorted
    :rtype: list[tuple[int, int]]
    """
    reader = BinaryReader(source, data)
    time = 0
    found: list[tuple[int, int]] = []
    try:
        while True:
            word = reader.read_as_int(2)
            if word == 0:
                break
            code, increment = word >> 10, word & 0x3FF
            if code == ANN_CODE_SKIP:
                high = reader.read_as_int(2)
                low = reader.read_as_int(2)
                interval = (high << 16) | low
                if interval & 0x80000000:
                    interval -= 1 << 32
                time += interval
            elif code == ANN_CODE_AUX:
                _ = reader.read(increment + (increment & 1)) if increment else b""
            elif code in ANN_STRUCTURAL_CODES:
                continue
            else:
                time += increment
                found.append((time, code))
    except EOFError as exc:
        raise TruncatedFile(f"{source}: annotation stream ends without terminator") from exc
    return sorted(found, key=lambda item: item[0])


def encode_annotations(entries: list[tuple[int, int]]) -> bytes:
    """Inverse of decode_annotations for (time, code) pairs in time order."""
    writer = BinaryWriter()
    last = 0
    for time, code in entries:
        delta = time - last
        if delta < 0:
            raise ValueError("Annotations must be in time order")
        if delta > 0x3FF:
            writer.write_int(ANN_CODE_SKIP << 10, 2)
            writer.write_int((delta >> 16) & 0xFFFF, 2)
            writer.write_int(delta & 0xFFFF, 2)
            delta = 0
        writer.write_int((code << 10) | delta, 2)
        last = time
    writer.write_int(0, 2)
    return writer.getvalue()


def read_annotations(
    path: PathLike,
    code_map: Optional[dict[int, Label]] = None,
    fs: float = 100.0,
) -> MinuteLabels:
    """read_annotations reads per minute labels from an MIT annotation file.

    :param path: The `.apn` file
    :type path: PathLike
    :param code_map: Code to label map, defaults to {1: N, 8: A}
    :type code_map: Optional[dict[int, Label]], optional
    :param fs: Sampling rate used to place annotations on minutes, defaults to 100.0
    :type fs: float, optional
    :raises UnknownCode: A code that is neither mapped nor structural
    :return: One label per annotation in time order
    :rtype: MinuteLabels
    """
    code_map = code_map or _DEFAULT_LABEL_MAP
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise EcgIoError(f"Unable to read {path}: {exc}") from exc
    labels: list[Label] = []
    samples_per_minute = SECONDS_PER_MINUTE * fs
    for position, (time, code) in enumerate(decode_annotations(data, str(path))):
        if code not in code_map:
            raise UnknownCode(code)
        minute = int(round(time / samples_per_minute))
        if minute != position:
            logger.warning(f"{path}: annotation {position} falls on minute {minute}")
        labels.append(Label(code_map[code]))
    return MinuteLabels(tuple(labels), LabelSource.ANNOTATION_FILE)


def read_text_labels(path: PathLike) -> MinuteLabels:
    """read_text_labels reads one A or N per non empty line.

    :param path: The `.apn.txt` file
    :type path: PathLike
    :raises BadLabelChar: A line other than A or N
    :return: Labels in file order
    :rtype: MinuteLabels
    """
    try:
        text = Path(path).read_text(encoding="utf8")
    except OSError as exc:
        raise EcgIoError(f"Unable to read {path}: {exc}") from exc
    labels: list[Label] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        token = line.strip()
        if not token:
            continue
        if token not in ("A", "N"):
            raise BadLabelChar(lineno, token)
        labels.append(Label(token))
    return MinuteLabels(tuple(labels), LabelSource.TEXT_FILE)


def write_text_labels(labels: MinuteLabels, path: PathLike) -> None:
    """Write the `.apn.txt` fallback."""
    Path(path).write_text(labels.as_text(), encoding="utf8")


def list_records(data_dir: PathLike) -> list[str]:
    """Record ids with a header in data_dir, sorted.

    :raises NoRecords: Directory missing or holds no headers
    """
    root = Path(data_dir)
    if not root.is_dir():
        raise NoRecords(f"{root} is not a directory")
    records = sorted(hea.stem for hea in root.glob("*.hea"))
    if not records:
        raise NoRecords(f"No .hea files in {root}")
    return records


def load_record(
    data_dir: PathLike,
    record_id: str,
    code_map: Optional[dict[int, Label]] = None,
) -> EcgRecord:
    """load_record reads samples and labels of one record.

    Text labels (`.apn.txt`) take precedence over binary annotations (`.apn`).
    Records without either come back with no labels. Labels beyond the signal
    duration are dropped with a warning.

    :param data_dir: Directory holding the record files
    :type data_dir: PathLike
    :param record_id: Record name
    :type record_id: str
    :param code_map: Annotation code map, defaults to None
    :type code_map: Optional[dict[int, Label]], optional
    :return: The record
    :rtype: EcgRecord
    """
    root = Path(data_dir)
    header = read_header(root / f"{record_id}.hea")
    samples = read_samples(header, root / header.signals[0].file_name)
    text_file = root / f"{record_id}.apn.txt"
    ann_file = root / f"{record_id}.apn"
    if text_file.exists():
        labels = read_text_labels(text_file).labels
    elif ann_file.exists():
        labels = read_annotations(ann_file, code_map, header.sampling_rate).labels
    else:
        logger.warning(f"{record_id}: no minute labels found")
        labels = ()
    samples_per_minute = int(round(SECONDS_PER_MINUTE * header.sampling_rate))
    max_minutes = math.ceil(len(samples) / samples_per_minute) if len(samples) else 0
    if len(labels) > max_minutes:
        logger.warning(f"{record_id}: dropping {len(labels) - max_minutes} labels past the signal end")
        labels = labels[:max_minutes]
    logger.info(f"{record_id}: {len(samples)} samples at {header.sampling_rate:g} Hz, {len(labels)} labels")
    return EcgRecord(header.record_id, samples, header.sampling_rate, labels)
