"""
Feature table module for storing and exchanging labeled and unlabeled feature vectors.
"""
import os
from dataclasses import dataclass
from typing import Dict, Iterable
import numpy as np
from numpy import ndarray
import pandas
from pandas.errors import ParserError, EmptyDataError
from ..constants.data import UNLABELED, TABLE_MAGIC, TABLE_BINARY_EXTENSION, TABLE_FLOAT_FORMAT
from ..constants.data import TABLE_ID_COLUMN, TABLE_LABEL_COLUMN, TABLE_FEATURE_PREFIX
from ..exceptions import DataError, FormatError
from ..utils import logger


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """
    Collection of records, each made of a unique integer id, a class label and a fixed-length feature vector.

    The arrays are stored column-wise:

        - ids, int64 of shape (n,)
        - labels, int64 of shape (n,), where -1 marks an unlabeled record
        - features, float32 of shape (n, d)

    Tables are immutable - any relabelling or sub-selection creates a new table.
    """

    ids: ndarray
    labels: ndarray
    features: ndarray

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64)
        labels = np.asarray(self.labels, dtype=np.int64)
        features = np.asarray(self.features, dtype=np.float32)

        if ids.ndim != 1 or labels.shape != ids.shape:
            raise DataError(f"Ids and labels must be vectors of equal length, got {ids.shape} and {labels.shape}")
        if features.ndim != 2 or features.shape[0] != ids.shape[0] or features.shape[1] < 1:
            raise DataError(f"Features must be a matrix with one row per record, got {features.shape}")
        if np.unique(ids).size != ids.size:
            raise DataError("Record ids must be unique within a table")
        if labels.size and labels.min() < UNLABELED:
            raise DataError(f"Labels must be class indices or {UNLABELED} for unlabeled records")

        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "features", features)

    def __len__(self) -> int:
        return self.ids.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureTable):
            return NotImplemented
        return (np.array_equal(self.ids, other.ids) and np.array_equal(self.labels, other.labels)
                and self.features.shape == other.features.shape
                and self.features.tobytes() == other.features.tobytes())

    @property
    def dim(self) -> int:
        """
        Get the dimension of the feature vectors.
        """
        return self.features.shape[1]

    @property
    def labeled(self) -> ndarray:
        """
        Get the boolean mask of labeled records.
        """
        return self.labels != UNLABELED

    @property
    def classes(self) -> ndarray:
        """
        Get the sorted class indices present among the labeled records.
        """
        return np.unique(self.labels[self.labeled])

    def positions(self, ids: Iterable[int]) -> ndarray:
        """
        Find row positions of the given record ids.

        `DataError` will be thrown if any of the ids is not in the table.
        """
        lookup: Dict[int, int] = {int(record_id): row for row, record_id in enumerate(self.ids)}
        try:
            return np.array([lookup[int(record_id)] for record_id in ids], dtype=np.int64)
        except KeyError as ex:
            raise DataError(f"Record id {ex.args[0]} is not in the table") from ex

    def subset(self, ids: Iterable[int]) -> "FeatureTable":
        """
        Create a table with the given records only, in the order of the passed ids.
        """
        rows = self.positions(ids)
        return FeatureTable(self.ids[rows], self.labels[rows], self.features[rows])


def _is_binary(path: str) -> bool:
    """
    Detect the binary table format by its magic bytes.
    """
    with open(path, "rb") as f:
        return f.read(len(TABLE_MAGIC)) == TABLE_MAGIC


def _binary_dtype(dim: int) -> np.dtype:
    """
    Build the (packed, little-endian) record layout of the binary format.
    """
    return np.dtype([("id", "<i8"), ("label", "<i4"), ("features", "<f4", (dim,))])


def _feature_columns(dim: int) -> list:
    return [f"{TABLE_FEATURE_PREFIX}{i}" for i in range(dim)]


def _check_duplicates(ids: ndarray, location):
    """
    Raise a `FormatError` pointing at the first repeated id.
    """
    _, first_rows, counts = np.unique(ids, return_index=True, return_counts=True)
    if (counts > 1).any():
        repeated = ids[first_rows[counts > 1][0]]
        row = int(np.flatnonzero(ids == repeated)[1])
        raise FormatError(f"Duplicate record id {repeated}", location(row))


def _overlong_line(path: str, width: int) -> str:
    """
    Locate the first line with more than `width` fields.
    """
    with open(path, encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            if len(line.rstrip("\r\n").split(",")) > width:
                return f"line {number}"
    return ""


def _load_text(path: str) -> FeatureTable:
    """
    Parse the comma-separated form, with a header of `id,label,f0,...,f{d-1}`.
    """
    with open(path, encoding="utf-8") as f:
        header = f.readline().strip().split(",")

    dim = len(header) - 2
    if dim < 1 or header != [TABLE_ID_COLUMN, TABLE_LABEL_COLUMN] + _feature_columns(dim):
        raise FormatError(f"Malformed header in {path}, expected id,label,f0,...", "line 1")

    try:
        frame = pandas.read_csv(path, dtype=str, skip_blank_lines=True)
    except EmptyDataError as ex:
        raise FormatError(f"Empty feature table {path}", "line 1") from ex
    except ParserError as ex:
        raise FormatError(f"Failed to parse {path} - {ex}", _overlong_line(path, len(header))) from ex

    # Rows with missing fields are filled with NaN by pandas
    incomplete = frame.isna().any(axis=1).to_numpy()
    if incomplete.any():
        row = int(np.flatnonzero(incomplete)[0])
        found = int(frame.iloc[row].notna().sum()) - 2
        raise FormatError(f"Row {row + 1} has {found} features, expected {dim}", f"line {row + 2}")

    numeric = frame.apply(pandas.to_numeric, errors="coerce")
    invalid = numeric.isna().any(axis=1).to_numpy()
    if invalid.any():
        row = int(np.flatnonzero(invalid)[0])
        raise FormatError(f"Row {row + 1} holds a non-numeric value", f"line {row + 2}")

    integral = numeric[[TABLE_ID_COLUMN, TABLE_LABEL_COLUMN]]
    fractional = (integral % 1 != 0).any(axis=1).to_numpy()
    if fractional.any():
        row = int(np.flatnonzero(fractional)[0])
        raise FormatError(f"Row {row + 1} has a non-integral id or label", f"line {row + 2}")

    ids = numeric[TABLE_ID_COLUMN].to_numpy(dtype=np.int64)
    labels = numeric[TABLE_LABEL_COLUMN].to_numpy(dtype=np.int64)
    features = np.array(frame[_feature_columns(dim)].to_numpy(), dtype=np.float64).astype(np.float32)

    _check_duplicates(ids, lambda row: f"line {row + 2}")
    if labels.size and labels.min() < UNLABELED:
        row = int(np.flatnonzero(labels < UNLABELED)[0])
        raise FormatError(f"Invalid label {labels[row]}", f"line {row + 2}")

    return FeatureTable(ids, labels, features)


def _load_binary(path: str) -> FeatureTable:
    """
    Parse the binary form - magic `CEFT`, u32 n, u32 d, then n records of (i64 id, i32 label, d x f32 features).
    """
    with open(path, "rb") as f:
        data = f.read()

    header_size = len(TABLE_MAGIC) + 8
    if len(data) < header_size:
        raise FormatError(f"Truncated header in {path}", "offset 0")
    size, dim = np.frombuffer(data, dtype="<u4", count=2, offset=len(TABLE_MAGIC))
    if dim < 1:
        raise FormatError(f"Invalid feature dimension {dim} in {path}", f"offset {len(TABLE_MAGIC) + 4}")

    dtype = _binary_dtype(int(dim))
    expected = header_size + int(size) * dtype.itemsize
    if len(data) != expected:
        raise FormatError(f"Expected {expected} bytes for {size} records of dimension {dim}, found {len(data)}",
                          f"offset {min(len(data), expected)}")

    records = np.frombuffer(data, dtype=dtype, count=int(size), offset=header_size)
    ids = records["id"].astype(np.int64)
    labels = records["label"].astype(np.int64)

    _check_duplicates(ids, lambda row: f"offset {header_size + row * dtype.itemsize}")
    if labels.size and labels.min() < UNLABELED:
        row = int(np.flatnonzero(labels < UNLABELED)[0])
        raise FormatError(f"Invalid label {labels[row]}", f"offset {header_size + row * dtype.itemsize}")

    return FeatureTable(ids, labels, records["features"].astype(np.float32))


def load_feature_table(path: str) -> FeatureTable:
    """
    Load a feature table from either the text or the binary form.

    The binary form is recognised by its magic bytes, any other file is parsed as text. `FormatError` will be thrown
    for malformed headers, rows of the wrong dimension, non-numeric values and duplicate ids.
    """
    try:
        table = _load_binary(path) if _is_binary(path) else _load_text(path)
    except OSError as ex:
        raise FormatError(f"Failed to read feature table {path} - {ex}") from ex

    logger.debug(f"Loaded {len(table)} records of dimension {table.dim} from {path}")
    return table


def save_feature_table(table: FeatureTable, path: str):
    """
    Save a feature table, in the binary form if the path ends with `.ceft`, in the text form otherwise.
    """
    try:
        if os.path.splitext(path)[1].lower() == TABLE_BINARY_EXTENSION:
            records = np.empty(len(table), dtype=_binary_dtype(table.dim))
            records["id"] = table.ids
            records["label"] = table.labels
            records["features"] = table.features
            with open(path, "wb") as f:
                f.write(TABLE_MAGIC)
                f.write(np.array([len(table), table.dim], dtype="<u4").tobytes())
                f.write(records.tobytes())
        else:
            frame = pandas.DataFrame(table.features, columns=_feature_columns(table.dim))
            frame.insert(0, TABLE_LABEL_COLUMN, table.labels)
            frame.insert(0, TABLE_ID_COLUMN, table.ids)
            frame.to_csv(path, index=False, float_format=TABLE_FLOAT_FORMAT)
    except OSError as ex:
        raise FormatError(f"Failed to write feature table {path} - {ex}") from ex

    logger.debug(f"Saved {len(table)} records to {path}")
