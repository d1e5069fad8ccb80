"""
Compact codes - bit packing of meta-class indices, the code index and its binary file.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import numpy as np
from numpy import ndarray
from ..constants.retrieval import CODES_MAGIC
from ..data import FeatureTable
from ..embedding import Model
from ..exceptions import CodeError, FormatError
from ..scheme import set_bits
from ..utils import logger


def _bit_widths(sizes: Sequence[int]) -> List[int]:
    return [set_bits(size) for size in sizes]


def code_bytes(sizes: Sequence[int]) -> int:
    """
    Number of bytes of one packed code.
    """
    return (sum(_bit_widths(sizes)) + 7) // 8


def _check_codes(codes: ndarray, sizes: Sequence[int]):
    if codes.ndim != 2 or codes.shape[1] != len(sizes):
        raise CodeError(f"Expected {len(sizes)} indices per code, got shape {codes.shape}")
    if ((codes < 0) | (codes >= np.asarray(sizes, dtype=np.int64))).any():
        raise CodeError(f"Code indices must be below the meta-class set sizes {list(sizes)}")


def pack_codes(codes: ndarray, sizes: Sequence[int]) -> ndarray:
    """
    Pack (n, M) meta-class indices into (n, bytes) unsigned bytes.

    Indices are written in set order, index m in ceil(log2 K_m) bits, least significant bit first within
    little-endian bytes. Unused high bits of the last byte stay zero.
    """
    codes = np.atleast_2d(np.asarray(codes, dtype=np.int64))
    _check_codes(codes, sizes)

    columns = [(codes[:, [index]] >> np.arange(width)) & 1 for index, width in enumerate(_bit_widths(sizes))]
    bits = np.hstack(columns).astype(np.uint8) if columns else np.zeros((codes.shape[0], 0), dtype=np.uint8)
    return np.packbits(bits, axis=1, bitorder="little")[:, :code_bytes(sizes)]


def unpack_codes(packed: ndarray, sizes: Sequence[int]) -> ndarray:
    """
    Unpack codes packed by `pack_codes` back into (n, M) meta-class indices.
    """
    packed = np.atleast_2d(np.asarray(packed, dtype=np.uint8))
    if packed.shape[1] != code_bytes(sizes):
        raise CodeError(f"Expected {code_bytes(sizes)} bytes per code, got {packed.shape[1]}")

    widths = _bit_widths(sizes)
    bits = np.unpackbits(packed, axis=1, count=sum(widths), bitorder="little").astype(np.int64)
    codes = np.zeros((packed.shape[0], len(sizes)), dtype=np.int64)
    offset = 0
    for index, width in enumerate(widths):
        codes[:, index] = bits[:, offset:offset + width] @ (1 << np.arange(width, dtype=np.int64))
        offset += width
    return codes


@dataclass(frozen=True, eq=False)
class CodeIndex:
    """
    Database of compact codes.

        - ids, the record ids
        - labels, the records' ground-truth classes (for evaluation only, -1 if unknown)
        - codes, the (n, M) meta-class indices
        - sizes, the number of meta-classes K_m of each set
        - codebook, the prototype matrices (d2 x K_m) the codes point into, if attached

    """

    ids: ndarray
    labels: ndarray
    codes: ndarray
    sizes: Tuple[int, ...]
    codebook: Optional[Tuple[ndarray, ...]] = None

    def __post_init__(self):
        if self.ids.shape != self.labels.shape or self.codes.shape[0] != self.ids.shape[0]:
            raise CodeError("Expected one id, label and code per item")
        _check_codes(self.codes, self.sizes)
        if self.codebook is not None and [theta.shape[1] for theta in self.codebook] != list(self.sizes):
            raise CodeError(f"Codebook sizes {[theta.shape[1] for theta in self.codebook]} don't match the codes' "
                            f"{list(self.sizes)}")

    def __len__(self) -> int:
        return self.ids.shape[0]

    @property
    def num_sets(self) -> int:
        """
        Get the number of meta-class sets (M).
        """
        return len(self.sizes)

    @property
    def bits(self) -> int:
        """
        Get the number of bits of one code.
        """
        return sum(_bit_widths(self.sizes))

    @property
    def packed(self) -> ndarray:
        """
        Get the bit-packed codes, (n, bytes).
        """
        return pack_codes(self.codes, self.sizes)

    @classmethod
    def build(cls, model: Model, table: FeatureTable) -> "CodeIndex":
        """
        Encode every record of a table with the model.
        """
        codes = encode_items(model, table.features)
        return cls(table.ids.copy(), table.labels.copy(), codes, tuple(model.sizes),
                   tuple(theta.copy() for theta in model.thetas))

    def with_codebook(self, codebook: Sequence[ndarray]) -> "CodeIndex":
        """
        Attach prototype matrices to the codes.
        """
        return CodeIndex(self.ids, self.labels, self.codes, self.sizes, tuple(np.asarray(theta) for theta in codebook))


def encode_item(model: Model, x: ndarray) -> ndarray:
    """
    Encode one feature vector into its M meta-class indices, each the prototype most similar to the subvector (the
    lowest index on ties).
    """
    return model.codes(np.asarray(x, dtype=np.float64).reshape(1, -1))[0]


def encode_items(model: Model, features: ndarray) -> ndarray:
    """
    Encode a batch of feature vectors into (n, M) meta-class indices.
    """
    features = np.asarray(features, dtype=np.float64)
    if not features.shape[0]:
        return np.zeros((0, model.num_sets), dtype=np.int64)
    return model.codes(features).astype(np.int64)


def _records_dtype(size: int) -> np.dtype:
    fields = [("id", "<i8"), ("label", "<i4")]
    if size:
        fields.append(("code", "u1", (size,)))
    return np.dtype(fields)


def save_codes(index: CodeIndex, path: str):
    """
    Save codes in the binary form.

    Layout: magic `CECD`, u32 n, u32 M, u32 K_1..K_M, then n records of (i64 id, i32 label, packed code bytes).
    Everything is little-endian.
    """
    records = np.zeros(len(index), dtype=_records_dtype(code_bytes(index.sizes)))
    records["id"] = index.ids
    records["label"] = index.labels
    if code_bytes(index.sizes):
        records["code"] = index.packed

    try:
        with open(path, "wb") as f:
            f.write(CODES_MAGIC)
            f.write(np.array([len(index), index.num_sets, *index.sizes], dtype="<u4").tobytes())
            f.write(records.tobytes())
    except OSError as ex:
        raise FormatError(f"Failed to write codes {path} - {ex}") from ex

    logger.debug(f"Saved {len(index)} codes of {index.bits} bits to {path}")


def load_codes(path: str, codebook: Sequence[ndarray] = None) -> CodeIndex:
    """
    Load codes saved by `save_codes`, optionally attaching the prototype matrices they point into.
    """
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as ex:
        raise FormatError(f"Failed to read codes {path} - {ex}") from ex

    if data[:len(CODES_MAGIC)] != CODES_MAGIC:
        raise FormatError(f"Not a code file {path}", "offset 0")
    offset = len(CODES_MAGIC)
    if len(data) < offset + 8:
        raise FormatError(f"Truncated header in {path}", f"offset {offset}")
    n, num_sets = (int(value) for value in np.frombuffer(data, dtype="<u4", count=2, offset=offset))
    offset += 8
    if num_sets < 1 or len(data) < offset + 4 * num_sets:
        raise FormatError(f"Invalid meta-class set count {num_sets} in {path}", f"offset {offset - 4}")
    sizes = tuple(int(value) for value in np.frombuffer(data, dtype="<u4", count=num_sets, offset=offset))
    offset += 4 * num_sets
    if min(sizes) < 1:
        raise FormatError(f"Invalid meta-class set sizes {list(sizes)} in {path}", f"offset {offset - 4 * num_sets}")

    dtype = _records_dtype(code_bytes(sizes))
    if len(data) != offset + n * dtype.itemsize:
        raise FormatError(f"Expected {n} records of {dtype.itemsize} bytes in {path}", f"offset {offset}")
    records = np.frombuffer(data, dtype=dtype, count=n, offset=offset)

    packed = records["code"] if code_bytes(sizes) else np.zeros((n, 0), dtype=np.uint8)
    codes = unpack_codes(packed, sizes)
    invalid = np.flatnonzero((codes >= np.asarray(sizes)).any(axis=1))
    if invalid.size:
        raise FormatError(f"Code of record {invalid[0]} points outside of its meta-class sets",
                          f"offset {offset + invalid[0] * dtype.itemsize}")

    index = CodeIndex(records["id"].astype(np.int64), records["label"].astype(np.int64), codes, sizes)
    return index if codebook is None else index.with_codebook(codebook)
