"""
Combinatorial embedding model - encoder, meta-class prototypes, prediction head and hyperparameters.
"""
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, List, Sequence
import numpy as np
from numpy import ndarray
from .assignment import comb_embed, hard_assign, l2_normalize, split_subvectors
from .layers import Encoder, PredictionHead
from ..constants.embedding import MODEL_MAGIC, DEFAULT_SCALE, DEFAULT_TEMPERATURE, DEFAULT_THRESHOLD
from ..constants.embedding import DEFAULT_ALPHA, DEFAULT_BETA
from ..exceptions import FormatError, ParameterError, ShapeError
from ..utils import logger


@dataclass(frozen=True)
class Hyperparams:
    """
    Hyperparameters of the model and its objective.

        - scale, the soft assignment scaling factor (lambda)
        - temperature, the meta-classification softmax temperature (tau)
        - threshold, the cosine similarity threshold of pseudo-positives (gamma)
        - alpha and beta, the weights of the similarity and consistency losses

    """

    scale: float = DEFAULT_SCALE
    temperature: float = DEFAULT_TEMPERATURE
    threshold: float = DEFAULT_THRESHOLD
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if not self.scale > 0 or not self.temperature > 0:
            raise ParameterError(f"Scale and temperature must be positive, got {self.scale} and {self.temperature}")
        if not -1 < self.threshold <= 1:
            raise ParameterError(f"Threshold must be in (-1, 1], got {self.threshold}")
        if self.alpha < 0 or self.beta < 0:
            raise ParameterError(f"Loss weights must be non-negative, got {self.alpha} and {self.beta}")


class Model:
    """
    Encoder f producing z, M prototype matrices (d2 x K_m, one prototype per column) and the prediction head h.

    `parameters` exposes every trainable array under a stable name - the optimiser updates them in place, and the
    gradients produced by the objectives use the same names:

        - encoder.w1, encoder.b1, encoder.w2, encoder.b2
        - theta.0 ... theta.{M-1}
        - head.w1, head.b1, head.w2, head.b2

    """

    def __init__(self, encoder: Encoder, thetas: Sequence[ndarray], head: PredictionHead, hyper: Hyperparams):
        self.encoder = encoder
        self.thetas: List[ndarray] = [np.asarray(theta, dtype=np.float64) for theta in thetas]
        self.head = head
        self.hyper = hyper

        dims = {theta.shape[0] for theta in self.thetas}
        if len(dims) != 1:
            raise ShapeError("All prototype matrices must share the subvector dimension")
        if encoder.out_dim != self.subvector_dim * self.num_sets:
            raise ShapeError(f"Encoder output {encoder.out_dim} must equal d2 * M = {self.subvector_dim} * "
                             f"{self.num_sets}")
        if not head.in_dim == head.out_dim == encoder.out_dim:
            raise ShapeError("Prediction head width must equal the embedding width")

    @classmethod
    def initialise(cls, dim: int, hidden: int, subvector_dim: int, sizes: Sequence[int], hyper: Hyperparams,
                   rng: np.random.Generator) -> "Model":
        """
        Create a model with random weights and unit-length random prototypes.
        """
        width = subvector_dim * len(sizes)
        encoder = Encoder.initialise(dim, hidden, width, rng, num_sets=len(sizes))
        thetas = [l2_normalize(rng.standard_normal((subvector_dim, size)), axis=0) for size in sizes]
        head = PredictionHead.initialise(width, width, width, rng)
        return cls(encoder, thetas, head, hyper)

    @property
    def num_sets(self) -> int:
        """
        Get the number of meta-class sets (M).
        """
        return len(self.thetas)

    @property
    def sizes(self) -> List[int]:
        """
        Get the number of meta-classes in each set (K_m).
        """
        return [theta.shape[1] for theta in self.thetas]

    @property
    def subvector_dim(self) -> int:
        """
        Get the subvector dimension (d2).
        """
        return self.thetas[0].shape[0]

    @property
    def parameters(self) -> Dict[str, ndarray]:
        """
        Get all trainable arrays by name (the arrays themselves, not copies).
        """
        params = OrderedDict()
        for name, value in self.encoder.params.items():
            params[f"encoder.{name}"] = value
        for index, theta in enumerate(self.thetas):
            params[f"theta.{index}"] = theta
        for name, value in self.head.params.items():
            params[f"head.{name}"] = value
        return params

    def normalise_prototypes(self):
        """
        Rescale every prototype column to unit length, in place.
        """
        for theta in self.thetas:
            theta /= np.linalg.norm(theta, axis=0, keepdims=True)

    def encode(self, x: ndarray) -> ndarray:
        """
        Map features to z.
        """
        return self.encoder(x)

    def subvectors(self, x: ndarray) -> List[ndarray]:
        """
        Map features to the M subvectors of z.
        """
        return split_subvectors(self.encode(x), self.num_sets)

    def embed(self, x: ndarray, scale: float = None) -> ndarray:
        """
        Map features to the combinatorial embedding, at the model's scale unless another one is given.
        """
        return comb_embed(self.encode(x), self.thetas, self.hyper.scale if scale is None else scale)

    def codes(self, x: ndarray) -> ndarray:
        """
        Map features to the (n, M) indices of their most similar prototypes.
        """
        return hard_assign(self.encode(x), self.thetas)


def save_model(model: Model, path: str):
    """
    Save a model in the binary form.

    Layout: magic `CEMB`, u32 header (d, hidden, d1, d2, M, K_1..K_M), then f32 arrays - encoder w1 (d x hidden,
    row-major), b1, w2 (hidden x d1, row-major), b2, prototype matrices in column-major order, head w1, b1, w2, b2 -
    and finally f32 scale, temperature, threshold, alpha, beta. Everything is little-endian.
    """
    header = [model.encoder.in_dim, model.encoder.hidden, model.encoder.out_dim, model.subvector_dim,
              model.num_sets] + model.sizes
    arrays = [value.ravel(order="F") if name.startswith("theta.") else value.ravel()
              for name, value in model.parameters.items()]
    hyper = [model.hyper.scale, model.hyper.temperature, model.hyper.threshold, model.hyper.alpha, model.hyper.beta]

    try:
        with open(path, "wb") as f:
            f.write(MODEL_MAGIC)
            f.write(np.array(header, dtype="<u4").tobytes())
            for array in arrays:
                f.write(array.astype("<f4").tobytes())
            f.write(np.array(hyper, dtype="<f4").tobytes())
    except OSError as ex:
        raise FormatError(f"Failed to write model {path} - {ex}") from ex

    logger.debug(f"Saved model with M={model.num_sets}, K={model.sizes}, d2={model.subvector_dim} to {path}")


class _Reader:
    """
    Sequential little-endian reader over a byte buffer, reporting offsets in its errors.
    """

    def __init__(self, data: bytes, path: str):
        self._data = data
        self._path = path
        self.offset = 0

    def read(self, dtype: str, count: int) -> ndarray:
        size = np.dtype(dtype).itemsize * count
        if self.offset + size > len(self._data):
            raise FormatError(f"Truncated model file {self._path}", f"offset {self.offset}")
        values = np.frombuffer(self._data, dtype=dtype, count=count, offset=self.offset)
        self.offset += size
        return values

    def done(self):
        if self.offset != len(self._data):
            raise FormatError(f"Unexpected trailing bytes in model file {self._path}", f"offset {self.offset}")


def load_model(path: str) -> Model:
    """
    Load a model saved by `save_model`. Parameters are widened back to float64.
    """
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as ex:
        raise FormatError(f"Failed to read model {path} - {ex}") from ex

    if data[:len(MODEL_MAGIC)] != MODEL_MAGIC:
        raise FormatError(f"Not a model file {path}", "offset 0")
    reader = _Reader(data, path)
    reader.offset = len(MODEL_MAGIC)

    dim, hidden, width, subvector_dim, num_sets = (int(value) for value in reader.read("<u4", 5))
    sizes = [int(value) for value in reader.read("<u4", num_sets)]
    if num_sets < 1 or width != subvector_dim * num_sets or min(sizes) < 1:
        raise FormatError(f"Inconsistent model header in {path}", f"offset {len(MODEL_MAGIC)}")

    def array(shape, order="C"):
        return reader.read("<f4", int(np.prod(shape))).astype(np.float64).reshape(shape, order=order).copy()

    encoder = Encoder(array((dim, hidden)), array((hidden,)), array((hidden, width)), array((width,)),
                      num_sets=num_sets)
    thetas = [array((subvector_dim, size), order="F") for size in sizes]
    head = PredictionHead(array((width, width)), array((width,)), array((width, width)), array((width,)))
    scale, temperature, threshold, alpha, beta = (float(value) for value in reader.read("<f4", 5))
    reader.done()

    try:
        hyper = Hyperparams(scale, temperature, threshold, alpha, beta)
    except ParameterError as ex:
        raise FormatError(f"Invalid hyperparameters in model file {path} - {ex}") from ex

    logger.debug(f"Loaded model with M={num_sets}, K={sizes}, d2={subvector_dim} from {path}")
    return Model(encoder, [np.ascontiguousarray(theta) for theta in thetas], head, hyper)

