"""Multi-view object image search.

Local features (Harris corners + determinant-of-Hessian blobs) are
described with 128-D gradient-histogram descriptors, quantized against
per-channel k-means vocabularies, and compared as concatenated
bag-of-visual-words histograms. Multi-view queries and multi-view
database objects are combined with early fusion on histograms or late
fusion on scores/ranks. Ships a CLI, an HTTP service with incremental
query sessions, and an evaluation harness.
"""

from . import _kernels
from ._kernels import active_backend, available_backends, set_backend
from .errors import DataError, MvsError, ServiceError
from .features import (
    Descriptor,
    DescriptorSet,
    DetectorConfig,
    InterestPoint,
    detect_blobs,
    detect_corners,
    describe,
    describe_many,
    extract,
    load_descriptors,
    save_descriptors,
)
from .fusion import (
    EARLY_KINDS,
    LATE_IMAGE_KINDS,
    LATE_KINDS,
    LATE_SET_KINDS,
    ResultEntry,
    early_fuse,
    fuse_image_rankings,
    set_similarity,
)
from .image import load_image, to_gray
from .index import (
    FUSION_KINDS,
    FUSION_NONE,
    BuildConfig,
    IndexStore,
    ObjectRecord,
    ObjectView,
    QuerySpec,
    build_store,
    build_store_from_descriptors,
    load_store,
    query,
    query_histograms,
    save_store,
)
from .kmeans import KMeansConfig, KMeansResult, kmeans
from .similarity import KINDS as SIMILARITY_KINDS
from .similarity import (
    similarity,
    similarity_matrix,
    similarity_pairs,
    similarity_to_many,
)
from .vocabulary import (
    Vocabulary,
    build_bow,
    load_vocabulary,
    quantize,
    quantize_many,
    save_vocabulary,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "MvsError",
    "ServiceError",
    "Descriptor",
    "DescriptorSet",
    "DetectorConfig",
    "InterestPoint",
    "detect_blobs",
    "detect_corners",
    "describe",
    "describe_many",
    "extract",
    "load_descriptors",
    "save_descriptors",
    "EARLY_KINDS",
    "LATE_IMAGE_KINDS",
    "LATE_KINDS",
    "LATE_SET_KINDS",
    "SIMILARITY_KINDS",
    "FUSION_KINDS",
    "FUSION_NONE",
    "ResultEntry",
    "early_fuse",
    "fuse_image_rankings",
    "set_similarity",
    "load_image",
    "to_gray",
    "BuildConfig",
    "IndexStore",
    "ObjectRecord",
    "ObjectView",
    "QuerySpec",
    "build_store",
    "build_store_from_descriptors",
    "load_store",
    "query",
    "query_histograms",
    "save_store",
    "KMeansConfig",
    "KMeansResult",
    "kmeans",
    "similarity",
    "similarity_matrix",
    "similarity_pairs",
    "similarity_to_many",
    "Vocabulary",
    "build_bow",
    "load_vocabulary",
    "quantize",
    "quantize_many",
    "save_vocabulary",
    "train",
    "active_backend",
    "available_backends",
    "set_backend",
    "__version__",
]
