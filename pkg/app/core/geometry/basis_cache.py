import hashlib
import threading

import numpy as np
from cachetools import LRUCache

from ...models.geometry.basis_model import BlockBasis, ConjugateBasis
from .h_geometry import block_conjugate_basis, conjugate_basis

BASIS_CACHE = LRUCache(maxsize=16)
_lock = threading.Lock()


def matrix_key(a) -> str:
    a = np.ascontiguousarray(a, dtype=np.float64)
    digest = hashlib.sha1(a.tobytes())
    digest.update(str(a.shape).encode())
    return digest.hexdigest()


def _cached(key, build):
    with _lock:
        cached = BASIS_CACHE.get(key)
    if cached is not None:
        return cached
    basis = build()
    with _lock:
        BASIS_CACHE[key] = basis
    return basis


def cached_conjugate_basis(a) -> ConjugateBasis:
    return _cached(("conjugate", matrix_key(a)), lambda: conjugate_basis(a))


def cached_block_basis(a, composition) -> BlockBasis:
    key = ("block", matrix_key(a), tuple(int(size) for size in composition))
    return _cached(key, lambda: block_conjugate_basis(a, composition))


def clear_basis_cache() -> None:
    with _lock:
        BASIS_CACHE.clear()
