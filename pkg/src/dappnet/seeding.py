"""Stable per-stage seed derivation from one root seed.

derive_seed(root, "nullmodels", "Aave", 3) hashes its arguments with
SHA-256 and keeps the first 8 bytes, so a seed depends only on the root
seed and the labels, never on processing order.
"""

from __future__ import annotations

import hashlib


def derive_seed(root: int, *labels: object) -> int:
    h = hashlib.sha256(str(int(root)).encode())
    for label in labels:
        h.update(b"\x1f")
        h.update(str(label).encode())
    return int.from_bytes(h.digest()[:8], "big")
