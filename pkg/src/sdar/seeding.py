"""Deterministic derivation of named random substreams from a single run seed.

A run seed fans out into independent substreams ("env", "policy", "replay",
"init/<net>", "eval", ...) so that adding draws to one component never
perturbs the others.  Derivation: the label is hashed with FNV-1a, mixed
with the run seed, and pushed through one splitmix64 round; the result
seeds a PCG64 generator.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _fnv1a64(text: str) -> int:
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def splitmix64(x: int) -> int:
    """One round of the splitmix64 mixer (finalizer included)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(run_seed: int, label: str) -> int:
    """Derive the 64-bit seed of the named substream."""
    return splitmix64((run_seed & _MASK64) ^ _fnv1a64(label))


def substream(run_seed: int, label: str) -> np.random.Generator:
    """Return a fresh generator for the named substream of ``run_seed``."""
    return np.random.Generator(np.random.PCG64(derive_seed(run_seed, label)))
