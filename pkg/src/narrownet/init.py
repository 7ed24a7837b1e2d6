"""LeCun and mirrored-LeCun initialisation.

Gaussian draws come from a fixed transform of a uniform stream so the
sequence is fully determined by the seed: uniforms are taken from numpy's
PCG64 generator (``Generator.random``) and turned into normals with the
Box-Muller transform, consuming uniforms in pairs ``(u1, u2)`` and emitting
``r cos(t)`` then ``r sin(t)`` with ``r = sqrt(-2 log(1 - u1))``,
``t = 2 pi u2``. Hidden weights are drawn first (column-major, i.e. ``w_1``
then ``w_2`` ...), outer weights second.
"""

from __future__ import annotations

import numpy as np

from .model import Head, Params, check_width

SEED_MASK = (1 << 64) - 1


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0 or seed > SEED_MASK:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(_check_seed(seed)))


def box_muller(rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` standard normals from ``ceil(size/2)`` uniform pairs."""
    pairs = (size + 1) // 2
    u = rng.random(2 * pairs).reshape(pairs, 2)
    r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    t = 2.0 * np.pi * u[:, 1]
    z = np.stack([r * np.cos(t), r * np.sin(t)], axis=1).ravel()
    return z[:size]


def normal(rng: np.random.Generator, shape, std: float) -> np.ndarray:
    shape = tuple(np.atleast_1d(shape))
    return std * box_muller(rng, int(np.prod(shape))).reshape(shape)


def _hidden(rng, d: int, k: int) -> np.ndarray:
    # columns drawn one after another, so transpose a (k, d) draw
    return normal(rng, (k, d), 1.0 / np.sqrt(d)).T.copy()


def lecun_init(d: int, m: int, head: Head | str = Head.PLAIN, seed: int = 0, activation="tanh") -> Params:
    """w ~ N(0, 1/d), v ~ N(0, 1/m), all independent."""
    head = Head(head)
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    check_width(m, head)
    rng = make_generator(seed)
    w = _hidden(rng, d, m)
    nv = m if head is Head.PLAIN else m // 2
    v = normal(rng, nv, 1.0 / np.sqrt(m))
    return Params(w, v, head, activation)


def mirrored_lecun_init(d: int, m: int, head: Head | str = Head.PAIRED, seed: int = 0, activation="tanh") -> Params:
    """First half of the hidden units drawn as in :func:`lecun_init`, copied
    into the second half; outer weights cancel so the output is identically 0.

    Plain head: ``v = (v_half, -v_half)``. Paired head: ``v = v_half`` and the
    negation is carried by the head itself.
    """
    head = Head(head)
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    check_width(m, Head.PAIRED)
    rng = make_generator(seed)
    half = _hidden(rng, d, m // 2)
    w = np.concatenate([half, half], axis=1)
    v_half = normal(rng, m // 2, 1.0 / np.sqrt(m))
    v = np.concatenate([v_half, -v_half]) if head is Head.PLAIN else v_half
    return Params(w, v, head, activation)
