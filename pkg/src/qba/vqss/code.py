"""Polynomial evaluation code over a prime field.

A codeword for value ``a`` is the evaluation tuple (f(p_1), ..., f(p_N))
of a polynomial of degree <= t with f(0) = a.  The same code is used at
both sharing levels.  Decoding is exhaustive minimum-distance search:
code sizes here are tiny (P^(t+1) codewords) and exhaustive search makes
the acceptance behaviour easy to reason about.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class RSCode:
    length: int
    prime: int
    degree: int
    points: tuple[int, ...] = field(default=())

    def __post_init__(self):
        pts = self.points or tuple(range(1, self.length + 1))
        object.__setattr__(self, "points", tuple(p % self.prime for p in pts))
        if self.length >= self.prime:
            raise ValueError("code length must be below the field size")
        if not (0 <= self.degree < self.length):
            raise ValueError("degree bound must lie in 0..length-1")
        if len(set(self.points)) != self.length or 0 in self.points:
            raise ValueError("evaluation points must be distinct and nonzero")

    @property
    def codewords_per_value(self) -> int:
        return self.prime**self.degree

    def codeword_matrix(self, value: int) -> np.ndarray:
        """All codewords for one value, as a (P^t, N) uint8 matrix."""
        return _codeword_matrices(self)[value % self.prime]

    def all_codewords(self) -> np.ndarray:
        return np.concatenate([self.codeword_matrix(a) for a in range(self.prime)])

    def is_codeword(self, vector) -> bool:
        return self.decode(vector, max_errors=0) is not None

    def decode(self, vector, max_errors: int = 0, positions=None):
        """Exhaustive minimum-distance decode.

        ``vector`` holds one received symbol per position (default: all N).
        Returns (value, discrepancy_positions) for the unique closest
        codeword within ``max_errors``, or None when nothing is close
        enough or the closest codeword is ambiguous.
        """
        vec = np.asarray(vector, dtype=np.int64) % self.prime
        if positions is None:
            positions = list(range(self.length))
        cols = np.asarray(positions)
        words = self.all_codewords()[:, cols].astype(np.int64)
        dists = np.count_nonzero(words != vec[None, :], axis=1)
        best = int(dists.min())
        if best > max_errors:
            return None
        candidates = np.flatnonzero(dists == best)
        if len(candidates) > 1:
            return None
        idx = int(candidates[0])
        value = idx // self.codewords_per_value
        word = words[idx]
        bad = [int(cols[i]) for i in np.flatnonzero(word != vec)]
        return value, bad

    def moments_ok(self, vector) -> bool:
        """Dual-side membership: sum_j v_j p_j^d = 0 mod P for d = 1..t.

        Fourier-transformed encodings are supported exactly on tuples
        satisfying these power-sum constraints, so measured Fourier-basis
        vectors of honest shares pass them identically.
        """
        vec = np.asarray(vector, dtype=np.int64) % self.prime
        pts = np.asarray(self.points, dtype=np.int64)
        for d in range(1, self.degree + 1):
            if int(np.sum(vec * pow_mod(pts, d, self.prime)) % self.prime) != 0:
                return False
        return True

    def interpolate_value(self, vector) -> int:
        """f(0) of the unique degree <= N-1 interpolant (no error check)."""
        vec = np.asarray(vector, dtype=np.int64) % self.prime
        P = self.prime
        total = 0
        for j, pj in enumerate(self.points):
            lam = 1
            for m, pm in enumerate(self.points):
                if m != j:
                    lam = lam * pm % P * pow(pm - pj, -1, P) % P
            total = (total + lam * vec[j]) % P
        return int(total)


def pow_mod(arr: np.ndarray, d: int, p: int) -> np.ndarray:
    out = np.ones_like(arr)
    for _ in range(d):
        out = out * arr % p
    return out


@lru_cache(maxsize=None)
def _codeword_matrices(code: RSCode) -> list[np.ndarray]:
    P, t = code.prime, code.degree
    pts = np.asarray(code.points, dtype=np.int64)
    if t == 0:
        coeff_grid = np.zeros((1, 0), dtype=np.int64)
    else:
        coeff_grid = np.indices((P,) * t).reshape(t, -1).T  # (P^t, t)
    powers = np.stack([pow_mod(pts, d, P) for d in range(1, t + 1)], axis=0) if t else None
    out = []
    for a in range(P):
        vals = np.full((coeff_grid.shape[0], code.length), a, dtype=np.int64)
        if t:
            vals = (vals + coeff_grid @ powers) % P
        out.append(vals.astype(np.uint8))
    return out
