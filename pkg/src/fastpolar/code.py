"""Polar code definitions, frozen-set construction and code-spec files."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
import yaml


class SpecFormatError(ValueError):
    """Raised for malformed or inconsistent code-spec documents."""


def is_power_of_two(x: int) -> bool:
    return isinstance(x, (int, np.integer)) and x > 0 and (x & (x - 1)) == 0


@dataclass(frozen=True)
class CodeSpec:
    """An (n, k) polar code with its frozen mask in natural indexing.

    ``frozen[i]`` is True when u_i is fixed to zero.
    """

    n: int
    k: int
    frozen: tuple[bool, ...]

    def __post_init__(self):
        if not is_power_of_two(self.n):
            raise ValueError(f"n must be a power of two, got {self.n}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"k must satisfy 1 <= k <= n, got k={self.k}, n={self.n}")
        frozen = tuple(bool(b) for b in self.frozen)
        if len(frozen) != self.n:
            raise ValueError(f"frozen mask has length {len(frozen)}, expected {self.n}")
        if sum(frozen) != self.n - self.k:
            raise ValueError(
                f"frozen mask has {sum(frozen)} frozen bits, expected n - k = {self.n - self.k}"
            )
        object.__setattr__(self, "frozen", frozen)

    @classmethod
    def from_frozen_indices(cls, n: int, frozen_indices) -> CodeSpec:
        idx = sorted(int(i) for i in frozen_indices)
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate frozen index")
        if idx and (idx[0] < 0 or idx[-1] >= n):
            raise ValueError(f"frozen index out of range for n={n}")
        mask = [False] * n
        for i in idx:
            mask[i] = True
        return cls(n, n - len(idx), tuple(mask))

    @property
    def mask(self) -> np.ndarray:
        return np.array(self.frozen, dtype=bool)

    @property
    def frozen_indices(self) -> list[int]:
        return [i for i, f in enumerate(self.frozen) if f]

    @property
    def info_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.mask)

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def digest(self) -> str:
        """Short content hash of the canonical spec text."""
        return hashlib.sha256(save_spec(self).encode()).hexdigest()[:16]

    @property
    def name(self) -> str:
        return f"({self.n},{self.k})"


def _check_nk(n, k):
    if not is_power_of_two(n):
        raise ValueError(f"n must be a power of two, got {n}")
    if not 0 < k <= n:
        raise ValueError(f"k must satisfy 0 < k <= n, got {k}")


def _from_reliability(n: int, k: int, reliability: np.ndarray) -> CodeSpec:
    # stable sort: equal scores keep index order, lower index frozen first
    order = np.argsort(reliability, kind="stable")
    mask = np.zeros(n, dtype=bool)
    mask[order[: n - k]] = True
    return CodeSpec(n, k, tuple(mask.tolist()))


def _polarize(n: int, channel, worse, better) -> np.ndarray:
    # index bits are consumed MSB first: the MSB picks the root split
    vals = np.array([channel], dtype=float)
    while vals.size < n:
        nxt = np.empty(2 * vals.size)
        nxt[0::2] = worse(vals)
        nxt[1::2] = better(vals)
        vals = nxt
    return vals


def bhattacharyya_parameters(n: int, erasure_prob: float) -> np.ndarray:
    """Per-index Bhattacharyya parameters for a BEC (larger = less reliable)."""
    if not 0.0 < erasure_prob < 1.0:
        raise ValueError(f"erasure_prob must lie in (0, 1), got {erasure_prob}")
    if not is_power_of_two(n):
        raise ValueError(f"n must be a power of two, got {n}")
    return _polarize(n, erasure_prob, lambda z: 2 * z - z * z, lambda z: z * z)


def construct_bhattacharyya(n: int, k: int, erasure_prob: float = 0.5) -> CodeSpec:
    _check_nk(n, k)
    z = bhattacharyya_parameters(n, erasure_prob)
    return _from_reliability(n, k, -z)


# Two-branch approximation of phi(x) = 1 - E[tanh(L/2)], L ~ N(x, 2x).
# Evaluated in the log domain so that large means (long codes, high SNR)
# neither underflow phi nor overflow its inverse.  The branches meet with a
# log-gap of about 0.024 at the split; bisection below tolerates it.
_PHI_SPLIT = 10.0


def log_phi(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    xs = np.clip(x, 0.0, _PHI_SPLIT)
    xl = np.maximum(x, _PHI_SPLIT)
    small = -0.4527 * np.power(xs, 0.86) + 0.0218
    large = 0.5 * np.log(np.pi / xl) - xl / 4.0 + np.log1p(-10.0 / (7.0 * xl))
    # phi(0) = 1; the fitted branch slightly exceeds it near zero
    return np.minimum(np.where(x < _PHI_SPLIT, small, large), 0.0)


def _inv_log_phi(target: np.ndarray, upper: np.ndarray) -> np.ndarray:
    # bisection on [0, upper]; 80 halvings put the bracket below 1e-20 * upper
    lo = np.zeros_like(target)
    hi = upper.copy()
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        above = log_phi(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def ga_means(n: int, design_snr_db: float, rate: float) -> np.ndarray:
    """Mean LLR per synthetic channel under the Gaussian approximation.

    ``design_snr_db`` is Eb/N0; BPSK over AWGN with noise variance
    1 / (2 * rate * 10**(snr/10)).
    """
    sigma2 = 1.0 / (2.0 * rate * 10.0 ** (design_snr_db / 10.0))

    def worse(m):
        lp = log_phi(m)
        # 1 - (1 - phi)^2 = phi * (2 - phi)
        return _inv_log_phi(lp + np.log(2.0 - np.exp(lp)), m)

    return _polarize(n, 2.0 / sigma2, worse, lambda m: 2.0 * m)


def construct_ga(n: int, k: int, design_snr_db: float = 0.0) -> CodeSpec:
    """Freeze the n - k channels with the smallest GA mean LLR."""
    _check_nk(n, k)
    return _from_reliability(n, k, ga_means(n, design_snr_db, k / n))


_SPEC_KEYS = {"n", "k", "frozen"}


def load_spec(text: str) -> CodeSpec:
    """Parse a code-spec document (YAML mapping with n, k, frozen)."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SpecFormatError(f"malformed code-spec document: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecFormatError("code-spec document must be a mapping")
    unknown = set(doc) - _SPEC_KEYS
    if unknown:
        raise SpecFormatError(f"unknown fields: {sorted(unknown)}")
    missing = _SPEC_KEYS - set(doc)
    if missing:
        raise SpecFormatError(f"missing fields: {sorted(missing)}")
    n, k, frozen = doc["n"], doc["k"], doc["frozen"]
    if not isinstance(n, int) or not isinstance(k, int) or isinstance(n, bool):
        raise SpecFormatError("n and k must be integers")
    if frozen is None:
        frozen = []
    if not isinstance(frozen, list) or not all(
        isinstance(i, int) and not isinstance(i, bool) for i in frozen
    ):
        raise SpecFormatError("frozen must be a list of integers")
    if frozen != sorted(set(frozen)):
        raise SpecFormatError("frozen indices must be unique and ascending")
    if len(frozen) != n - k:
        raise SpecFormatError(
            f"frozen set has {len(frozen)} indices but n - k = {n - k}"
        )
    try:
        spec = CodeSpec.from_frozen_indices(n, frozen)
    except ValueError as exc:
        raise SpecFormatError(str(exc)) from exc
    if spec.k != k:
        raise SpecFormatError(f"k={k} inconsistent with frozen set")
    return spec


def save_spec(spec: CodeSpec) -> str:
    idx = ", ".join(str(i) for i in spec.frozen_indices)
    return f"n: {spec.n}\nk: {spec.k}\nfrozen: [{idx}]\n"


def read_spec(path) -> CodeSpec:
    with open(path, encoding="utf-8") as fh:
        return load_spec(fh.read())


def write_spec(spec: CodeSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(save_spec(spec))
