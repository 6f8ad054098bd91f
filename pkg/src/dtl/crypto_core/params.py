from __future__ import annotations

from dataclasses import dataclass

from ..encoding import Writer

DEFAULT_TREE_DEPTH = 20
DEFAULT_ROOT_WINDOW = 30
DEFAULT_RANGE_BITS = 32


@dataclass(frozen=True)
class SecParams:
    lambda_bits: int = 128
    tree_depth: int = DEFAULT_TREE_DEPTH
    root_window_k: int = DEFAULT_ROOT_WINDOW
    plaintext_range_bits: int = DEFAULT_RANGE_BITS

    def __post_init__(self) -> None:
        if self.lambda_bits < 128 or self.lambda_bits % 8:
            raise ValueError("lambda_bits must be a multiple of 8 and >= 128")
        if not 1 <= self.tree_depth <= 32:
            raise ValueError("tree_depth must be in [1, 32]")
        if self.root_window_k < 1:
            raise ValueError("root_window_k must be >= 1")
        if not 1 <= self.plaintext_range_bits <= 40:
            raise ValueError("plaintext_range_bits must be in [1, 40]")

    @property
    def key_bytes(self) -> int:
        return self.lambda_bits // 8

    @property
    def capacity(self) -> int:
        return 1 << self.tree_depth

    def encode(self) -> bytes:
        return (
            Writer()
            .u32(self.lambda_bits)
            .u32(self.tree_depth)
            .u32(self.root_window_k)
            .u32(self.plaintext_range_bits)
            .getvalue()
        )
