"""Shim configuration, from keyword arguments or SHIM_* environment variables."""

import os
from dataclasses import dataclass


@dataclass
class ShimConfig:
    embed_model: str = "hash:256"
    gen_model: str = "template"
    port: int = 8090
    max_batch: int = 64
    device: str = "cpu"
    token: str | None = None  # static bearer token; None disables auth

    @classmethod
    def from_env(cls) -> "ShimConfig":
        return cls(
            embed_model=os.environ.get("SHIM_EMBED_MODEL", cls.embed_model),
            gen_model=os.environ.get("SHIM_GEN_MODEL", cls.gen_model),
            port=int(os.environ.get("SHIM_PORT", cls.port)),
            max_batch=int(os.environ.get("SHIM_MAX_BATCH", cls.max_batch)),
            device=os.environ.get("SHIM_DEVICE", cls.device),
            token=os.environ.get("SHIM_TOKEN") or None,
        )

    def validate(self) -> None:
        if self.max_batch < 1:
            raise ValueError(f"max_batch must be >= 1, got {self.max_batch}")
        if not (0 < self.port < 65536):
            raise ValueError(f"port out of range: {self.port}")
