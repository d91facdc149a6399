"""
Communication schemes and communication-matrix sampling.
"""
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.utils.errors import ConfigError

SchemeKind = Literal["fixed", "default", "asymmetric", "dynamic"]

DEFAULT_INTERVAL = 5


class CommScheme(BaseModel):
    """
    How the communication matrix is drawn

    @param kind - fixed(p), default (one p ~ U(0,1) per episode), asymmetric
                  (independent entries per episode) or dynamic (independent
                  entries redrawn every `interval` steps)
    @param p - Off-diagonal probability for the fixed variant
    @param interval - Redraw period in steps for the dynamic variant
    """
    kind: SchemeKind
    p: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    interval: int = Field(default=DEFAULT_INTERVAL, ge=1)

    @model_validator(mode="after")
    def _check_fixed(self) -> "CommScheme":
        if self.kind == "fixed" and self.p is None:
            raise ValueError("fixed scheme requires p")
        return self

    @classmethod
    def parse(cls, text: str) -> "CommScheme":
        """
        Parse `fixed:<p>`, `default`, `asymmetric` or `dynamic:<interval>`.

        @param text - Scheme string from the CLI or a config file
        @return The scheme
        """
        raw = str(text).strip().lower()
        head, _, arg = raw.partition(":")
        try:
            if head == "fixed":
                return cls(kind="fixed", p=float(arg))
            if head == "default" and not arg:
                return cls(kind="default")
            if head == "asymmetric" and not arg:
                return cls(kind="asymmetric")
            if head == "dynamic":
                return cls(kind="dynamic", interval=int(arg) if arg else DEFAULT_INTERVAL)
        except ValueError as e:
            raise ConfigError(f"Invalid communication scheme '{text}': {e}", {"scheme": text}) from e
        raise ConfigError(f"Unknown communication scheme '{text}'", {"scheme": text})

    @classmethod
    def fixed(cls, p: float) -> "CommScheme":
        return cls(kind="fixed", p=p)

    def __str__(self) -> str:
        if self.kind == "fixed":
            return f"fixed:{self.p:g}"
        if self.kind == "dynamic":
            return f"dynamic:{self.interval}"
        return self.kind


def sample_matrix(scheme: CommScheme, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draw an n×n communication matrix; the diagonal is always 1.

    @param scheme - Sampling scheme
    @param n - Number of agents
    @param rng - Communication random stream
    @return Matrix of sharing probabilities
    """
    if n < 1:
        raise ConfigError("Communication matrix needs at least one agent", {"n": n})
    if scheme.kind == "fixed":
        C = np.full((n, n), float(scheme.p))
    elif scheme.kind == "default":
        C = np.full((n, n), float(rng.uniform(0.0, 1.0)))
    else:
        C = rng.uniform(0.0, 1.0, size=(n, n))
    np.fill_diagonal(C, 1.0)
    return C


def maybe_resample(
    scheme: CommScheme, t: int, current: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """
    Redraw the matrix at dynamic epoch boundaries (t = interval, 2·interval, ...).

    @param scheme - Sampling scheme
    @param t - Current step
    @param current - Matrix in force
    @param rng - Communication random stream
    @return The matrix to use at step t
    """
    if scheme.kind == "dynamic" and t > 0 and t % scheme.interval == 0:
        return sample_matrix(scheme, current.shape[0], rng)
    return current


def off_diagonal_mean(C: np.ndarray) -> Optional[float]:
    """Mean off-diagonal probability, the scalar reported as p_drawn."""
    n = C.shape[0]
    if n < 2:
        return None
    return float((C.sum() - np.trace(C)) / (n * (n - 1)))
