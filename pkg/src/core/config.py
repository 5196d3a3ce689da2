from dataclasses import asdict, dataclass, field, replace
from typing import Optional

from src.core.errors import UsageError


@dataclass(frozen=True)
class OrbitConfig:
    """Tunables for orbit classification. Distances are chordal."""

    max_iter: int = 10000
    conv_eps: float = 1e-9
    escape_eps: float = 1e-6
    period_max: int = 4
    confirm: int = 8
    pole_eps: float = 1e-12

    def __post_init__(self):
        if self.max_iter < 1 or self.period_max < 1 or self.confirm < 1:
            raise UsageError("max_iter, period_max and confirm must be >= 1")
        if self.conv_eps <= 0 or self.escape_eps <= 0 or self.pole_eps <= 0:
            raise UsageError("Tolerances must be positive")

    def with_overrides(self, **changes):
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class RenderConfig:
    orbit: OrbitConfig = field(default_factory=OrbitConfig)
    match_eps: float = 1e-4
    workers: Optional[int] = None

    def to_dict(self):
        return {"orbit": self.orbit.to_dict(), "match_eps": self.match_eps}
