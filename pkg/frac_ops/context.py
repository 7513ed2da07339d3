"""
Fractional Order Context
Holds alpha and the constants every Atangana-Baleanu operator derives from it
"""
import math
from dataclasses import dataclass, field
from typing import Optional

from scipy.special import rgamma

from .errors import OrderDomainError


@dataclass(frozen=True)
class AlphaContext:
    """Order alpha in [0, 1], normalisation B(alpha) and kernel rate alpha/(1-alpha)"""

    alpha: float
    b_of_alpha: float = field(init=False)
    gamma_rate: Optional[float] = field(init=False)

    def __post_init__(self):
        if not math.isfinite(self.alpha) or not 0.0 <= self.alpha <= 1.0:
            raise OrderDomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        alpha = float(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        # alpha / Gamma(alpha) written with rgamma so that alpha = 0 gives 0
        object.__setattr__(self, "b_of_alpha", (1.0 - alpha) + alpha * float(rgamma(alpha)))
        object.__setattr__(self, "gamma_rate", alpha / (1.0 - alpha) if alpha < 1.0 else None)

    @property
    def is_derivative_order(self) -> bool:
        return 0.0 < self.alpha < 1.0

    def require_derivative_order(self) -> None:
        """ABC/ABR operators divide by 1 - alpha and need alpha in (0, 1)."""
        if not self.is_derivative_order:
            raise OrderDomainError(f"derivative operators need alpha in (0, 1), got {self.alpha}")

    @property
    def scale(self) -> float:
        """B(alpha) / (1 - alpha)"""
        self.require_derivative_order()
        return self.b_of_alpha / (1.0 - self.alpha)
