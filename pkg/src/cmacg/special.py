"""Special functions of the manifold measure theory, all in log-space.

Raw values of the complex multivariate gamma function and Stiefel manifold
volumes overflow double precision for moderate dimensions, so only
logarithms are exposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ValidationError

_LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class ManifoldDims:
    """Dimensions (m, r) of the complex Stiefel manifold of m-by-r frames."""

    m: int
    r: int

    def __post_init__(self):
        if not (isinstance(self.m, int) and isinstance(self.r, int)):
            raise ValidationError("manifold dimensions must be integers")
        if not self.m >= self.r >= 1:
            raise ValidationError(f"need m >= r >= 1, got m={self.m}, r={self.r}")


def log_cmv_gamma(r: int, a: float) -> float:
    """log of the complex multivariate gamma function of order ``r`` at ``a``.

    The function is pi^{r(r-1)/2} * prod_{i=1}^{r} Gamma(a - i + 1); every
    ordinary gamma argument must be positive, i.e. a > r - 1.

    Raises
    ------
    DomainError
        If ``a <= r - 1``.
    """
    if not isinstance(r, int) or r < 1:
        raise ValidationError(f"order r must be a positive integer, got {r}")
    a = float(a)
    if a <= r - 1:
        raise DomainError(f"need a > r - 1 = {r - 1}, got a = {a}")
    return 0.5 * r * (r - 1) * _LOG_PI + sum(math.lgamma(a - i) for i in range(r))


def log_stiefel_volume(dims: ManifoldDims) -> float:
    """log volume of the complex Stiefel manifold of m-by-r frames.

    Equals r*log(2) + m*r*log(pi) - log_cmv_gamma(r, m); finite for every
    valid (m, r) since m >= r guarantees the gamma arguments are positive.
    """
    return (
        dims.r * math.log(2.0)
        + dims.m * dims.r * _LOG_PI
        - log_cmv_gamma(dims.r, float(dims.m))
    )
