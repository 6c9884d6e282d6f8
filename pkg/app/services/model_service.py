"""
Parameter validation and the bath spectral density
"""

import logging
import math
from typing import List, Tuple, Union

from app.core.config import settings
from app.core.errors import (
    BiasOutOfRange,
    DiscreteBathHasNoDensity,
    InvalidBath,
    InvalidConfig,
    NegativeAlpha,
    NonPositiveDelta,
    SuperOhmicUnsupported,
    ValidationFailed,
)
from app.models import ContinuumBath, DiscreteBath, ModelParams

logger = logging.getLogger(__name__)

class ModelService:
    """Service for model parameters and bath definitions"""

    @staticmethod
    def validate(params: ModelParams) -> ModelParams:
        """Return params in units of omega_c, or raise a field-specific error.

        Negative bias is rejected; the model is symmetric under
        (epsilon, sigma^z) -> (-epsilon, -sigma^z).
        """
        for name, value in params.model_dump().items():
            if not math.isfinite(value):
                raise InvalidConfig(f"{name} must be finite", field=name)
        if params.omega_c <= 0:
            raise InvalidConfig("omega_c must be positive", field="omega_c")

        scale = params.omega_c
        normalized = ModelParams(
            delta=params.delta / scale,
            epsilon=params.epsilon / scale,
            k_ising=params.k_ising / scale,
            alpha=params.alpha,
            s=params.s,
            omega_c=1.0,
        )

        if normalized.delta <= 0:
            raise NonPositiveDelta("delta must be positive", field="delta")
        if normalized.s > 1:
            raise SuperOhmicUnsupported(
                f"s={normalized.s} is super-Ohmic; the two-qubit system stays delocalized for s>1",
                field="s",
            )
        if normalized.s <= 0:
            raise ValidationFailed("s must lie in (0, 1]", field="s")
        if normalized.alpha < 0:
            raise NegativeAlpha("alpha must be non-negative", field="alpha")
        if normalized.epsilon < 0 or normalized.epsilon > settings.BIAS_MAX:
            raise BiasOutOfRange(
                f"epsilon must lie in [0, {settings.BIAS_MAX}] (units of omega_c)", field="epsilon"
            )
        if normalized.epsilon > settings.BIAS_WARN:
            logger.warning("epsilon=%g exceeds %g; the weak-bias results lose accuracy",
                           normalized.epsilon, settings.BIAS_WARN)
        return normalized

    @staticmethod
    def check_bath(bath: Union[ContinuumBath, DiscreteBath]) -> Tuple[bool, List[str]]:
        """Check a bath description, collecting every problem"""
        errors = []
        if isinstance(bath, ContinuumBath):
            if bath.alpha < 0:
                errors.append("alpha must be non-negative")
            if not 0 < bath.s <= 1:
                errors.append("s must lie in (0, 1]")
            if bath.omega_c <= 0:
                errors.append("omega_c must be positive")
        else:
            if not bath.modes:
                errors.append("discrete bath needs at least one mode")
            for index, (g, omega) in enumerate(bath.modes):
                if not (math.isfinite(g) and math.isfinite(omega)):
                    errors.append(f"mode {index} is not finite")
                elif omega <= 0:
                    errors.append(f"mode {index} has non-positive frequency {omega}")
        return len(errors) == 0, errors

    @staticmethod
    def validate_bath(bath: Union[ContinuumBath, DiscreteBath]) -> Union[ContinuumBath, DiscreteBath]:
        """Raise InvalidBath unless the bath is usable"""
        ok, errors = ModelService.check_bath(bath)
        if not ok:
            raise InvalidBath("; ".join(errors), field="bath", details=errors)
        return bath

    @staticmethod
    def spectral_density(bath: Union[ContinuumBath, DiscreteBath], omega: float) -> float:
        """J(omega) = 2 alpha omega^s omega_c^(1-s) below the cutoff, zero above"""
        if isinstance(bath, DiscreteBath):
            raise DiscreteBathHasNoDensity("discrete baths are described by their modes, not a density")
        if omega < 0:
            raise ValidationFailed("omega must be non-negative", field="omega")
        if omega > bath.omega_c:
            return 0.0
        return 2.0 * bath.alpha * omega ** bath.s * bath.omega_c ** (1.0 - bath.s)
