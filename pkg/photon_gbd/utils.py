"""
Utility functions for the photon-gbd toolkit
"""
import logging
import math
import sys
import time
from functools import wraps
from typing import Any, Dict, Optional


def setup_logging(log_level: str = 'INFO', log_file: Optional[str] = None):
    """Setup logging configuration; stdout stays reserved for data"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True
    )
    return logging.getLogger('photon_gbd')


def timing_decorator(func):
    """Decorator to measure function execution time"""
    @wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        execution_time = time.perf_counter() - start_time
        logging.getLogger(func.__module__).debug(
            f"{func.__name__} executed in {execution_time:.4f} seconds")
        return result
    return wrapper


def validate_positive_number(value: float, name: str) -> bool:
    """Validate that a number is positive and finite"""
    if isinstance(value, bool) or not isinstance(value, (int, float)) \
            or not math.isfinite(value) or value <= 0:
        logging.error(f"{name} must be a positive number, got: {value}")
        return False
    return True


def validate_nonnegative_number(value: float, name: str) -> bool:
    """Validate that a number is nonnegative and finite"""
    if isinstance(value, bool) or not isinstance(value, (int, float)) \
            or not math.isfinite(value) or value < 0:
        logging.error(f"{name} must be a nonnegative number, got: {value}")
        return False
    return True


def require_count(value: Any, name: str) -> int:
    """Return value as a nonnegative int or raise ValidationError"""
    if isinstance(value, bool):
        raise ValidationError(f"{name} must be a nonnegative integer, got: {value}")
    try:
        as_int = int(value)
    except (TypeError, ValueError, OverflowError):
        raise ValidationError(f"{name} must be a nonnegative integer, got: {value}")
    if as_int != value or as_int < 0:
        raise ValidationError(f"{name} must be a nonnegative integer, got: {value}")
    return as_int


def require_positive(value: Any, name: str) -> float:
    """Return value as a positive float or raise DomainError"""
    try:
        as_float = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a number, got: {value}")
    if not validate_positive_number(as_float, name):
        raise DomainError(f"{name} must be positive, got: {value}")
    return as_float


def require_nonnegative(value: Any, name: str) -> float:
    """Return value as a nonnegative float or raise DomainError"""
    try:
        as_float = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a number, got: {value}")
    if not validate_nonnegative_number(as_float, name):
        raise DomainError(f"{name} must be nonnegative, got: {value}")
    return as_float


def json_number(value: float) -> Any:
    """Map non-finite floats to strings so reports stay strict JSON"""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def format_csv_number(value: float, digits: int = 12) -> str:
    """Format a float for CSV output with a fixed number of significant digits"""
    return format(float(value), f'.{digits}g')


def canonical_flags(parameters: Dict[str, Any]) -> str:
    """Render a parameter dict as a deterministic flag string"""
    parts = []
    for key in sorted(parameters):
        value = parameters[key]
        if value is None or value is False:
            continue
        flag = '--' + key.replace('_', '-')
        if value is True:
            parts.append(flag)
        elif isinstance(value, (list, tuple)):
            parts.append(flag + ' ' + ' '.join(str(v) for v in value))
        else:
            parts.append(f"{flag} {value}")
    return ' '.join(parts)


class ValidationError(Exception):
    """Custom exception for validation errors"""
    pass


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation"""
    pass


class NumericalError(ArithmeticError):
    """Floating-point evaluation broke down"""
    pass


class DegenerateDenominatorError(NumericalError):
    """p_n(A+B) is too small to divide by; use the closed-form Polya path"""
    pass


class BudgetExhaustedError(RuntimeError):
    """Conditional sampling ran out of raw draws before its target"""

    def __init__(self, message: str, accepted: int = 0, attempts: int = 0):
        super().__init__(message)
        self.accepted = accepted
        self.attempts = attempts

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0
