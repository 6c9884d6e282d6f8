"""
Standardized error output for the command line
"""

from typing import Any, Optional

from app.core.errors import QptError
from app.schemas.common import ErrorResponse

def error_response(
    message: str,
    error_code: Optional[str] = None,
    field: Optional[str] = None,
    details: Any = None,
) -> ErrorResponse:
    """Create standardized error response"""
    return ErrorResponse(message=message, error_code=error_code, field=field, details=details)

def error_from_exception(exc: QptError) -> ErrorResponse:
    """Error envelope naming the failing field, if known"""
    return error_response(exc.message, error_code=exc.error_code, field=exc.field, details=exc.details)
