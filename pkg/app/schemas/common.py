"""
Common Pydantic schemas
"""

from typing import Any, Optional
from pydantic import BaseModel

class ErrorResponse(BaseModel):
    """Error envelope written to stderr"""
    success: bool = False
    message: str
    error_code: Optional[str] = None
    field: Optional[str] = None
    details: Optional[Any] = None
