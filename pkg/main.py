"""
Two-qubit spin-boson ground state solver
Main command line entry point
"""

import logging
import sys

from app.cli.main import main as run_cli
from app.core.config import settings

# Configure logging
logging.basicConfig(level=settings.LOG_LEVEL, stream=sys.stderr)
logger = logging.getLogger(__name__)


def main() -> int:
    return run_cli()


if __name__ == "__main__":
    sys.exit(main())
