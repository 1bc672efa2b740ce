"""
Composition root - wires configuration and logging, then hands over to the CLI.
No business logic, only assembly.
"""
import sys

from app.core.config import settings
from app.core.logging import setup_logging
from app.interfaces.cli import CommandLine


def bootstrap() -> CommandLine:
    # 1. Configuration
    config = settings

    # 2. Logging
    setup_logging(config.log_level, config.log_format)

    # 3. Command line
    return CommandLine(config)


if __name__ == "__main__":
    sys.exit(bootstrap().run(sys.argv[1:]))
