"""
Main initialization and startup script for the DNLS Birkhoff toolkit
"""
import sys

from cli.main import run
from logs.logger import system_logger
from settings import settings


def main():
    """Main entry point"""
    system_logger.info(f"Initializing {settings.APP_NAME} {settings.VERSION}")
    system_logger.info(f"Environment: {settings.ENVIRONMENT}")
    try:
        code = run(sys.argv[1:])
    except KeyboardInterrupt:
        system_logger.info("Received shutdown signal")
        code = 1
    sys.exit(code)


if __name__ == "__main__":
    main()
