import sys

from gr2 import config
from gr2.cli import main
from gr2.logger import setup_logger

logger = setup_logger(config.log_level())

if __name__ == "__main__":
    sys.exit(main())
