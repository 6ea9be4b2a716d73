import sys

from .patterns_io import cli_main

sys.exit(cli_main())
