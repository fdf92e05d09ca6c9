import sys

from spectralloop.cli import main

sys.exit(main())
