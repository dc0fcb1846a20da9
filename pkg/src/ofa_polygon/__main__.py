import sys

from ofa_polygon.cli import main

sys.exit(main())
