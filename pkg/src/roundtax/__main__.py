import sys

from roundtax.cli import main

sys.exit(main())
