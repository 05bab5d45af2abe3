import sys

from segforge.cli import main

sys.exit(main())
