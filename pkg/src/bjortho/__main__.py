import sys

from bjortho.cli import main

sys.exit(main())
