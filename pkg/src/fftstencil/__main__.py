import sys

from fftstencil.cli import main

sys.exit(main())
