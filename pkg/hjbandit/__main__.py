import sys

from hjbandit.cli import main

sys.exit(main())
