import sys

from strongrand.cli import main

sys.exit(main())
