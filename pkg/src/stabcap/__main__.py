import sys

from stabcap.cli import main

sys.exit(main())
