import sys

from mottlight.cli import main

sys.exit(main())
