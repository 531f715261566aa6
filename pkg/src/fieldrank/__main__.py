import sys

from fieldrank.cli import main

sys.exit(main())
