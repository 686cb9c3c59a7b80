import sys

from segclust.cli import main

sys.exit(main())
