import sys

from feyncount.cli import main

sys.exit(main())
