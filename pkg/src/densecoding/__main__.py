import sys

from densecoding.cli import main

sys.exit(main())
