import sys

from dagquery.cli import main

sys.exit(main())
