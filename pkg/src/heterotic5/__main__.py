import sys

from heterotic5.cli import main

sys.exit(main())
