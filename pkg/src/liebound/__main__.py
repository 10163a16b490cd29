import sys

from liebound.cli import main

sys.exit(main())
