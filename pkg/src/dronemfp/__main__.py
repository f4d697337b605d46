import sys

from dronemfp.cli import main

sys.exit(main())
