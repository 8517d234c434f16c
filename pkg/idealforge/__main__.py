import sys

from idealforge.main import main

sys.exit(main())
