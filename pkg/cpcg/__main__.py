import sys

from cpcg.main import main

sys.exit(main())
