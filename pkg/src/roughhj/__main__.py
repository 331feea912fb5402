import sys

from roughhj.lab.cli import main

sys.exit(main())
