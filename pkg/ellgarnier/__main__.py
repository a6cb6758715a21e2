import sys

from ellgarnier.cli import main


sys.exit(main())
