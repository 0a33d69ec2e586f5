import sys
from homwitness.cli import main
sys.exit(main())
