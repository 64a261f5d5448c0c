import sys

from critnet.cli import main

if __name__ == "__main__":
    sys.exit(main())
