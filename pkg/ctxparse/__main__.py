from __future__ import annotations

import sys

from ctxparse.app.app import run


def main():
    """Main entry point for the ctxparse package."""
    sys.exit(run())


if __name__ == "__main__":
    main()
