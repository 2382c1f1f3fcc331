# Empty file to make ctxparse.app a Python package
from __future__ import annotations
