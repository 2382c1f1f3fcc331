# Empty file to make ctxparse.core a Python package
from __future__ import annotations
