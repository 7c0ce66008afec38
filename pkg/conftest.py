"""Root pytest conftest: puts the `src` root on sys.path once.

The project uses a `src` layout; this lets the test suite import `expsum` from a plain
checkout without an editable install.
"""
import sys
from pathlib import Path

_ROOT = Path(__file__).resolve().parent

_SRC_ROOTS = [
    _ROOT / "src",
]

for _p in _SRC_ROOTS:
    if _p.is_dir():
        sp = str(_p)
        if sp not in sys.path:
            sys.path.insert(0, sp)
