"""Exact constructor and verifier for sl2 KZ solutions over F_p."""

try:
    from ._kzmodp import *  # noqa: F401,F403
except ImportError:  # build-tree layout: the extension sits next to the package
    from _kzmodp import *  # noqa: F401,F403
