"""Python bindings for the session-based recommendation benchmark."""

try:
    from ._sbr import *  # noqa: F401,F403  (installed package layout)
    from ._sbr import __version__  # noqa: F401
except ImportError:  # in-tree builds put the module next to the package
    from _sbr import *  # noqa: F401,F403
    from _sbr import __version__  # noqa: F401
