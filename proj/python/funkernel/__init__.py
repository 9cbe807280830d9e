"""Function-on-function kernel ridge regression."""

try:
    from funkernel._funkernel import *  # noqa: F401,F403
    from funkernel._funkernel import __doc__  # noqa: F401
except ImportError:  # in-build-tree layout: extension next to the package dir
    from _funkernel import *  # noqa: F401,F403
    from _funkernel import __doc__  # noqa: F401
