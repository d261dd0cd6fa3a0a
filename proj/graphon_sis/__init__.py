"""SIS/SI dynamics on graphon kernels: python face of the C++ core.

Installed wheels carry the extension inside the package; in-tree test runs
find it at the top of the CMake build directory instead (PYTHONPATH set by
ctest).
"""

try:
    from graphon_sis._core import *  # noqa: F401,F403
    from graphon_sis._core import __version__  # noqa: F401
except ImportError:  # in-tree layout: _core.so sits in the build directory
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
