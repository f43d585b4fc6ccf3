try:
    from ._ionctl import *  # noqa: F401,F403
except ImportError:  # module built out-of-tree (ctest runs)
    from _ionctl import *  # noqa: F401,F403
