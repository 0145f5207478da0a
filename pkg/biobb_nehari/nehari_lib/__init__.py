from . import checks, errors, extremal, fibering, gridfield, nehari, quotients, zeromass

name = "nehari_lib"
__all__ = ["errors", "gridfield", "fibering", "quotients", "extremal", "nehari", "zeromass", "checks"]
