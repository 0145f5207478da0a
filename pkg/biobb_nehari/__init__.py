from . import nehari, nehari_lib

name = "biobb_nehari"
__all__ = ["nehari", "nehari_lib"]
__version__ = "1.0.0"
