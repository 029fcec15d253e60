"""
Kansa RBF collocation for the Poisson equation
"""
__version__ = "0.1.0"
