"""Energy/dissipation functionals and stability checks for multistep finite difference schemes."""

__version__ = "0.1.0"
