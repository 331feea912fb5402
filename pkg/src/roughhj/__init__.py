"""Hamilton-Jacobi equations with rough time dependence.

Solvers for ``u_t = H(Du) * xi'(t)`` with a continuous, piecewise-linear
driver ``xi``, a dynamic-programming oracle for the associated two-player
differential game, and an experiment runner that checks the
infinite-speed-of-propagation example against both.
"""

from roughhj.errors import ConfigError, ContractError, DomainError, RoughHJError

__version__ = "0.1.0"

__all__ = ["ConfigError", "ContractError", "DomainError", "RoughHJError", "__version__"]
