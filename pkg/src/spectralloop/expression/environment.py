"""Names available inside expressions.

Manages the constant and function bindings the parser accepts and the
evaluator applies.
"""

from collections.abc import Callable

import numpy as np

Function = Callable[[np.ndarray], np.ndarray]


class Environment:
    """Bindings for expression evaluation.

    The environment stores the built-in constants (pi, i) and the complex
    functions exp, cos, sin, sqrt, abs, re, im, conj. All functions act
    elementwise on complex arrays.
    """

    def __init__(self) -> None:
        """Initialize the environment with the built-in names."""
        self.constants: dict[str, complex] = {"pi": complex(np.pi), "i": 1j}
        self.functions: dict[str, Function] = {
            "exp": np.exp,
            "cos": np.cos,
            "sin": np.sin,
            "sqrt": np.sqrt,
            "abs": lambda z: np.abs(z).astype(complex),
            "re": lambda z: np.real(z).astype(complex),
            "im": lambda z: np.imag(z).astype(complex),
            "conj": np.conj,
        }

    def get_constant(self, name: str) -> complex:
        """Get a constant value.

        Raises:
            NameError: If the constant is not defined
        """
        if name not in self.constants:
            raise NameError(f"Undefined constant: {name}")
        return self.constants[name]

    def get_function(self, name: str) -> Function:
        """Get a function by name.

        Raises:
            NameError: If the function is not defined
        """
        if name not in self.functions:
            raise NameError(f"Undefined function: {name}")
        return self.functions[name]

    def has_constant(self, name: str) -> bool:
        """Check if a constant is defined."""
        return name in self.constants

    def has_function(self, name: str) -> bool:
        """Check if a function is defined."""
        return name in self.functions
