"""Expression evaluator.

Evaluates expression ASTs as complex functions of the path parameter x.
"""

from dataclasses import dataclass, field

import numpy as np

from spectralloop.errors import ExpressionError
from spectralloop.expression.ast_nodes import (
    ASTNode,
    BinaryOp,
    Call,
    Constant,
    Number,
    Power,
    UnaryMinus,
)
from spectralloop.expression.environment import Environment
from spectralloop.expression.parser import Parser


class Evaluator:
    """Evaluates expression trees on arrays of x values.

    Evaluation is pure: the same tree and the same x always give the same
    complex values, independent of how many other points are evaluated.
    """

    def __init__(self, env: Environment | None = None) -> None:
        """Initialize the evaluator.

        Args:
            env: Constant and function bindings
        """
        self.env = env or Environment()

    def evaluate(self, node: ASTNode, x: np.ndarray) -> np.ndarray:
        """Evaluate a tree at every point of x.

        Args:
            node: Root of the expression tree
            x: Real parameter values

        Returns:
            Complex array with the shape of x
        """
        x = np.asarray(x, dtype=float)
        result = self.eval_node(node, x)
        return np.broadcast_to(np.asarray(result, dtype=complex), x.shape).copy()

    def eval_node(self, node: ASTNode, x: np.ndarray):
        """Evaluate one AST node.

        Args:
            node: The AST node to evaluate
            x: Real parameter values

        Returns:
            A complex scalar or array
        """
        if node.type == "number":
            return self.eval_number(node)

        if node.type == "variable":
            return x.astype(complex)

        if node.type == "constant":
            return self.eval_constant(node)

        if node.type == "unary_minus":
            return -self.eval_node(node.operand, x)

        if node.type == "binary_op":
            return self.eval_binary_op(node, x)

        if node.type == "power":
            return self.eval_power(node, x)

        if node.type == "call":
            return self.eval_call(node, x)

        raise NotImplementedError(f"Node type {node.type} not implemented")

    def eval_number(self, node: Number) -> complex:
        return complex(node.value)

    def eval_constant(self, node: Constant) -> complex:
        return self.env.get_constant(node.name)

    def eval_binary_op(self, node: BinaryOp, x: np.ndarray):
        """Evaluate + - * / with complex semantics."""
        left = self.eval_node(node.left, x)
        right = self.eval_node(node.right, x)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.divide(left, right)
        raise ValueError(f"Unknown operator: {node.op}")

    def eval_power(self, node: Power, x: np.ndarray):
        """Evaluate an integer power by repeated multiplication."""
        base = np.asarray(self.eval_node(node.base, x), dtype=complex)
        result = np.ones_like(base)
        for _ in range(abs(node.exponent)):
            result = result * base
        if node.exponent < 0:
            with np.errstate(divide="ignore", invalid="ignore"):
                result = 1.0 / result
        return result

    def eval_call(self, node: Call, x: np.ndarray):
        argument = np.asarray(self.eval_node(node.argument, x), dtype=complex)
        return self.env.get_function(node.function)(argument)


@dataclass(frozen=True)
class Expression:
    """A parsed expression together with its source text.

    Attributes:
        source: The text the expression was parsed from
        tree: Root of the syntax tree
    """

    source: str
    tree: ASTNode = field(compare=False, repr=False)

    def __call__(self, x):
        """Evaluate at a scalar or an array of x values.

        Raises:
            ExpressionError: If the expression is not finite at some x
        """
        scalar = np.ndim(x) == 0
        values = Evaluator().evaluate(self.tree, np.atleast_1d(x))
        if not np.all(np.isfinite(values)):
            bad = np.atleast_1d(x)[~np.isfinite(values)][0]
            raise ExpressionError(f"Expression {self.source!r} is not finite at x = {bad:.6g}")
        return complex(values[0]) if scalar else values

    @classmethod
    def from_value(cls, value: complex) -> "Expression":
        """Build a constant expression whose text reparses to the same value."""
        value = complex(value)
        if value.imag == 0.0:
            return parse_expression(repr(value.real))
        return parse_expression(f"({value.real!r} + {value.imag!r}*i)")


def parse_expression(text: str) -> Expression:
    """Parse expression text into an evaluable complex function of x.

    Args:
        text: Expression text following the documented grammar

    Returns:
        The parsed expression

    Raises:
        ExpressionError: With line and column of the offending token
    """
    if not isinstance(text, str):
        raise ExpressionError(f"Expression must be text, got {type(text).__name__}")
    return Expression(text, Parser(text).parse())
