"""Expression AST node definitions.

This module defines the syntax tree classes produced by the expression
parser and consumed by the evaluator.
"""

from dataclasses import dataclass


@dataclass
class ASTNode:
    """Base class for all AST nodes."""

    type: str


@dataclass
class Number(ASTNode):
    """Numeric literal.

    Attributes:
        value: The literal value (int or float)
    """

    value: int | float

    def __init__(self, value: int | float) -> None:
        super().__init__("number")
        self.value = value


@dataclass
class Variable(ASTNode):
    """The path parameter ``x``."""

    name: str

    def __init__(self, name: str = "x") -> None:
        super().__init__("variable")
        self.name = name


@dataclass
class Constant(ASTNode):
    """A named constant (``pi`` or ``i``)."""

    name: str

    def __init__(self, name: str) -> None:
        super().__init__("constant")
        self.name = name


@dataclass
class UnaryMinus(ASTNode):
    """Negation.

    Represents: - operand
    """

    operand: ASTNode

    def __init__(self, operand: ASTNode) -> None:
        super().__init__("unary_minus")
        self.operand = operand


@dataclass
class BinaryOp(ASTNode):
    """Binary arithmetic.

    Represents: left op right, with op one of + - * /

    Attributes:
        op: Operator character
        left: Left operand
        right: Right operand
    """

    op: str
    left: ASTNode
    right: ASTNode

    def __init__(self, op: str, left: ASTNode, right: ASTNode) -> None:
        super().__init__("binary_op")
        self.op = op
        self.left = left
        self.right = right


@dataclass
class Power(ASTNode):
    """Integer power.

    Represents: base ^ exponent, where exponent is an integer literal
    """

    base: ASTNode
    exponent: int

    def __init__(self, base: ASTNode, exponent: int) -> None:
        super().__init__("power")
        self.base = base
        self.exponent = exponent


@dataclass
class Call(ASTNode):
    """Function application.

    Represents: function ( argument )
    """

    function: str
    argument: ASTNode

    def __init__(self, function: str, argument: ASTNode) -> None:
        super().__init__("call")
        self.function = function
        self.argument = argument
