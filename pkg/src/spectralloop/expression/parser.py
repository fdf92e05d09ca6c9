"""Expression parser.

Converts a stream of tokens into an expression AST. Grammar::

    expr   = term { ("+" | "-") term }
    term   = factor { ("*" | "/") factor }
    factor = base [ "^" base ]
    base   = NUMBER | "x" | "pi" | "i" | IDENT "(" expr ")" | "(" expr ")" | "-" base

The exponent of ``^`` must be an integer literal (optionally negated).
"""

from spectralloop.errors import ExpressionError
from spectralloop.expression.ast_nodes import (
    ASTNode,
    BinaryOp,
    Call,
    Constant,
    Number,
    Power,
    UnaryMinus,
    Variable,
)
from spectralloop.expression.environment import Environment
from spectralloop.expression.lexer import Lexer, Token


class Parser:
    """Parses expression text into an AST.

    The parser implements a recursive descent over the grammar above.
    """

    def __init__(self, source: str, env: Environment | None = None) -> None:
        """Initialize the parser with expression text.

        Args:
            source: The expression text to parse
            env: Names known to the parser (constants and functions)
        """
        self.env = env or Environment()
        self.lexer = Lexer(source)
        self.tokens = self.lexer.tokenize()
        self.pos = 0

    def current_token(self) -> Token:
        """Get the current token (the EOF token once input is exhausted)."""
        if self.pos >= len(self.tokens):
            return self.tokens[-1]
        return self.tokens[self.pos]

    def peek_token(self, offset: int = 1) -> Token:
        """Peek ahead at a future token.

        Args:
            offset: How many tokens ahead to peek

        Returns:
            The token at the offset, or the EOF token if beyond the end
        """
        pos = self.pos + offset
        if pos >= len(self.tokens):
            return self.tokens[-1]
        return self.tokens[pos]

    def advance(self) -> Token:
        """Advance to the next token.

        Returns:
            The token that was just passed over
        """
        token = self.current_token()
        if self.pos < len(self.tokens):
            self.pos += 1
        return token

    def expect(self, token_type: str) -> Token:
        """Expect a specific token type and advance.

        Args:
            token_type: The expected token type

        Returns:
            The matched token

        Raises:
            ExpressionError: If the token type doesn't match
        """
        token = self.current_token()
        if token.type != token_type:
            raise self.error(f"Expected {token_type}, got {token.type}", token)
        return self.advance()

    @staticmethod
    def error(message: str, token: Token) -> ExpressionError:
        """Build a position-annotated error for a token."""
        return ExpressionError(message, token.line, token.column)

    def parse(self) -> ASTNode:
        """Parse the whole input as one expression.

        Returns:
            The root AST node

        Raises:
            ExpressionError: On empty input or trailing tokens
        """
        if self.current_token().type == "EOF":
            raise self.error("Empty expression", self.current_token())
        node = self.parse_expr()
        token = self.current_token()
        if token.type != "EOF":
            raise self.error(f"Unexpected token {token.value!r}", token)
        return node

    def parse_expr(self) -> ASTNode:
        """expr = term { ("+" | "-") term }"""
        node = self.parse_term()
        while self.current_token().type in ("PLUS", "MINUS"):
            op = self.advance().value
            node = BinaryOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> ASTNode:
        """term = factor { ("*" | "/") factor }"""
        node = self.parse_factor()
        while self.current_token().type in ("STAR", "SLASH"):
            op = self.advance().value
            node = BinaryOp(op, node, self.parse_factor())
        return node

    def parse_factor(self) -> ASTNode:
        """factor = base [ "^" base ]"""
        node = self.parse_base()
        if self.current_token().type == "CARET":
            self.advance()
            node = Power(node, self.parse_integer_exponent())
        return node

    def parse_integer_exponent(self) -> int:
        """Parse the exponent of ``^``: an integer literal, optionally negated.

        Raises:
            ExpressionError: If the exponent is not an integer literal
        """
        sign = 1
        token = self.current_token()
        if token.type == "MINUS":
            self.advance()
            sign = -1
            token = self.current_token()
        if token.type != "NUMBER" or not isinstance(token.value, int):
            raise self.error("Exponent of '^' must be an integer literal", token)
        self.advance()
        return sign * token.value

    def parse_base(self) -> ASTNode:
        """Parse a base: literal, name, call, parenthesized expression or negation."""
        token = self.current_token()

        if token.type == "NUMBER":
            self.advance()
            return Number(token.value)

        if token.type == "MINUS":
            self.advance()
            return UnaryMinus(self.parse_base())

        if token.type == "LPAREN":
            self.advance()
            node = self.parse_expr()
            self.expect("RPAREN")
            return node

        if token.type == "IDENTIFIER":
            return self.parse_name(token)

        if token.type == "EOF":
            raise self.error("Unexpected end of expression", token)

        raise self.error(f"Unexpected token {token.value!r}", token)

    def parse_name(self, token: Token) -> ASTNode:
        """Parse the variable, a constant, or a function call."""
        name = token.value
        self.advance()

        if name == "x":
            return Variable(name)

        if self.env.has_function(name):
            if self.current_token().type != "LPAREN":
                raise self.error(f"Function {name!r} must be called with parentheses", token)
            self.advance()
            argument = self.parse_expr()
            self.expect("RPAREN")
            return Call(name, argument)

        if self.env.has_constant(name):
            return Constant(name)

        raise self.error(f"Unknown name {name!r}", token)
