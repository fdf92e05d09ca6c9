"""Expression grammar for generator files.

This module provides parsing and evaluation of complex-valued expressions
in the path parameter x:
- Lexer: Tokenizes expression text
- Parser: Builds an AST by recursive descent
- Evaluator: Evaluates the AST on arrays of x values
"""

from spectralloop.expression.evaluator import Evaluator, Expression, parse_expression

__all__ = ["Evaluator", "Expression", "parse_expression"]
