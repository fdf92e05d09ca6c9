"""Expression lexer.

Splits formula text such as ``(3/2*x - 1/2)*exp(2*pi*i*x)`` into tokens with
1-based line and column positions.
"""

import re
from dataclasses import dataclass
from typing import Any

from spectralloop.errors import ExpressionError

_SCANNER = re.compile(
    r"""
    (?P<space>[ \t\r\n]+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<symbol>[-+*/^()])
    """,
    re.VERBOSE,
)

SYMBOLS = {
    "+": "PLUS",
    "-": "MINUS",
    "*": "STAR",
    "/": "SLASH",
    "^": "CARET",
    "(": "LPAREN",
    ")": "RPAREN",
}


@dataclass
class Token:
    """One lexical unit of a formula.

    Attributes:
        type: NUMBER, IDENTIFIER, EOF or one of the names in ``SYMBOLS``
        value: int or float for numbers, the text otherwise, None for EOF
        line: Line of the first character
        column: Column of the first character
    """

    type: str
    value: Any
    line: int
    column: int


def _number_value(text: str) -> int | float:
    if "." in text or "e" in text or "E" in text:
        return float(text)
    return int(text)


class Lexer:
    """Tokenizer for generator formulas.

    Numbers may be integers, decimals (``.5``, ``2.``) or carry an exponent
    (``1e-3``); an ``e`` without digits after it starts a name instead.
    """

    def __init__(self, source: str) -> None:
        self.source = source
        self.tokens: list[Token] = []
        self._line = 1
        self._line_start = 0

    def _column(self, offset: int) -> int:
        return offset - self._line_start + 1

    def _track_newlines(self, text: str, offset: int) -> None:
        breaks = text.count("\n")
        if breaks:
            self._line += breaks
            self._line_start = offset + text.rindex("\n") + 1

    def tokenize(self) -> list[Token]:
        """Scan the whole text.

        Returns:
            The tokens, always ending with EOF

        Raises:
            ExpressionError: On a stray character or a number like ``1.2.3``
        """
        self.tokens = []
        self._line, self._line_start = 1, 0
        offset = 0
        end = len(self.source)

        while offset < end:
            match = _SCANNER.match(self.source, offset)
            column = self._column(offset)
            if match is None:
                char = self.source[offset]
                raise ExpressionError(f"Unexpected character {char!r}", self._line, column)

            kind, text = match.lastgroup, match.group()
            if kind == "space":
                self._track_newlines(text, offset)
            elif kind == "number":
                if self.source.startswith(".", match.end()):
                    raise ExpressionError(
                        f"Malformed number '{text}.'", self._line, column
                    )
                self.tokens.append(Token("NUMBER", _number_value(text), self._line, column))
            elif kind == "name":
                self.tokens.append(Token("IDENTIFIER", text, self._line, column))
            else:
                self.tokens.append(Token(SYMBOLS[text], text, self._line, column))
            offset = match.end()

        self.tokens.append(Token("EOF", None, self._line, self._column(end)))
        return self.tokens
