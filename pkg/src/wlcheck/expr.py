"""Small expression language for acceleration components and scalar profiles.

Grammar (versioned, part of the public interface):

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"

"^" is right-associative and binds tighter than unary minus, which binds
tighter than "*" and "/", which bind tighter than "+" and "-".

Identifiers: coordinates v1..v3, x1..x3, optionally tagged with a particle
as in "v1@2" (untagged means particle 1); profile arguments "u" (unary
profiles) or "u1","u2","u3" (ternary profiles).  Functions: sqrt, exp, log,
sin, cos, abs (unary) and pow (binary).

All error positions are 1-based columns into the source text.
"""

import re
from dataclasses import dataclass

from . import dual
from .errors import (ArityError, DomainError, ExprSyntaxError,
                     ParticleOutOfRangeError, UnknownIdentifierError)

# ----- AST -----


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Ref:
    name: str
    particle: int | None = None


@dataclass(frozen=True)
class Neg:
    operand: "ExprAst"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


ExprAst = Num | Ref | Neg | Bin | Call

_FUNCTIONS = {"sqrt": 1, "exp": 1, "log": 1, "sin": 1, "cos": 1, "abs": 1,
              "pow": 2}
_COORD_RE = re.compile(r"^[vx][123]$")

# ----- tokenizer -----

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),@])
""", re.VERBOSE)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}",
                                  col=pos + 1)
        pos = m.end()
        if m.lastgroup == "ws":
            continue
        tokens.append((m.lastgroup, m.group(), m.start() + 1))
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text, n_particles, profile_arity):
        self.tokens = _tokenize(text)
        self.i = 0
        self.n_particles = n_particles
        self.profile_arity = profile_arity

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, text, col = self.peek()
        if kind != "op" or text != op:
            raise ExprSyntaxError(f"expected {op!r}, got {text or 'end of input'!r}",
                                  col=col)
        return self.advance()

    def parse(self):
        node = self.expr()
        kind, text, col = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {text!r}", col=col)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = Bin(text, node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = Bin(text, node, self.unary())
            else:
                return node

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return Bin("^", node, self.unary())
        return node

    def atom(self):
        kind, text, col = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            nk, ntext, _ = self.peek()
            if nk == "op" and ntext == "(":
                return self.call(text, col)
            return self.reference(text, col)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(
            f"expected a number, identifier or '(', got {text or 'end of input'!r}",
            col=col)

    def call(self, name, col):
        if name not in _FUNCTIONS:
            raise UnknownIdentifierError(f"unknown function {name!r}", col=col)
        self.expect_op("(")
        args = [self.expr()]
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text == ",":
                self.advance()
                args.append(self.expr())
            else:
                break
        self.expect_op(")")
        want = _FUNCTIONS[name]
        if len(args) != want:
            raise ArityError(
                f"{name} takes {want} argument{'s' if want > 1 else ''}, "
                f"got {len(args)}", col=col)
        return Call(name, tuple(args))

    def reference(self, name, col):
        if _COORD_RE.match(name):
            particle = None
            kind, text, _ = self.peek()
            if kind == "op" and text == "@":
                self.advance()
                nk, ntext, ncol = self.advance()
                if nk != "num" or not float(ntext).is_integer():
                    raise ExprSyntaxError("particle tag must be an integer",
                                          col=ncol)
                particle = int(float(ntext))
                if not 1 <= particle <= self.n_particles:
                    raise ParticleOutOfRangeError(
                        f"particle {particle} out of range 1..{self.n_particles}",
                        col=ncol)
            return Ref(name, particle)
        if name == "u":
            if self.profile_arity != 1:
                raise UnknownIdentifierError(
                    "'u' is only valid in a unary profile", col=col)
            return Ref("u")
        if re.match(r"^u[123]$", name):
            if self.profile_arity != 3:
                raise UnknownIdentifierError(
                    f"{name!r} is only valid in a ternary profile", col=col)
            return Ref(name)
        raise UnknownIdentifierError(f"unknown identifier {name!r}", col=col)


def parse(text, n_particles=1, profile_arity=None):
    """Parse source text into an AST.

    profile_arity selects the valid argument names: None for acceleration
    components (coordinates only), 1 for unary profiles, 3 for ternary ones.
    """
    return _Parser(text, n_particles, profile_arity).parse()


# ----- evaluation -----

def eval_ast(node, coords=None, args=None):
    """Evaluate an AST over floats or Dual1 scalars.

    coords is a pair (x_rows, v_rows) of N x 3 nested sequences; args is the
    tuple of profile-argument scalars.  DomainError from the numeric kernel
    is re-raised annotated with the offending subexpression.
    """
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Ref):
        if node.name.startswith("u"):
            if args is None:
                raise UnknownIdentifierError(
                    f"{node.name!r} used outside a profile")
            idx = 0 if node.name == "u" else int(node.name[1]) - 1
            return args[idx]
        if coords is None:
            raise UnknownIdentifierError(
                f"coordinate {node.name!r} used without a phase point")
        x_rows, v_rows = coords
        a = (node.particle or 1) - 1
        i = int(node.name[1]) - 1
        return x_rows[a][i] if node.name[0] == "x" else v_rows[a][i]
    if isinstance(node, Neg):
        return -eval_ast(node.operand, coords, args)
    if isinstance(node, Bin):
        left = eval_ast(node.left, coords, args)
        right = eval_ast(node.right, coords, args)
        try:
            if node.op == "+":
                return left + right
            if node.op == "-":
                return left - right
            if node.op == "*":
                return left * right
            if node.op == "/":
                return left / right
            return dual.powz(left, right)
        except ZeroDivisionError:
            raise DomainError("division by zero",
                              subexpr=format_ast(node)) from None
        except OverflowError:
            raise DomainError("overflow", subexpr=format_ast(node)) from None
        except DomainError as err:
            if err.subexpr is None:
                err.subexpr = format_ast(node)
            raise
    if isinstance(node, Call):
        vals = [eval_ast(a, coords, args) for a in node.args]
        try:
            if node.func == "pow":
                return dual.powz(vals[0], vals[1])
            return getattr(dual, node.func if node.func != "abs" else "fabs")(vals[0])
        except OverflowError:
            raise DomainError("overflow", subexpr=format_ast(node)) from None
        except DomainError as err:
            if err.subexpr is None:
                err.subexpr = format_ast(node)
            raise
    raise TypeError(f"not an expression node: {node!r}")


# ----- formatting -----

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(node):
    if isinstance(node, Bin):
        if node.op in "+-":
            return _PREC_ADD
        if node.op in "*/":
            return _PREC_MUL
        return _PREC_POW
    if isinstance(node, Neg):
        return _PREC_NEG
    return _PREC_ATOM


def format_ast(node):
    """Render an AST with minimal parentheses; parse(format_ast(t)) is
    structurally equal to t for parser-produced trees."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Ref):
        if node.particle is not None:
            return f"{node.name}@{node.particle}"
        return node.name
    if isinstance(node, Neg):
        inner = format_ast(node.operand)
        if _prec(node.operand) < _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Bin):
        left, right = format_ast(node.left), format_ast(node.right)
        if node.op in "+-":
            if _prec(node.right) <= _PREC_ADD:
                right = f"({right})"
            return f"{left}{node.op}{right}"
        if node.op in "*/":
            if _prec(node.left) < _PREC_MUL:
                left = f"({left})"
            if _prec(node.right) <= _PREC_MUL:
                right = f"({right})"
            return f"{left}{node.op}{right}"
        # right-associative power; unary minus under it needs parens on the left
        if _prec(node.left) <= _PREC_POW:
            left = f"({left})"
        if _prec(node.right) <= _PREC_MUL:
            right = f"({right})"
        return f"{left}^{right}"
    if isinstance(node, Call):
        return f"{node.func}({','.join(format_ast(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")
