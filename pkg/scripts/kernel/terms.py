"""
Terms over an algebra's operation symbols.

A term is a tree of ``Var(i)`` leaves and ``Apply(op, children)`` nodes.
Terms reconstructed from closure parent records share subterms, so evaluation
and rendering memoise on node identity rather than walking the tree naively.

Prefix notation
---------------
``render_term`` writes ``meet(x1,m(x2,x3,x1))``; variables default to
``x1, x2, ...`` (1-based) and operation nodes always carry parentheses, so
``c()`` is a constant.  ``parse_term`` reads the same notation back.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from scripts.kernel.algebra import FiniteAlgebra


# -----------------------------------------------------------------------------
# TREE NODES
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Apply:
    op: str
    children: tuple["Term", ...] = ()


Term = Union[Var, Apply]


def term_arity(term: Term) -> int:
    """1 + the largest variable index (0 for a ground term)."""
    seen: dict[int, int] = {}

    def walk(node: Term) -> int:
        key = id(node)
        if key in seen:
            return seen[key]
        if isinstance(node, Var):
            value = node.index + 1
        else:
            value = max((walk(child) for child in node.children), default=0)
        seen[key] = value
        return value

    return walk(term)


def check_term(alg: FiniteAlgebra, term: Term) -> None:
    """
    Raise ``ValueError`` if an ``Apply`` node's child count does not match its
    operation's arity or names an unknown operation.
    """
    seen: set[int] = set()
    stack = [term]
    while stack:
        node = stack.pop()
        if id(node) in seen or isinstance(node, Var):
            continue
        seen.add(id(node))
        op = alg.operation(node.op)
        if len(node.children) != op.arity:
            raise ValueError(
                f"Operation {node.op!r} has arity {op.arity} but the term gives "
                f"{len(node.children)} argument(s)."
            )
        stack.extend(node.children)


# -----------------------------------------------------------------------------
# EVALUATION
# -----------------------------------------------------------------------------

def evaluate_term(alg: FiniteAlgebra, term: Term, args: Sequence[np.ndarray | int]) -> np.ndarray:
    """
    Evaluate ``term`` coordinatewise.

    ``args[i]`` is the value (scalar or array) substituted for ``Var(i)``; all
    arrays must broadcast together.  Returns an int64 array.
    """
    values = [np.asarray(a, dtype=np.int64) for a in args]
    shape = np.broadcast_shapes(*(v.shape for v in values)) if values else ()
    memo: dict[int, np.ndarray] = {}

    def walk(node: Term) -> np.ndarray:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            if node.index >= len(values):
                raise ValueError(f"Term uses x{node.index + 1} but only {len(values)} argument(s) given.")
            result = values[node.index]
        else:
            op = alg.operation(node.op)
            if op.arity == 0:
                result = np.full(shape, int(op.table), dtype=np.int64)
            else:
                result = op.table[tuple(walk(child) for child in node.children)]
        memo[key] = result
        return result

    return np.broadcast_to(walk(term), shape).astype(np.int64)


def substitute(term: Term, mapping: Sequence[Term]) -> Term:
    """
    Replace ``Var(i)`` by ``mapping[i]`` everywhere.
    """
    memo: dict[int, Term] = {}

    def walk(node: Term) -> Term:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            result = mapping[node.index]
        else:
            result = Apply(node.op, tuple(walk(child) for child in node.children))
        memo[key] = result
        return result

    return walk(term)


# -----------------------------------------------------------------------------
# PREFIX NOTATION
# -----------------------------------------------------------------------------

def _default_names(count: int) -> list[str]:
    return [f"x{i + 1}" for i in range(count)]


def render_term(term: Term, names: Optional[Sequence[str]] = None) -> str:
    if names is None:
        names = _default_names(term_arity(term))
    memo: dict[int, str] = {}

    def walk(node: Term) -> str:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            text = names[node.index]
        else:
            text = f"{node.op}({','.join(walk(child) for child in node.children)})"
        memo[key] = text
        return text

    return walk(term)


_TOKEN = re.compile(r"\s*(?:([^\s(),]+)|(\()|(\))|(,))")


def parse_term(text: str, names: Optional[Sequence[str]] = None) -> Term:
    """
    Parse prefix notation.  An identifier followed by ``(`` is an operation;
    any other identifier must be a variable name (``names`` or ``x<n>``).
    """
    tokens: list[str] = []
    position = 0
    stripped = text.strip()
    while position < len(stripped):
        match = _TOKEN.match(stripped, position)
        if not match or match.end() == position:
            raise ValueError(f"Cannot tokenise term at offset {position}: {text!r}")
        tokens.append(next(group for group in match.groups() if group is not None))
        position = match.end()

    lookup = {name: i for i, name in enumerate(names)} if names is not None else None
    cursor = 0

    def variable(name: str) -> Var:
        if lookup is not None:
            if name not in lookup:
                raise ValueError(f"Unknown variable {name!r} in term {text!r}")
            return Var(lookup[name])
        match = re.fullmatch(r"x(\d+)", name)
        if not match or int(match.group(1)) < 1:
            raise ValueError(f"Unknown variable {name!r} in term {text!r}")
        return Var(int(match.group(1)) - 1)

    def parse() -> Term:
        nonlocal cursor
        if cursor >= len(tokens):
            raise ValueError(f"Unexpected end of term {text!r}")
        name = tokens[cursor]
        cursor += 1
        if name in "(),":
            raise ValueError(f"Unexpected {name!r} in term {text!r}")
        if cursor < len(tokens) and tokens[cursor] == "(":
            cursor += 1
            children: list[Term] = []
            if tokens[cursor] == ")":
                cursor += 1
                return Apply(name, ())
            while True:
                children.append(parse())
                if tokens[cursor] == ",":
                    cursor += 1
                    continue
                if tokens[cursor] == ")":
                    cursor += 1
                    return Apply(name, tuple(children))
                raise ValueError(f"Expected ',' or ')' in term {text!r}")
        return variable(name)

    try:
        result = parse()
    except IndexError:
        raise ValueError(f"Unexpected end of term {text!r}") from None
    if cursor != len(tokens):
        raise ValueError(f"Trailing input in term {text!r}")
    return result
