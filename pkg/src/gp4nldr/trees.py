"""Expression trees: the genotype of one embedding dimension.

A tree maps an m-feature row to a single real value. Terminals are feature
indices (no constants); functions are a small set of protected arithmetic
and squashing operators, so every evaluation is finite by construction.
Trees are immutable: variation operators build new trees instead of
mutating in place, which lets individuals share subtrees safely.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

__all__ = [
    "Node",
    "BINARY_SYMBOLS",
    "UNARY_SYMBOLS",
    "FUNCTION_ARITY",
    "OPERATOR_NOTES",
    "DIV_EPSILON",
    "evaluate_tree",
    "evaluate_columns",
    "grow_tree",
    "tree_depth",
    "tree_size",
    "render_expression",
    "parse_expression",
    "subtree_at",
    "replace_subtree",
    "validate_tree",
]

DIV_EPSILON = 1e-9
_CLAMP = 1e300  # keeps mul/add chains finite without touching ordinary values


def _finite(x: np.ndarray) -> np.ndarray:
    return np.nan_to_num(x, nan=0.0, posinf=_CLAMP, neginf=-_CLAMP)


def _pdiv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    near_zero = np.abs(b) < DIV_EPSILON
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.divide(a, np.where(near_zero, 1.0, b))
    return np.where(near_zero, 1.0, out)


_BINARY_OPS = {
    "add": lambda a, b: _finite(a + b),
    "sub": lambda a, b: _finite(a - b),
    "mul": lambda a, b: _finite(a * b),
    "pdiv": lambda a, b: _finite(_pdiv(a, b)),
    "max": np.maximum,
    "min": np.minimum,
}
_UNARY_OPS = {
    "abs": np.abs,
    "neg": np.negative,
    "sigmoid": expit,
    "relu": lambda x: np.maximum(0.0, x),
}

BINARY_SYMBOLS = tuple(_BINARY_OPS)
UNARY_SYMBOLS = tuple(_UNARY_OPS)
FUNCTION_ARITY = {**{s: 2 for s in BINARY_SYMBOLS}, **{s: 1 for s in UNARY_SYMBOLS}}

# Short plain-language glosses, reused by the explanation prompt.
OPERATOR_NOTES = {
    "add": "add(a, b): a plus b",
    "sub": "sub(a, b): a minus b",
    "mul": "mul(a, b): a times b",
    "pdiv": "pdiv(a, b): protected division, a divided by b, returning 1 when b is (near) zero",
    "max": "max(a, b): the larger of a and b",
    "min": "min(a, b): the smaller of a and b",
    "abs": "abs(a): absolute value of a",
    "neg": "neg(a): the negation of a",
    "sigmoid": "sigmoid(a): 1 / (1 + exp(-a)), squashing a into (0, 1)",
    "relu": "relu(a): a if a is positive, otherwise 0",
}


@dataclass(frozen=True)
class Node:
    """One tree node: a function symbol or a terminal feature index."""

    symbol: str | int
    children: tuple["Node", ...] = ()

    def __post_init__(self):
        if isinstance(self.symbol, (int, np.integer)):
            if self.children:
                raise ValueError("terminal nodes take no children")
            object.__setattr__(self, "symbol", int(self.symbol))
        else:
            arity = FUNCTION_ARITY.get(self.symbol)
            if arity is None:
                raise ValueError(f"unknown function symbol {self.symbol!r}")
            if len(self.children) != arity:
                raise ValueError(
                    f"{self.symbol} expects {arity} children, got {len(self.children)}"
                )

    @property
    def is_terminal(self) -> bool:
        return isinstance(self.symbol, int)


def tree_size(node: Node) -> int:
    """Total node count."""
    total = 0
    stack = [node]
    while stack:
        cur = stack.pop()
        total += 1
        stack.extend(cur.children)
    return total


def tree_depth(node: Node) -> int:
    """Edge count of the longest root-to-leaf path (a bare terminal is 0)."""
    if not node.children:
        return 0
    return 1 + max(tree_depth(c) for c in node.children)


def validate_tree(node: Node, num_features: int, max_depth: int | None = None) -> None:
    """Raise ValueError on out-of-range feature indices or excess depth."""
    if max_depth is not None and tree_depth(node) > max_depth:
        raise ValueError(f"tree depth exceeds {max_depth}")
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur.is_terminal and not 0 <= cur.symbol < num_features:
            raise ValueError(f"feature index {cur.symbol} out of range for m={num_features}")
        stack.extend(cur.children)


def evaluate_columns(node: Node, columns: np.ndarray) -> np.ndarray:
    """Evaluate a tree over all rows at once; ``columns`` is the m x n transposed data."""
    if node.is_terminal:
        return columns[node.symbol]
    args = [evaluate_columns(c, columns) for c in node.children]
    op = _BINARY_OPS.get(node.symbol) or _UNARY_OPS[node.symbol]
    return op(*args)


def evaluate_tree(tree: Node, row) -> float:
    """Evaluate a tree on a single m-vector row."""
    cols = np.asarray(row, dtype=float).reshape(-1, 1)
    return float(evaluate_columns(tree, cols)[0])


def grow_tree(
    rng: random.Random,
    num_features: int,
    max_depth: int,
    *,
    min_depth: int = 0,
    full: bool = False,
    p_function: float = 0.5,
) -> Node:
    """Build a random tree.

    ``full`` places functions at every level above ``max_depth`` (the "full"
    half of ramped half-and-half); otherwise each level picks a function
    with probability ``p_function`` once past ``min_depth``.
    """

    def build(depth: int) -> Node:
        at_limit = depth >= max_depth
        must_grow = depth < min_depth
        if at_limit or (not must_grow and not full and rng.random() >= p_function):
            return Node(rng.randrange(num_features))
        symbol = rng.choice(BINARY_SYMBOLS + UNARY_SYMBOLS)
        arity = FUNCTION_ARITY[symbol]
        return Node(symbol, tuple(build(depth + 1) for _ in range(arity)))

    return build(0)


def subtree_at(root: Node, index: int) -> Node:
    """Return the subtree rooted at the ``index``-th node in preorder."""
    stack = [root]
    seen = 0
    while stack:
        cur = stack.pop()
        if seen == index:
            return cur
        seen += 1
        stack.extend(reversed(cur.children))
    raise IndexError(f"node index {index} out of range (size {seen})")


def replace_subtree(root: Node, index: int, replacement: Node) -> Node:
    """Return a copy of ``root`` with the preorder ``index``-th node replaced."""

    counter = [0]

    def rebuild(node: Node) -> Node:
        if counter[0] == index:
            counter[0] += 1
            return replacement
        counter[0] += 1
        if node.is_terminal:
            return node
        return Node(node.symbol, tuple(rebuild(c) for c in node.children))

    result = rebuild(root)
    if counter[0] <= index:
        raise IndexError(f"node index {index} out of range (size {counter[0]})")
    return result


def node_depth_at(root: Node, index: int) -> int:
    """Depth (edges from the root) of the preorder ``index``-th node."""
    stack = [(root, 0)]
    seen = 0
    while stack:
        cur, depth = stack.pop()
        if seen == index:
            return depth
        seen += 1
        stack.extend((c, depth + 1) for c in reversed(cur.children))
    raise IndexError(f"node index {index} out of range (size {seen})")


def _terminal_text(index: int, feature_names) -> str:
    if feature_names is not None and 0 <= index < len(feature_names):
        name = feature_names[index]
        # Names with whitespace or parentheses would break the token format.
        if name and not any(ch.isspace() or ch in "()" for ch in name):
            return name
    return f"f{index}"


def render_expression(tree: Node, feature_names=None) -> str:
    """Render as parenthesized prefix text, e.g. ``(max (add f0 f1) f2)``."""
    if tree.is_terminal:
        return _terminal_text(tree.symbol, feature_names)
    inner = " ".join(render_expression(c, feature_names) for c in tree.children)
    return f"({tree.symbol} {inner})"


def parse_expression(text: str, feature_names=None) -> Node:
    """Parse the render_expression format back into a tree."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    if not tokens:
        raise ValueError("empty expression")
    name_index = (
        {name: i for i, name in enumerate(feature_names)} if feature_names else {}
    )

    pos = [0]

    def peek() -> str:
        if pos[0] >= len(tokens):
            raise ValueError("unexpected end of expression")
        return tokens[pos[0]]

    def take() -> str:
        tok = peek()
        pos[0] += 1
        return tok

    def terminal(tok: str) -> Node:
        if tok in name_index:
            return Node(name_index[tok])
        if tok.startswith("f") and tok[1:].isdigit():
            return Node(int(tok[1:]))
        raise ValueError(f"unknown terminal {tok!r}")

    def expr() -> Node:
        tok = take()
        if tok == ")":
            raise ValueError("unexpected ')'")
        if tok != "(":
            return terminal(tok)
        symbol = take()
        if symbol not in FUNCTION_ARITY:
            raise ValueError(f"unknown function {symbol!r}")
        children = []
        while peek() != ")":
            children.append(expr())
        take()  # consume ')'
        return Node(symbol, tuple(children))

    tree = expr()
    if pos[0] != len(tokens):
        raise ValueError(f"trailing tokens after expression: {tokens[pos[0]:]}")
    return tree
