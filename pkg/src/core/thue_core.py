"""
Thue Core - words, rewrite rules and the bounded word problem

Parses .thue instances and implements the two-way rewriting relation of a
Thue system: one-step neighbourhoods, a bounded bidirectional search for
rewrite paths (positive certificates) and an exhaustive search for finite
semigroups separating the goal words (negative certificates).

Words are tuples of symbol names, so multi-character symbols and the empty
word need no special casing.
"""
import itertools
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import (
    DuplicateAlphabetSymbol,
    EmptyRuleSide,
    MissingGoal,
    ReservedSymbol,
    ThueFormatError,
    UnknownSymbol,
)

logger = logging.getLogger(__name__)

Word = Tuple[str, ...]
EMPTY_WORD: Word = ()

SYMBOL_PATTERN = re.compile(r"^[a-zA-Z0-9_]+$")
# A and T are the unary/binary relation names added to the signature
RESERVED_SYMBOLS = ("A", "T")

LEFT_TO_RIGHT = "L->R"
RIGHT_TO_LEFT = "R->L"


def format_word(word: Sequence[str]) -> str:
    """Render a word in .thue notation; the empty word prints as ε"""
    if not word:
        return "ε"
    return "".join(s if len(s) == 1 else f"({s})" for s in word)


def tokenize_word(text: str, alphabet: Optional[Sequence[str]] = None,
                  line: Optional[int] = None, column: int = 1) -> Word:
    """
    Split a whitespace-free word into symbols.

    Single characters are symbols; parenthesised tokens such as (sym) are
    multi-character symbols. With an alphabet given, every symbol is checked.
    """
    symbols: List[str] = []
    i = 0
    while i < len(text):
        start = i
        if text[i] == "(":
            end = text.find(")", i)
            if end < 0:
                raise ThueFormatError(f"unclosed '(' in word '{text}'", line, column + i)
            token = text[i + 1:end]
            i = end + 1
        else:
            token = text[i]
            i += 1
        if not SYMBOL_PATTERN.match(token):
            raise ThueFormatError(f"invalid symbol token '{token}'", line, column + start)
        if alphabet is not None and token not in alphabet:
            raise UnknownSymbol(f"symbol '{token}' is not in the alphabet", line, column + start, symbol=token)
        symbols.append(token)
    return tuple(symbols)


@dataclass(frozen=True)
class RewritePair:
    left: Word
    right: Word

    def __post_init__(self):
        if not self.left or not self.right:
            raise EmptyRuleSide("rule sides must be non-empty")

    def __str__(self) -> str:
        return f"{format_word(self.left)} = {format_word(self.right)}"


@dataclass(frozen=True)
class ThueInstance:
    """The triple [l, r, Π] over a fixed alphabet"""

    alphabet: Tuple[str, ...]
    rules: Tuple[RewritePair, ...]
    goal_left: Word
    goal_right: Word
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.alphabet:
            raise ThueFormatError("alphabet must contain at least one symbol")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise DuplicateAlphabetSymbol("alphabet lists a symbol twice")
        for symbol in self.alphabet:
            if symbol in RESERVED_SYMBOLS:
                raise ReservedSymbol(f"'{symbol}' is reserved for the relational signature", symbol=symbol)
        # symbols are ordered by name
        object.__setattr__(self, "alphabet", tuple(sorted(self.alphabet)))
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.goal_left or not self.goal_right:
            raise MissingGoal("goal words must be non-empty")
        words = [self.goal_left, self.goal_right]
        for rule in self.rules:
            words.extend([rule.left, rule.right])
        for word in words:
            for symbol in word:
                if symbol not in self.alphabet:
                    raise UnknownSymbol(f"symbol '{symbol}' is not in the alphabet", symbol=symbol)

    @property
    def k(self) -> int:
        return len(self.rules)

    @property
    def m(self) -> int:
        return len(self.alphabet)

    @property
    def n_neq(self) -> int:
        """Number of slots for the inequality variant"""
        return self.k + self.m

    @property
    def n_neg(self) -> int:
        """Number of slots for the safe-negation variant"""
        return 2 * (self.k + self.m)

    def rule(self, k: int) -> RewritePair:
        """Rules are numbered from 1"""
        return self.rules[k - 1]


def parse_thue(text: str, name: str = "") -> ThueInstance:
    """
    Parse a .thue document.

    Format (line oriented, '#' starts a comment):
        alphabet: a b
        rule: ab = ba
        goal: aab = aba
    """
    alphabet_entry: Optional[Tuple[int, List[Tuple[str, int]]]] = None
    rule_entries: List[Tuple[int, str, int, str, int]] = []
    goal_entry: Optional[Tuple[int, str, int, str, int]] = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        keyword, sep, rest = line.partition(":")
        keyword = keyword.strip()
        if not sep:
            raise ThueFormatError(f"expected 'keyword: ...', got '{line.strip()}'", line_no, 1)
        rest_column = len(keyword) + 2 + (len(line) - len(line.lstrip()))

        if keyword == "alphabet":
            if alphabet_entry is not None:
                raise ThueFormatError("second alphabet line", line_no, 1)
            tokens = []
            for match in re.finditer(r"\S+", rest):
                tokens.append((match.group(0), rest_column + match.start()))
            alphabet_entry = (line_no, tokens)
        elif keyword in ("rule", "goal"):
            left, eq, right = rest.partition("=")
            if not eq:
                raise ThueFormatError(f"{keyword} needs the form 'w = w'", line_no, rest_column)
            left_col = rest_column + len(left) - len(left.lstrip())
            right_col = rest_column + len(left) + 1 + len(right) - len(right.lstrip())
            entry = (line_no, left.strip(), left_col, right.strip(), right_col)
            if keyword == "rule":
                rule_entries.append(entry)
            else:
                if goal_entry is not None:
                    raise ThueFormatError("more than one goal line", line_no, 1)
                goal_entry = entry
        else:
            raise ThueFormatError(f"unknown keyword '{keyword}'", line_no, 1)

    if alphabet_entry is None:
        raise ThueFormatError("missing alphabet line")
    alphabet_line, tokens = alphabet_entry
    alphabet: List[str] = []
    for token, column in tokens:
        if not SYMBOL_PATTERN.match(token):
            raise ThueFormatError(f"invalid symbol '{token}'", alphabet_line, column)
        if token in RESERVED_SYMBOLS:
            raise ReservedSymbol(f"'{token}' is reserved for the relational signature", alphabet_line, column, token)
        if token in alphabet:
            raise DuplicateAlphabetSymbol(f"symbol '{token}' listed twice", alphabet_line, column, token)
        alphabet.append(token)
    if not alphabet:
        raise ThueFormatError("alphabet is empty", alphabet_line, 1)

    def side(text_side: str, line_no: int, column: int) -> Word:
        if not text_side:
            raise EmptyRuleSide("empty side", line_no, column)
        if any(ch.isspace() for ch in text_side):
            raise ThueFormatError(f"words may not contain whitespace: '{text_side}'", line_no, column)
        return tokenize_word(text_side, alphabet, line_no, column)

    rules = []
    for line_no, left, left_col, right, right_col in rule_entries:
        rules.append(RewritePair(side(left, line_no, left_col), side(right, line_no, right_col)))

    if goal_entry is None:
        raise MissingGoal("no goal line")
    line_no, left, left_col, right, right_col = goal_entry
    goal_left = side(left, line_no, left_col)
    goal_right = side(right, line_no, right_col)

    return ThueInstance(tuple(alphabet), tuple(rules), goal_left, goal_right, name=name)


def write_thue(inst: ThueInstance) -> str:
    lines = ["alphabet: " + " ".join(inst.alphabet)]
    for rule in inst.rules:
        lines.append(f"rule: {format_word(rule.left)} = {format_word(rule.right)}")
    lines.append(f"goal: {format_word(inst.goal_left)} = {format_word(inst.goal_right)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Justification:
    rule_index: int
    position: int
    direction: str

    def reversed(self) -> "Justification":
        flipped = RIGHT_TO_LEFT if self.direction == LEFT_TO_RIGHT else LEFT_TO_RIGHT
        return Justification(self.rule_index, self.position, flipped)

    def to_dict(self) -> Dict[str, object]:
        return {"rule": self.rule_index, "position": self.position, "direction": self.direction}


def rewrite_neighbors(w: Word, rules: Sequence[RewritePair]) -> List[Tuple[Word, Justification]]:
    """
    All words reachable from w by one rule application, in either direction.

    Enumeration order is (rule index, position, direction).
    """
    result = []
    for k, rule in enumerate(rules, start=1):
        for position in range(len(w)):
            for direction, pattern, replacement in ((LEFT_TO_RIGHT, rule.left, rule.right),
                                                    (RIGHT_TO_LEFT, rule.right, rule.left)):
                end = position + len(pattern)
                if end <= len(w) and w[position:end] == pattern:
                    rewritten = w[:position] + replacement + w[end:]
                    result.append((rewritten, Justification(k, position, direction)))
    return result


@dataclass(frozen=True)
class RewritePath:
    steps: Tuple[Word, ...]
    justifications: Tuple[Justification, ...]

    def __len__(self) -> int:
        return len(self.justifications)

    def validate(self, rules: Sequence[RewritePair]) -> bool:
        """Re-check every step through rewrite_neighbors"""
        if len(self.steps) != len(self.justifications) + 1:
            return False
        for before, after, just in zip(self.steps, self.steps[1:], self.justifications):
            if (after, just) not in rewrite_neighbors(before, rules):
                return False
        return True

    def to_dict(self) -> Dict[str, object]:
        return {
            "steps": [format_word(w) for w in self.steps],
            "justifications": [j.to_dict() for j in self.justifications],
        }


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Equivalent(path) when path is set, otherwise Unknown with a bound report"""

    path: Optional[RewritePath]
    exhausted: Optional[str]
    expansions: int
    visited: int

    @property
    def equivalent(self) -> bool:
        return self.path is not None

    def to_dict(self) -> Dict[str, object]:
        payload: Dict[str, object] = {
            "verdict": "Equivalent" if self.equivalent else "Unknown",
            "expansions": self.expansions,
            "visited": self.visited,
        }
        if self.path is not None:
            payload["path"] = self.path.to_dict()
        else:
            payload["exhausted"] = self.exhausted
        return payload


def default_max_word_len(inst: ThueInstance) -> int:
    return len(inst.goal_left) + len(inst.goal_right) + 8


DEFAULT_MAX_EXPANSIONS = 1_000_000


def decide_equiv_bounded(u: Word, v: Word, rules: Sequence[RewritePair],
                         max_word_len: int, max_expansions: int = DEFAULT_MAX_EXPANSIONS) -> EquivalenceVerdict:
    """
    Bidirectional breadth-first search for a rewrite path from u to v.

    Only words of length <= max_word_len are visited. Unknown verdicts name
    the exhausted bound: 'max_expansions', 'max_word_len' (the frontier died
    but some neighbour was cut by the length bound) or 'frontier' (the
    component of u or v was explored completely).
    """
    if max_word_len < max(len(u), len(v)):
        raise ValueError(f"max_word_len={max_word_len} is shorter than the input words")
    u, v = tuple(u), tuple(v)
    if u == v:
        return EquivalenceVerdict(RewritePath((u,), ()), None, 0, 1)

    parents = ({u: None}, {v: None})
    frontiers = ([u], [v])
    expansions = 0
    length_cut = False

    while frontiers[0] and frontiers[1]:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        own, other = parents[side], parents[1 - side]
        next_frontier = []
        for word in frontiers[side]:
            if expansions >= max_expansions:
                logger.debug("equivalence search stopped after %d expansions", expansions)
                return EquivalenceVerdict(None, "max_expansions", expansions, len(own) + len(other))
            expansions += 1
            for neighbour, just in rewrite_neighbors(word, rules):
                if len(neighbour) > max_word_len:
                    length_cut = True
                    continue
                if neighbour in own:
                    continue
                own[neighbour] = (word, just)
                if neighbour in other:
                    path = _join_paths(neighbour, parents[0], parents[1])
                    return EquivalenceVerdict(path, None, expansions, len(own) + len(other))
                next_frontier.append(neighbour)
        frontiers = (next_frontier, frontiers[1]) if side == 0 else (frontiers[0], next_frontier)

    exhausted = "max_word_len" if length_cut else "frontier"
    logger.debug("equivalence search exhausted (%s) after %d expansions", exhausted, expansions)
    return EquivalenceVerdict(None, exhausted, expansions, len(parents[0]) + len(parents[1]))


def _join_paths(meet: Word, forward: Dict, backward: Dict) -> RewritePath:
    head_words = [meet]
    head_just = []
    node = meet
    while forward[node] is not None:
        previous, just = forward[node]
        head_words.append(previous)
        head_just.append(just)
        node = previous
    head_words.reverse()
    head_just.reverse()

    words = list(head_words)
    justs = list(head_just)
    node = meet
    while backward[node] is not None:
        previous, just = backward[node]
        # previous -> node was applied while searching from v; walk it backwards
        words.append(previous)
        justs.append(just.reversed())
        node = previous
    return RewritePath(tuple(words), tuple(justs))


def words_up_to(alphabet: Sequence[str], max_len: int) -> Iterator[Word]:
    """All words of length <= max_len in shortlex order"""
    for length in range(max_len + 1):
        for word in itertools.product(alphabet, repeat=length):
            yield tuple(word)


def bounded_congruence_classes(alphabet: Sequence[str], rules: Sequence[RewritePair],
                               max_len: int) -> List[Tuple[Word, ...]]:
    """
    Connected components of the rewrite graph on words of length <= max_len.

    Each component is contained in one class of the congruence; classes are
    returned in shortlex order of their least word, words inside a class in
    shortlex order.
    """
    graph = nx.Graph()
    for word in words_up_to(alphabet, max_len):
        graph.add_node(word)
        for neighbour, _ in rewrite_neighbors(word, rules):
            if len(neighbour) <= max_len:
                graph.add_edge(word, neighbour)
    shortlex = lambda w: (len(w), w)  # noqa: E731
    classes = [tuple(sorted(component, key=shortlex)) for component in nx.connected_components(graph)]
    classes.sort(key=lambda cls: shortlex(cls[0]))
    return classes


@dataclass(frozen=True)
class SemigroupWitness:
    """Finite semigroup (multiplication table) plus an image for every generator"""

    order: int
    table: Tuple[Tuple[int, ...], ...]
    generator_map: Dict[str, int]

    def product(self, x: int, y: int) -> int:
        return self.table[x][y]

    def is_associative(self) -> bool:
        n = self.order
        return all(
            self.table[self.table[x][y]][z] == self.table[x][self.table[y][z]]
            for x in range(n) for y in range(n) for z in range(n)
        )

    def problems(self, inst: ThueInstance) -> List[str]:
        """Empty iff the witness certifies inst as negative"""
        issues = []
        if len(self.table) != self.order or any(len(row) != self.order for row in self.table):
            return ["table shape does not match order"]
        if not self.is_associative():
            issues.append("table is not associative")
        for symbol in inst.alphabet:
            if symbol not in self.generator_map:
                issues.append(f"generator '{symbol}' unassigned")
        if issues:
            return issues
        for k, rule in enumerate(inst.rules, start=1):
            if eval_in_semigroup(rule.left, self) != eval_in_semigroup(rule.right, self):
                issues.append(f"rule {k} ({rule}) does not hold")
        if eval_in_semigroup(inst.goal_left, self) == eval_in_semigroup(inst.goal_right, self):
            issues.append("goal words evaluate to the same element")
        return issues

    def to_dict(self) -> Dict[str, object]:
        return {
            "order": self.order,
            "table": [list(row) for row in self.table],
            "generator_map": dict(sorted(self.generator_map.items())),
        }


def eval_in_semigroup(w: Word, witness: SemigroupWitness) -> int:
    """Image of a non-empty word under the homomorphism extending generator_map"""
    if not w:
        raise ValueError("the empty word has no image in a semigroup; use the adjoined identity")
    value = witness.generator_map[w[0]]
    for symbol in w[1:]:
        value = witness.table[value][witness.generator_map[symbol]]
    return value


def iter_associative_tables(order: int) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """
    Every associative multiplication table on {0..order-1}, in lexicographic
    (row-major) order. Cells are filled by backtracking; a partial table is
    abandoned as soon as one fully defined instance of associativity fails.
    """
    if order <= 0:
        return
    cells = [(x, y) for x in range(order) for y in range(order)]
    table: List[List[Optional[int]]] = [[None] * order for _ in range(order)]

    def consistent() -> bool:
        for x in range(order):
            for y in range(order):
                xy = table[x][y]
                if xy is None:
                    continue
                for z in range(order):
                    left = table[xy][z]
                    yz = table[y][z]
                    if left is None or yz is None:
                        continue
                    right = table[x][yz]
                    if right is not None and left != right:
                        return False
        return True

    def extend(index: int) -> Iterator[Tuple[Tuple[int, ...], ...]]:
        if index == len(cells):
            yield tuple(tuple(row) for row in table)
            return
        x, y = cells[index]
        for value in range(order):
            table[x][y] = value
            if consistent():
                yield from extend(index + 1)
        table[x][y] = None

    yield from extend(0)


def find_separating_semigroup(inst: ThueInstance, max_order: int) -> Optional[SemigroupWitness]:
    """
    Search for a finite semigroup of order <= max_order in which every rule
    holds and the goal equation fails.

    All associative tables and all generator assignments are tried, without
    symmetry pruning, so None means no witness exists up to max_order. The
    first hit in (order, table, assignment) lexicographic order is returned.
    """
    checked = 0
    for order in range(1, max_order + 1):
        for table in iter_associative_tables(order):
            checked += 1
            for images in itertools.product(range(order), repeat=inst.m):
                witness = SemigroupWitness(order, table, dict(zip(inst.alphabet, images)))
                if _separates(inst, witness):
                    logger.debug("separating semigroup of order %d found after %d tables", order, checked)
                    return witness
    logger.debug("no separating semigroup up to order %d (%d tables checked)", max_order, checked)
    return None


def _separates(inst: ThueInstance, witness: SemigroupWitness) -> bool:
    for rule in inst.rules:
        if eval_in_semigroup(rule.left, witness) != eval_in_semigroup(rule.right, witness):
            return False
    return eval_in_semigroup(inst.goal_left, witness) != eval_in_semigroup(inst.goal_right, witness)
