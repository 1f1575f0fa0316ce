"""Exact arithmetic on elements of free groups of arbitrary finite rank.

A word is an immutable, always freely reduced string over the basis
``e1, e2, e3, ...``.  Internally a letter is a nonzero integer: ``+i``
stands for ``ei`` and ``-i`` for ``ei^-1``.  Rank is deliberately not
stored on the word; operations that need an ambient rank take it as an
explicit argument, so the same word can live in any free group large
enough to contain its letters.

The total order on words is by length first, then letterwise with
``e1 < e1^-1 < e2 < e2^-1 < ...``; it is what every "canonical
representative" in the package means by *minimal*.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Sequence


class WordSyntaxError(ValueError):
    """Raised by :func:`parse` with the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for letter in letters:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def letter_key(letter: int) -> int:
    # e1 < e1^-1 < e2 < e2^-1 < ...
    return 2 * (abs(letter) - 1) + (0 if letter > 0 else 1)


class Word:
    """A freely reduced word; the empty word is the identity."""

    __slots__ = ("_letters",)

    def __init__(self, letters: Iterable[int] = ()):
        lets = tuple(letters)
        for letter in lets:
            if not isinstance(letter, int) or letter == 0:
                raise ValueError(f"letters must be nonzero integers, got {letter!r}")
        self._letters = _reduce(lets)

    @classmethod
    def _unsafe(cls, reduced: tuple[int, ...]) -> "Word":
        # Caller guarantees `reduced` is already freely reduced.
        w = object.__new__(cls)
        w._letters = reduced
        return w

    @property
    def letters(self) -> tuple[int, ...]:
        return self._letters

    @property
    def is_identity(self) -> bool:
        return not self._letters

    def max_generator(self) -> int:
        return max((abs(l) for l in self._letters), default=0)

    def __len__(self) -> int:
        return len(self._letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self._letters)

    def __bool__(self) -> bool:
        return bool(self._letters)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Word) and self._letters == other._letters

    def __hash__(self) -> int:
        return hash(self._letters)

    def sort_key(self) -> tuple:
        return (len(self._letters), tuple(letter_key(l) for l in self._letters))

    def __lt__(self, other: "Word") -> bool:
        return self.sort_key() < other.sort_key()

    def __le__(self, other: "Word") -> bool:
        return self.sort_key() <= other.sort_key()

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        a, b = self._letters, other._letters
        if not a:
            return other
        if not b:
            return self
        i = len(a)
        j = 0
        while i > 0 and j < len(b) and a[i - 1] == -b[j]:
            i -= 1
            j += 1
        return Word._unsafe(a[:i] + b[j:])

    def __invert__(self) -> "Word":
        return Word._unsafe(tuple(-l for l in reversed(self._letters)))

    def __pow__(self, n: int) -> "Word":
        if n == 0 or not self._letters:
            return Word._unsafe(())
        core, conj = cyclic_reduce(self)
        reps = abs(n)
        block = core._letters if n > 0 else (~core)._letters
        return Word._unsafe(conj._letters + block * reps + (~conj)._letters)

    def conjugate(self, g: "Word") -> "Word":
        """a^g with the global convention a^g = g^-1 a g."""
        return ~g * self * g

    def __str__(self) -> str:
        return word_to_str(self)

    def __repr__(self) -> str:
        return f"Word({word_to_str(self)!r})"


IDENTITY = Word._unsafe(())


def gen(i: int) -> Word:
    """The basis element e_i."""
    if i < 1:
        raise ValueError(f"generator index must be >= 1, got {i}")
    return Word._unsafe((i,))


def commutator(a: Word, b: Word) -> Word:
    """[a, b] = a b a^-1 b^-1."""
    return a * b * ~a * ~b


def multiply(u: Word, v: Word) -> Word:
    return u * v


def invert(w: Word) -> Word:
    return ~w


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split w = conjugator * core * conjugator^-1 with core cyclically reduced."""
    letters = w.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == -letters[j]:
        i += 1
        j -= 1
    return Word._unsafe(letters[i : j + 1]), Word._unsafe(letters[:i])


def cyclic_length(w: Word) -> int:
    letters = w.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == -letters[j]:
        i += 1
        j -= 1
    return j + 1 - i


def primitive_root(w: Word) -> tuple[Word, int]:
    """The unique (root, exponent) with w = root**exponent, root not a proper power.

    Found as the smallest period of the cyclically reduced core (failure
    function of KMP), then conjugated back.
    """
    if w.is_identity:
        raise ValueError("identity has no primitive root")
    core, conj = cyclic_reduce(w)
    letters = core.letters
    n = len(letters)
    fail = [0] * (n + 1)
    k = 0
    for i in range(1, n):
        while k and letters[i] != letters[k]:
            k = fail[k]
        if letters[i] == letters[k]:
            k += 1
        fail[i + 1] = k
    period = n - fail[n]
    if n % period:
        period = n
    root_core = Word._unsafe(letters[:period])
    root = conj * root_core * ~conj
    return root, n // period


def centralizer_generator(w: Word) -> Word:
    """Generator of the centralizer of w: its primitive root."""
    if w.is_identity:
        raise ValueError("centralizer of the identity is the whole group")
    return primitive_root(w)[0]


def power_exponent_of(w: Word, b: Word) -> int | None:
    """The unique t with w = b**t, or None if w is not a power of b.

    Exact: w = b**t forces w = z bhat**t z^-1 letter for letter, where
    b = z bhat z^-1 is the cyclic decomposition, so t is read off from
    the length and verified.
    """
    if b.is_identity:
        raise ValueError("b must be nontrivial")
    if w.is_identity:
        return 0
    bcore, bconj = cyclic_reduce(b)
    z = bconj.letters
    lw, lz, lc = len(w), len(z), len(bcore)
    middle_len = lw - 2 * lz
    if middle_len <= 0 or middle_len % lc:
        return None
    t = middle_len // lc
    letters = w.letters
    if letters[:lz] != z or letters[lw - lz :] != (~bconj).letters:
        return None
    middle = letters[lz : lw - lz]
    if middle == bcore.letters * t:
        return t
    if middle == (~bcore).letters * t:
        return -t
    return None


def abelianize(w: Word, rank: int) -> tuple[int, ...]:
    """Exponent-sum vector of w in Z^rank."""
    if rank < 1:
        raise ValueError("rank must be positive")
    if w.max_generator() > rank:
        raise ValueError(
            f"word uses generator e{w.max_generator()} beyond rank {rank}"
        )
    vec = [0] * rank
    for letter in w:
        vec[abs(letter) - 1] += 1 if letter > 0 else -1
    return tuple(vec)


def apply_endo(f, w: Word) -> Word:
    """Homomorphic image of w under f (an Endo or a {index: Word} mapping)."""
    images: Mapping[int, Word] = getattr(f, "images", f)
    out: list[int] = []
    for letter in w:
        image = images.get(abs(letter))
        if image is None:
            raise KeyError(f"no image for generator e{abs(letter)}")
        block = image.letters if letter > 0 else (~image).letters
        for x in block:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return Word._unsafe(tuple(out))


def iter_reduced_words(rank: int, max_len: int, min_len: int = 0) -> Iterator[Word]:
    """All freely reduced words over e1..e_rank of length in [min_len, max_len].

    Enumeration order: length first, then letterwise by the package
    order (backtracking over non-cancelling letters only).
    """
    alphabet = sorted(
        [i for g in range(1, rank + 1) for i in (g, -g)], key=letter_key
    )
    current: list[int] = []

    def rec(remaining: int) -> Iterator[Word]:
        if remaining == 0:
            yield Word._unsafe(tuple(current))
            return
        for letter in alphabet:
            if current and current[-1] == -letter:
                continue
            current.append(letter)
            yield from rec(remaining - 1)
            current.pop()

    for length in range(min_len, max_len + 1):
        yield from rec(length)


# --- parsing and printing ---------------------------------------------------

_ALIASES = {"a": 1, "b": 2, "c": 3, "d": 4}


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens: list[tuple[str, object, int]] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()^":
            tokens.append((ch, ch, i))
            i += 1
        elif ch == "e":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise WordSyntaxError("expected digits after 'e'", i)
            index = int(text[i + 1 : j])
            if index == 0:
                raise WordSyntaxError("generator index 0 is not allowed", i)
            tokens.append(("gen", index, i))
            i = j
        elif ch in _ALIASES:
            tokens.append(("gen", _ALIASES[ch], i))
            i += 1
        elif ch in "+-" or ch.isdigit():
            j = i + 1 if ch in "+-" else i
            k = j
            while k < n and text[k].isdigit():
                k += 1
            if k == j:
                raise WordSyntaxError("expected an integer", i)
            tokens.append(("int", int(text[i:k]), i))
            i = k
        else:
            raise WordSyntaxError(f"unexpected character {ch!r}", i)
    return tokens


def parse(text: str) -> Word:
    """Parse the ASCII word grammar.

    word := factor* ; factor := atom ("^" signed-int)? ;
    atom := generator | "(" word ")" | "1" ;
    generator := "e" positive-int | one of the aliases a, b, c, d.
    """
    tokens = _tokenize(text)
    pos = 0

    def parse_word(depth: int) -> Word:
        nonlocal pos
        result = IDENTITY
        while pos < len(tokens):
            kind, value, at = tokens[pos]
            if kind == ")":
                if depth == 0:
                    raise WordSyntaxError("unbalanced ')'", at)
                return result
            result = result * parse_factor()
        return result

    def parse_factor() -> Word:
        nonlocal pos
        kind, value, at = tokens[pos]
        if kind == "gen":
            atom = gen(value)  # type: ignore[arg-type]
            pos += 1
        elif kind == "int" and value == 1:
            atom = IDENTITY
            pos += 1
        elif kind == "(":
            pos += 1
            atom = parse_word(depth=1)
            if pos >= len(tokens) or tokens[pos][0] != ")":
                raise WordSyntaxError("missing ')'", at)
            pos += 1
        else:
            raise WordSyntaxError(f"unexpected token {value!r}", at)
        if pos < len(tokens) and tokens[pos][0] == "^":
            pos += 1
            if pos >= len(tokens) or tokens[pos][0] != "int":
                where = tokens[pos - 1][2]
                raise WordSyntaxError("expected an integer exponent after '^'", where)
            exponent = tokens[pos][1]
            pos += 1
            atom = atom ** exponent  # type: ignore[operator]
        return atom

    result = parse_word(depth=0)
    if pos != len(tokens):
        raise WordSyntaxError("trailing input", tokens[pos][2])
    return result


def word_to_str(w: Word) -> str:
    """Print in the parse grammar, preferring '^-1' and '^k' for runs.

    The identity prints as "1" (which parse accepts back).
    """
    if w.is_identity:
        return "1"
    parts: list[str] = []
    letters = w.letters
    i = 0
    while i < len(letters):
        j = i
        while j < len(letters) and letters[j] == letters[i]:
            j += 1
        run = j - i
        exponent = run if letters[i] > 0 else -run
        base = f"e{abs(letters[i])}"
        parts.append(base if exponent == 1 else f"{base}^{exponent}")
        i = j
    return " ".join(parts)
