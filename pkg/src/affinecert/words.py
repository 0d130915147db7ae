"""Freely reduced words over a generating set and their realizations.

Words are enumerated in length-lexicographic order with the alphabet
g1, g1^-1, g2, g2^-1, ...; the count at length L over f generators is
2f * (2f-1)^(L-1).
"""

from dataclasses import dataclass

from .affine import compose, identity
from .errors import BallTooLarge

MAX_WORD_LEN = 16


@dataclass(frozen=True)
class Word:
    """A freely reduced word: signed 1-based generator indices."""

    letters: tuple

    def __post_init__(self):
        for a, b in zip(self.letters, self.letters[1:]):
            if a == -b:
                raise ValueError("word is not freely reduced")

    @property
    def length(self):
        return len(self.letters)

    def inverse(self):
        return Word(tuple(-x for x in reversed(self.letters)))

    def __mul__(self, other):
        letters = list(self.letters)
        for x in other.letters:
            if letters and letters[-1] == -x:
                letters.pop()
            else:
                letters.append(x)
        return Word(tuple(letters))

    def power(self, n):
        out = Word(())
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            out = out * base
        return out

    def to_str(self, names):
        if not self.letters:
            return "1"
        parts = []
        for x in self.letters:
            name = names[abs(x) - 1]
            parts.append(name if x > 0 else name + "^-1")
        return " ".join(parts)


def parse_word(text, names):
    """Parse 'a b^-1 a^2' into a Word over the named generators."""
    letters = []
    for token in text.split():
        if token == "1":
            continue
        name, _, power = token.partition("^")
        if name not in names:
            raise ValueError(f"unknown generator '{name}'")
        exp = 1
        if power:
            try:
                exp = int(power)
            except ValueError:
                raise ValueError(f"bad exponent in '{token}'") from None
        idx = names.index(name) + 1
        letters.extend([idx if exp > 0 else -idx] * abs(exp))
    word = Word(())
    for x in letters:
        word = word * Word((x,))
    return word


def _alphabet(num_generators):
    letters = []
    for i in range(1, num_generators + 1):
        letters.extend([i, -i])
    return letters


def realize(word, generators, dim=None):
    """The affine map of a word (positive letters apply rightmost last)."""
    if dim is None:
        dim = generators[0].dim
    out = identity(dim)
    for x in word.letters:
        g = generators[abs(x) - 1]
        out = compose(out, g if x > 0 else g.inverse())
    return out


def enumerate_words(generators, max_len, dim=None):
    """Yield (Word, AffineMap) for every freely reduced word, length-lex.

    The identity comes first; within each length, words are ordered
    lexicographically by the alphabet g1 < g1^-1 < g2 < g2^-1 < ...
    Maps are built incrementally from the parent word.
    """
    if max_len > MAX_WORD_LEN:
        raise BallTooLarge(f"word balls are capped at length {MAX_WORD_LEN}")
    if not generators:
        if dim is None:
            raise ValueError("an empty generating set needs an explicit dimension")
        yield (Word(()), identity(dim))
        return
    dim = generators[0].dim
    letters = _alphabet(len(generators))
    images = {}
    for x in letters:
        g = generators[abs(x) - 1]
        images[x] = g if x > 0 else g.inverse()

    level = [(Word(()), identity(dim))]
    yield level[0]
    for _ in range(max_len):
        next_level = []
        for word, m in level:
            last = word.letters[-1] if word.letters else 0
            for x in letters:
                if x == -last:
                    continue
                item = (Word(word.letters + (x,)), compose(m, images[x]))
                next_level.append(item)
                yield item
        level = next_level


def count_words(num_generators, max_len):
    """1 + sum over lengths of 2f (2f-1)^(L-1)."""
    f = num_generators
    total = 1
    for length in range(1, max_len + 1):
        total += 2 * f * (2 * f - 1) ** (length - 1)
    return total
