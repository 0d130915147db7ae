import pytest

from affinecert.affine import AffineMap, maps_close
from affinecert.errors import BallTooLarge
from affinecert.words import Word, count_words, enumerate_words, parse_word, realize

from conftest import boost, rot


@pytest.fixture
def gens():
    return [AffineMap(boost(0.7), [0.0, 1.0, 0.0], name="a"),
            AffineMap(rot(1.1), [1.0, 0.0, 0.0], name="b")]


class TestEnumeration:
    def test_length_one(self, gens):
        words = [w.to_str(["a", "b"]) for w, _ in enumerate_words(gens, 1)]
        assert words == ["1", "a", "a^-1", "b", "b^-1"]

    def test_length_two_counts(self, gens):
        items = list(enumerate_words(gens, 2))
        assert len(items) == 1 + 4 + 12
        assert count_words(2, 2) == 17

    def test_first_length_two_word(self, gens):
        length_two = [w for w, _ in enumerate_words(gens, 2) if w.length == 2]
        assert length_two[0].to_str(["a", "b"]) == "a a"

    def test_free_reduction_excludes_cancellations(self, gens):
        seen = {w.letters for w, _ in enumerate_words(gens, 3)}
        assert (1, -1) not in seen
        assert (1, -1, 2) not in seen

    def test_counts_formula(self, gens):
        for f in (1, 2, 3):
            for max_len in range(1, 6):
                expected = 1 + sum(2 * f * (2 * f - 1) ** (k - 1)
                                   for k in range(1, max_len + 1))
                assert count_words(f, max_len) == expected
        assert len(list(enumerate_words(gens, 4))) == count_words(2, 4)

    def test_realizations_match_direct_products(self, gens):
        for word, m in enumerate_words(gens, 3):
            assert maps_close(m, realize(word, gens))

    def test_ball_cap(self, gens):
        with pytest.raises(BallTooLarge):
            list(enumerate_words(gens, 17))

    def test_exhaustive_no_duplicates(self, gens):
        seen = [w.letters for w, _ in enumerate_words(gens, 5)]
        assert len(seen) == len(set(seen)) == count_words(2, 5)


class TestWordAlgebra:
    def test_multiplication_reduces(self):
        w = Word((1, 2)) * Word((-2, -1))
        assert w.letters == ()

    def test_inverse(self):
        w = Word((1, 2, -1))
        assert (w * w.inverse()).letters == ()

    def test_power(self):
        assert Word((1,)).power(3).letters == (1, 1, 1)
        assert Word((1,)).power(-2).letters == (-1, -1)

    def test_parse(self):
        names = ["a", "b"]
        assert parse_word("a b^-1", names).letters == (1, -2)
        assert parse_word("a^2 b", names).letters == (1, 1, 2)
        assert parse_word("a a^-1", names).letters == ()
        assert parse_word("1", names).letters == ()

    def test_parse_unknown_rejected(self):
        with pytest.raises(ValueError):
            parse_word("c", ["a", "b"])
