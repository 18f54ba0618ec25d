import unittest
import sys
import os

import hypothesis.strategies as st
from hypothesis import given, settings

# Add project root to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from src.services.trace_words import (
    Generator, Word, bfs_equal, commutes, conjugate, equal, lemma8_conjugator,
    lemma8_endpoints, lemma8_verify, lemma8_words, normalize, search_conjugator, substitute,
)


ALPHABET = 5

signed_letters = st.tuples(
    st.integers(min_value=1, max_value=ALPHABET),
    st.sampled_from([1, -1]),
).map(lambda pair: pair[0] * pair[1])

words = st.lists(signed_letters, max_size=8).map(lambda letters: Word.from_signed(letters, ALPHABET))


def w(*letters, n=ALPHABET):
    return Word.from_signed(letters, n)


class TestTraceWords(unittest.TestCase):
    def test_commutes(self):
        print("\nTesting commutation predicate...")
        self.assertTrue(commutes(1, 3))
        self.assertFalse(commutes(4, 5))
        self.assertFalse(commutes(7, 7))
        with self.assertRaises(ValueError):
            commutes(0, 2)

    def test_word_construction(self):
        print("\nTesting Word construction...")
        word = w(1, -3, 2)
        self.assertEqual(word.to_signed(), [1, -3, 2])
        self.assertEqual(str(word), "x1 x3^-1 x2")
        self.assertEqual(str(Word.identity(3)), "1")
        self.assertEqual(word.inverse().to_signed(), [-2, 3, -1])

        with self.assertRaises(ValueError):
            Generator(0)
        with self.assertRaises(ValueError):
            Word.from_signed([4], 3)
        with self.assertRaises(ValueError):
            Word.from_signed([0], 3)
        with self.assertRaises(ValueError):
            w(1, n=3) * w(1, n=4)

    def test_normalize_examples(self):
        print("\nTesting normal form examples...")
        self.assertEqual(normalize(w(1, 2, -2, -1)).canonical_letters, ())
        self.assertEqual(normalize(w(3, 1)), normalize(w(1, 3)))
        self.assertNotEqual(normalize(w(1, 2)), normalize(w(2, 1)))
        self.assertEqual(normalize(Word.identity(4)).canonical_letters, ())

    def test_equal_examples(self):
        print("\nTesting word equality...")
        self.assertTrue(equal(w(1, 3), w(3, 1)))
        self.assertFalse(equal(w(2, 3), w(3, 2)))
        word = w(1, 2, -4, 3)
        self.assertTrue(equal(word * word.inverse(), Word.identity(ALPHABET)))
        with self.assertRaises(ValueError):
            equal(w(1, n=3), w(1, n=4))

    def test_conjugate_examples(self):
        print("\nTesting conjugation...")
        self.assertEqual(conjugate(w(1, n=3), Word.identity(3)).to_signed(), [1])

        result = conjugate(w(1, 3, 2, n=3), w(2, n=3))
        self.assertEqual(result.to_signed(), [2, 1, 3, 2, -2])
        self.assertTrue(equal(result, w(2, 1, 3, n=3)))

        word, by = w(1, 2, 5), w(3, -4)
        self.assertTrue(equal(conjugate(conjugate(word, by), by.inverse()), word))

    def test_bfs_oracle_agrees_on_examples(self):
        print("\nTesting BFS move-search oracle...")
        self.assertTrue(bfs_equal(w(1, 3), w(3, 1)))
        self.assertFalse(bfs_equal(w(1, 2), w(2, 1)))
        self.assertTrue(bfs_equal(w(1, 2, -2, 4), w(4, 1)))
        self.assertFalse(bfs_equal(w(1, 3, 5), w(5, 3, 1, 2)))
        # 超出状态上限时无法判定
        self.assertIsNone(bfs_equal(w(1, 3, 5), w(5, 3, 1, 2), max_states=1))

    def test_substitute(self):
        print("\nTesting substitution of generators...")
        images = [w(1, 1, 2, n=6), w(4, 5, n=6)]
        result = substitute(w(1, -2, n=2), images, 6)
        self.assertEqual(result.to_signed(), [1, 1, 2, -5, -4])

    def test_lemma8_endpoints(self):
        print("\nTesting interleaved / straight endpoints...")
        interleaved, straight = lemma8_endpoints(3)
        self.assertEqual(interleaved.to_signed(), [1, 3, 2])
        self.assertEqual(straight.to_signed(), [1, 2, 3])

        interleaved, straight = lemma8_endpoints(1)
        self.assertEqual(interleaved.to_signed(), [1])
        self.assertEqual(straight.to_signed(), [1])

        interleaved, straight = lemma8_endpoints(4)
        self.assertEqual(interleaved.to_signed(), [1, 3, 2, 4])
        self.assertEqual(straight.to_signed(), [1, 2, 3, 4])

        with self.assertRaises(ValueError):
            lemma8_endpoints(0)

    def test_lemma8_intermediate_words(self):
        print("\nTesting intermediate words X_j...")
        words_5 = lemma8_words(5)
        self.assertEqual(len(words_5), 6)
        self.assertEqual(words_5[1].to_signed(), [1, 3, 5, 2, 4])
        self.assertEqual(words_5[2].to_signed(), [1, 2, 4, 3, 5])
        self.assertEqual(words_5[5].to_signed(), [1, 2, 3, 4, 5])
        self.assertEqual(lemma8_conjugator(5, 1).to_signed(), [3, 5])
        self.assertEqual(lemma8_conjugator(5, 2).to_signed(), [4])
        with self.assertRaises(ValueError):
            lemma8_conjugator(5, 5)

    def test_lemma8_verify_small(self):
        print("\nTesting conjugation certificates for n=1 and n=3...")
        certificate = lemma8_verify(1)
        self.assertTrue(certificate.valid)
        self.assertEqual(len(certificate.steps), 0)

        certificate = lemma8_verify(3)
        self.assertTrue(certificate.valid)
        self.assertEqual(len(certificate.steps), 2)
        self.assertEqual(certificate.steps[0].conjugator.to_signed(), [3])
        self.assertEqual(certificate.steps[1].conjugator.to_signed(), [])
        print(certificate.render_text())

    def test_lemma8_verify_with_oracle(self):
        print("\nTesting certificate n=6 against brute-force search...")
        certificate = lemma8_verify(6, oracle_max_n=6)
        self.assertTrue(certificate.valid)
        self.assertTrue(certificate.oracle_checked)
        for step in certificate.steps:
            self.assertTrue(step.oracle)
            self.assertIsNotNone(step.searched_conjugator)
            self.assertTrue(equal(conjugate(step.before, step.searched_conjugator), step.after))

    def test_lemma8_verify_inconclusive_oracle(self):
        print("\nTesting certificate when the move search hits its state cap...")
        certificate = lemma8_verify(5, oracle_max_n=6, max_states=1)
        self.assertTrue(certificate.valid, certificate.render_text())
        self.assertNotIn(False, [step.oracle for step in certificate.steps])
        self.assertIsNone(certificate.steps[0].oracle)
        self.assertTrue(any("oracle inconclusive" in note for note in certificate.notes))
        self.assertEqual(certificate.summary(), "n=5: 4/4 steps valid, oracle checked, certificate valid")

    def test_lemma8_verify_range(self):
        print("\nTesting certificates for n = 1..12...")
        for n in range(1, 13):
            certificate = lemma8_verify(n)
            self.assertTrue(certificate.valid, certificate.render_text())
            self.assertEqual(certificate.oracle_checked, n <= 6)

        summary = lemma8_verify(12).summary()
        self.assertEqual(summary, "n=12: 11/11 steps valid, oracle skipped, certificate valid")

    def test_certificate_json_shape(self):
        print("\nTesting certificate serialization...")
        data = lemma8_verify(3).to_dict()
        self.assertEqual(data["n"], 3)
        self.assertTrue(data["valid"])
        self.assertEqual(data["steps"][0]["conjugator"], "x3")
        self.assertEqual(data["steps"][0]["before"], "x1 x2 x3")
        self.assertEqual(data["steps"][0]["after"], "x1 x3 x2")

    def test_search_conjugator(self):
        print("\nTesting conjugator search...")
        found = search_conjugator(w(1, 2, 3, n=3), w(1, 3, 2, n=3), [2, 3])
        self.assertIsNotNone(found)
        self.assertIsNone(search_conjugator(w(1, n=3), w(2, n=3), [1, 2, 3]))


class TestTraceWordProperties(unittest.TestCase):
    @settings(max_examples=200, deadline=None)
    @given(words)
    def test_normal_form_idempotent(self, word):
        form = normalize(word)
        again = normalize(Word(form.canonical_letters, ALPHABET))
        self.assertEqual(again, form)
        self.assertLessEqual(len(form.canonical_letters), len(word))

    @settings(max_examples=200, deadline=None)
    @given(words)
    def test_inverse_cancels(self, word):
        self.assertTrue(equal(word * word.inverse(), Word.identity(ALPHABET)))
        self.assertTrue(equal(word, word))

    @settings(max_examples=200, deadline=None)
    @given(words, words, words)
    def test_equality_is_equivalence(self, a, b, c):
        self.assertEqual(equal(a, b), equal(b, a))
        if equal(a, b) and equal(b, c):
            self.assertTrue(equal(a, c))

    @settings(max_examples=200, deadline=None)
    @given(words, st.data())
    def test_adjacent_swaps(self, word, data):
        if len(word) < 2:
            return
        p = data.draw(st.integers(min_value=0, max_value=len(word) - 2))
        letters = word.to_signed()
        a, b = letters[p], letters[p + 1]
        swapped = Word.from_signed(letters[:p] + [b, a] + letters[p + 2:], ALPHABET)

        if commutes(abs(a), abs(b)):
            self.assertEqual(normalize(swapped), normalize(word))
            self.assertTrue(bfs_equal(swapped, word))
        elif abs(abs(a) - abs(b)) == 1:
            self.assertNotEqual(normalize(swapped), normalize(word))
            self.assertFalse(bfs_equal(swapped, word))

    @settings(max_examples=100, deadline=None)
    @given(words, st.randoms(use_true_random=False))
    def test_normal_form_matches_bfs_oracle(self, word, random):
        letters = word.to_signed()
        shuffled = letters[:]
        random.shuffle(shuffled)
        other = Word.from_signed(shuffled, ALPHABET)
        self.assertEqual(equal(word, other), bfs_equal(word, other))

    @settings(max_examples=100, deadline=None)
    @given(words, words)
    def test_independent_pairs_match_bfs_oracle(self, first, second):
        self.assertEqual(equal(first, second), bfs_equal(first, second))

    @settings(max_examples=100, deadline=None)
    @given(words, signed_letters, st.data())
    def test_inserted_cancelling_pair_matches_bfs_oracle(self, word, letter, data):
        letters = word.to_signed()
        p = data.draw(st.integers(min_value=0, max_value=len(letters)))
        padded = Word.from_signed(letters[:p] + [letter, -letter] + letters[p:], ALPHABET)
        self.assertTrue(equal(padded, word))
        self.assertTrue(bfs_equal(padded, word))
        self.assertEqual(normalize(padded), normalize(word))


if __name__ == '__main__':
    unittest.main()
