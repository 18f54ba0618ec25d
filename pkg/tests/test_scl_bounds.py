import unittest
import sys
import os
from fractions import Fraction

import hypothesis.strategies as st
from hypothesis import given, settings

# Add project root to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from src.services.scl_bounds import (
    G2_NOTE, bound, coefficient_identity_check, coefficient_identity_symbolic, corollary1,
    corollary2, decompose, identity_sweep, leading_factor, reference_lower_bound,
    reference_nonsep_upper, table,
)
from src.utils.formatting import parse_rational, render_approx, render_decimal, render_rational


genus_and_h = st.integers(min_value=2, max_value=200).flatmap(
    lambda g: st.tuples(st.just(g), st.integers(min_value=0, max_value=g))
)


class TestSclBounds(unittest.TestCase):
    def test_decompose(self):
        print("\nTesting Euclidean decomposition...")
        self.assertEqual(decompose(5, 2), (2, 1))
        self.assertEqual(decompose(6, 2), (3, 0))
        self.assertEqual(decompose(7, 3), (2, 1))
        for bad in [(5, 3), (5, 0), (1, 1)]:
            with self.assertRaises(ValueError):
                decompose(*bad)

    def test_spot_values(self):
        print("\nTesting spot values...")
        self.assertEqual(bound(2, 1).value, Fraction(3, 5))
        self.assertEqual(bound(5, 2).value, Fraction(875, 649))
        self.assertEqual(bound(6, 2).value, Fraction(90, 91))
        self.assertEqual(bound(5, 1).value, Fraction(9, 22))
        for g in range(2, 30):
            self.assertEqual(bound(g, 0).value, 0)
            self.assertEqual(bound(g, g).value, 0)

    def test_bound_result_fields(self):
        print("\nTesting BoundResult fields...")
        result = bound(5, 2)
        self.assertEqual(result.decomposition, (2, 1))
        self.assertEqual([(s.g, s.h, s.k, s.r) for s in result.trace], [(5, 2, 2, 1), (5, 1, 5, 0)])
        self.assertEqual(result.trace[-1].value, Fraction(9, 22))
        self.assertFalse(result.via_symmetry)

        mirrored = bound(5, 3)
        self.assertTrue(mirrored.via_symmetry)
        self.assertEqual(mirrored.value, result.value)
        self.assertEqual(mirrored.decomposition, (2, 1))

        self.assertIsNone(bound(4, 0).decomposition)
        self.assertIn(G2_NOTE, bound(2, 1).notes)
        self.assertNotIn(G2_NOTE, bound(3, 1).notes)

        data = result.to_dict()
        self.assertEqual(data["value"], {"num": 875, "den": 649})
        self.assertEqual(data["decomposition"], {"k": 2, "r": 1})

    def test_bound_errors(self):
        print("\nTesting bound preconditions...")
        for bad in [(1, 0), (5, 6), (5, -1)]:
            with self.assertRaises(ValueError):
                bound(*bad)

    def test_bound_can_exceed_one(self):
        # 不截断到任何平凡上界
        self.assertGreater(bound(5, 2).value, 1)

    def test_leading_factor(self):
        print("\nTesting leading factor...")
        self.assertEqual(leading_factor(5, 2, 1), Fraction(70, 59))
        self.assertEqual(leading_factor(6, 2, 0), Fraction(90, 91))

    def test_corollaries(self):
        print("\nTesting closed forms...")
        self.assertEqual(corollary1(2), Fraction(3, 5))
        self.assertEqual(corollary1(3), Fraction(15, 28))
        self.assertEqual(corollary2(6, 2), Fraction(90, 91))
        self.assertEqual(corollary2(4, 2), Fraction(10, 9))
        with self.assertRaises(ValueError):
            corollary2(5, 2)
        with self.assertRaises(ValueError):
            corollary1(1)

    def test_coefficient_identity(self):
        print("\nTesting coefficient identity...")
        self.assertTrue(coefficient_identity_check(5, 2))
        self.assertTrue(coefficient_identity_check(6, 3))
        self.assertTrue(coefficient_identity_symbolic())

    def test_reference_constants(self):
        print("\nTesting reference constants...")
        self.assertEqual(reference_lower_bound(2), Fraction(1, 42))
        self.assertEqual(reference_lower_bound(10), Fraction(1, 186))
        self.assertEqual(reference_nonsep_upper(1), Fraction(1, 12))
        self.assertEqual(reference_nonsep_upper(2), Fraction(1, 15))
        self.assertEqual(reference_nonsep_upper(5), Fraction(5, 132))

    def test_table(self):
        print("\nTesting bound table...")
        rows = table(6, 6, [2])
        self.assertEqual(len(rows), 1)
        self.assertEqual(rows[0].bound, Fraction(90, 91))
        self.assertEqual(rows[0].lower_ref, Fraction(1, 114))
        self.assertEqual((rows[0].k, rows[0].r), (3, 0))
        self.assertEqual(rows[0].decimal, "0.98901099")

        rows = table(2, 10, "all")
        self.assertEqual(len(rows), sum(g - 1 for g in range(2, 11)))
        self.assertEqual([(row.g, row.h) for row in rows], sorted((row.g, row.h) for row in rows))

        # 超出 0..g 的 h 被跳过
        rows = table(2, 4, [3])
        self.assertEqual([(row.g, row.h) for row in rows], [(3, 3), (4, 3)])

        with self.assertRaises(ValueError):
            table(2, 3, [7])
        with self.assertRaises(ValueError):
            table(5, 4)

    def test_formatting(self):
        print("\nTesting rational rendering...")
        self.assertEqual(render_approx(Fraction(90, 91), 8), "90/91 (≈0.98901099)")
        self.assertEqual(render_rational(Fraction(0)), "0")
        self.assertEqual(render_decimal(Fraction(1, 8), 2), "0.12")
        self.assertEqual(render_decimal(Fraction(3, 8), 2), "0.38")
        self.assertEqual(render_decimal(Fraction(-1, 3), 3), "-0.333")
        self.assertEqual(parse_rational(" 875/649 "), Fraction(875, 649))
        with self.assertRaises(ValueError):
            parse_rational("0.5")


class TestExactSweeps(unittest.TestCase):
    def test_corollary1_sweep(self):
        print("\nTesting corollary 1 for g = 2..1000...")
        for g in range(2, 1001):
            self.assertEqual(bound(g, 1).value, corollary1(g), f"g={g}")

    def test_corollary2_sweep(self):
        print("\nTesting corollary 2 for g = 2..300...")
        for g in range(2, 301):
            for h in range(1, g // 2 + 1):
                if g % h == 0:
                    self.assertEqual(bound(g, h).value, corollary2(g, h), f"g={g}, h={h}")

    def test_coefficient_identity_sweep(self):
        print("\nTesting coefficient identity for g = 2..300...")
        for g in range(2, 301):
            for h in range(1, g // 2 + 1):
                self.assertTrue(coefficient_identity_check(g, h), f"g={g}, h={h}")

    def test_lower_bound_sandwich(self):
        print("\nTesting 1/(18g+6) <= B(g,h) for g = 2..500...")
        for g in range(2, 501):
            lower = reference_lower_bound(g)
            for h in range(1, g):
                self.assertGreaterEqual(bound(g, h).value, lower)

    def test_asymptotic_order(self):
        print("\nTesting g*B(g,1) for g = 2..1000...")
        scaled = [g * bound(g, 1).value for g in range(2, 1001)]
        for a, b in zip(scaled, scaled[1:]):
            self.assertLess(a, b)
        self.assertTrue(all(value < 3 for value in scaled))
        self.assertTrue(Fraction(29, 10) <= 100 * bound(100, 1).value <= 3)

    def test_identity_sweep(self):
        print("\nTesting identity sweep report...")
        checks = identity_sweep(2, 120)
        self.assertTrue(all(check.passed for check in checks), [c.to_dict() for c in checks])
        self.assertIn("asymptotic_g100", [check.name for check in checks])
        self.assertNotIn("asymptotic_g100", [check.name for check in identity_sweep(2, 20)])
        with self.assertRaises(ValueError):
            identity_sweep(1, 5)


class TestBoundProperties(unittest.TestCase):
    @settings(max_examples=200, deadline=None)
    @given(genus_and_h)
    def test_symmetry(self, pair):
        g, h = pair
        self.assertEqual(bound(g, h).value, bound(g, g - h).value)

    @settings(max_examples=200, deadline=None)
    @given(genus_and_h)
    def test_value_zero_iff_trivial(self, pair):
        g, h = pair
        value = bound(g, h).value
        self.assertGreaterEqual(value, 0)
        self.assertEqual(value == 0, h in (0, g))


if __name__ == '__main__':
    unittest.main()
