from __future__ import annotations

import math

import pytest
import sympy
from hypothesis import given, strategies as st

from lrmlab.errors import CapExceeded, LrmError
from lrmlab.phase import (
    AnyonModel,
    GoldenInt,
    GsdReport,
    factorize,
    fibonacci_gsd_closed,
    gsd,
    is_probable_prime,
    lucas_fibonacci,
    parse_golden,
    s3_gsd_closed,
    strip_common,
    strong_lrm_verdict,
)

TAU = GoldenInt.tau()
SQ5 = sympy.sqrt(5)
SYM_TAU = (1 + SQ5) / 2

goldens = st.builds(GoldenInt, st.integers(-50, 50), st.integers(-50, 50))


def as_sympy(g: GoldenInt):
    return g.a + g.b * SYM_TAU


class TestGoldenInt:
    def test_tau_squared(self):
        assert TAU * TAU == GoldenInt(1, 1)

    def test_inverse_powers(self):
        assert TAU ** -1 == GoldenInt(-1, 1)
        assert TAU ** -2 == GoldenInt(2, -1)

    def test_non_unit_inverse_rejected(self):
        with pytest.raises(LrmError):
            GoldenInt(2) ** -1

    def test_inexact_division(self):
        with pytest.raises(LrmError):
            GoldenInt(1).exact_div(GoldenInt(2))

    @given(goldens, goldens)
    def test_ring_matches_sympy(self, x, y):
        assert sympy.expand(as_sympy(x * y) - as_sympy(x) * as_sympy(y)) == 0
        assert sympy.expand(as_sympy(x + y) - as_sympy(x) - as_sympy(y)) == 0

    @given(goldens)
    def test_norm_is_product_with_conjugate(self, x):
        assert x * x.conjugate() == GoldenInt(x.norm())

    @given(goldens, goldens)
    def test_exact_division_round_trip(self, x, y):
        if y == GoldenInt(0):
            return
        assert (x * y).exact_div(y) == x

    @given(goldens)
    def test_sign_matches_float(self, x):
        value = x.a + x.b * (1 + math.sqrt(5)) / 2
        want = 0 if x == GoldenInt(0) else (1 if value > 0 else -1)
        assert x.sign() == want

    @pytest.mark.parametrize("n", range(51))
    def test_tau_power_traces(self, n):
        """``(tau^n + tau^-n)^2`` is ``L_n^2`` for even ``n`` and ``5 F_n^2`` for odd ``n``."""
        s = TAU**n + TAU ** (-n)
        f, lucas = lucas_fibonacci(n)
        assert (s * s) == GoldenInt(lucas * lucas if n % 2 == 0 else 5 * f * f)

    @pytest.mark.parametrize(
        "text, want",
        [("1+t", GoldenInt(1, 1)), ("2t-1", GoldenInt(-1, 2)), ("tau", TAU), ("τ", TAU), ("3", GoldenInt(3)), ("-t", GoldenInt(0, -1))],
    )
    def test_parse(self, text, want):
        assert parse_golden(text) == want

    @pytest.mark.parametrize("text", ["", "1+", "t^2", "x"])
    def test_parse_errors(self, text):
        with pytest.raises(LrmError):
            parse_golden(text)


class TestLucasFibonacci:
    @pytest.mark.parametrize("n", range(60))
    def test_against_sympy(self, n):
        assert lucas_fibonacci(n) == (sympy.fibonacci(n), sympy.lucas(n))


class TestGsd:
    @pytest.mark.parametrize("genus, want", [(1, 4), (2, 25), (3, 225), (4, 2500)])
    def test_fibonacci_values(self, genus, want):
        assert gsd(AnyonModel.fibonacci(), genus).gsd == want

    @pytest.mark.parametrize("genus", range(1, 9))
    def test_fibonacci_against_sympy(self, genus):
        dims = [1, SYM_TAU, SYM_TAU, SYM_TAU**2]
        dsq = sum(d * d for d in dims)
        want = sympy.simplify(sympy.expand(sum((dsq / (d * d)) ** (genus - 1) for d in dims)))
        assert gsd(AnyonModel.fibonacci(), genus).gsd == want

    @pytest.mark.parametrize("genus", range(1, 51))
    def test_fibonacci_closed_form(self, genus):
        assert gsd(AnyonModel.fibonacci(), genus).gsd == fibonacci_gsd_closed(genus)

    @pytest.mark.parametrize("genus", range(2, 51))
    def test_fibonacci_has_five(self, genus):
        assert gsd(AnyonModel.fibonacci(), genus).gsd % 5 == 0

    @pytest.mark.parametrize("genus", range(1, 31))
    def test_s3_closed_form(self, genus):
        assert gsd(AnyonModel.s3(), genus).gsd == s3_gsd_closed(genus)

    @pytest.mark.parametrize("genus", range(2, 31))
    def test_s3_divisibility(self, genus):
        value = gsd(AnyonModel.s3(), genus).gsd
        assert value % 3 != 0
        assert value % 4 == 0 and (value // 4) % 2 == 1

    def test_s3_genus_two(self):
        report = gsd(AnyonModel.s3(), 2)
        assert report.gsd == 116 and report.prime_factors == (2, 2, 29)

    @pytest.mark.parametrize("model, count", [(AnyonModel.fibonacci(), 4), (AnyonModel.s3(), 8), (AnyonModel.toric(), 4)])
    def test_torus_counts_anyons(self, model, count):
        assert gsd(model, 1).gsd == count

    @pytest.mark.parametrize("genus", range(1, 6))
    def test_toric(self, genus):
        assert gsd(AnyonModel.toric(), genus).gsd == 4**genus

    def test_genus_domain(self):
        with pytest.raises(LrmError):
            gsd(AnyonModel.toric(), 0)

    def test_chiral_fibonacci(self):
        assert gsd(AnyonModel.parse("dims:1,t"), 2).gsd == 5

    def test_inconsistent_dimensions(self):
        with pytest.raises(LrmError, match="not an integer"):
            gsd(AnyonModel.parse("dims:1,2"), 2)


class TestModels:
    def test_parse_dims(self):
        m = AnyonModel.parse("dims:1,1,2")
        assert m.dims == (GoldenInt(1), GoldenInt(1), GoldenInt(2))

    @pytest.mark.parametrize("spec", ["dims:2,1", "dims:1,t-1", "dims:", "abelian"])
    def test_rejects(self, spec):
        with pytest.raises(LrmError):
            AnyonModel.parse(spec)


class TestVerdict:
    @pytest.mark.parametrize(
        "value, dims, want",
        [(4, [2], False), (116, [6], True), (116, [2, 29], False), (25, [2], True), (25, [5, 5], False), (1, [2], False)],
    )
    def test_values(self, value, dims, want):
        assert strong_lrm_verdict(value, dims) is want

    @pytest.mark.parametrize("genus", range(1, 11))
    def test_toric_never_certified_on_qubits(self, genus):
        assert not gsd(AnyonModel.toric(), genus).verdict([2] * 8)

    @pytest.mark.parametrize("genus", range(2, 21))
    def test_fibonacci_certified_on_qubits(self, genus):
        assert gsd(AnyonModel.fibonacci(), genus).verdict([2, 2, 3])

    @pytest.mark.parametrize("dims", [[], [1], [0, 2]])
    def test_dims_domain(self, dims):
        with pytest.raises(LrmError):
            strong_lrm_verdict(6, dims)

    @given(st.integers(1, 10**12), st.lists(st.integers(2, 60), min_size=1, max_size=4))
    def test_agrees_with_factorization(self, value, dims):
        primes = set(sympy.factorint(value))
        want = any(all(q % p for q in dims) for p in primes)
        assert strong_lrm_verdict(value, dims) is want

    def test_strip_common(self):
        assert strip_common(2**5 * 3 * 29, 6) == 29


class TestFactorize:
    @given(st.integers(1, 10**15))
    def test_against_sympy(self, n):
        want = sorted(p for p, e in sympy.factorint(n).items() for _ in range(e))
        assert factorize(n) == want

    @pytest.mark.parametrize("n", [(10**9 + 7) * (10**9 + 9), (2**61 - 1) * 3, 2**89 - 1])
    def test_large(self, n):
        got = factorize(n)
        assert math.prod(got) == n and all(sympy.isprime(p) for p in got)

    @pytest.mark.parametrize("n", [2, 3, 561, 2**61 - 1, 10**18 + 9])
    def test_primality(self, n):
        assert is_probable_prime(n) == sympy.isprime(n)

    def test_budget(self):
        n = (10**15 + 37) * (10**15 + 91)
        with pytest.raises(CapExceeded):
            factorize(n, budget=10)

    def test_report_survives_budget(self, monkeypatch):
        import lrmlab.phase as phase

        def give_up(n):
            raise CapExceeded("rho iterations", 11, 10)

        monkeypatch.setattr(phase, "factorize", give_up)
        doc = GsdReport("big", 1, (10**15 + 37) * (10**15 + 91)).to_dict([2])
        assert doc["prime_factors"] is None and "exceeds" in doc["factorization_error"]
        assert doc["verdict"] is True
