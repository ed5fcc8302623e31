#include "kzp/leading.hpp"

#include <doctest.h>

#include <random>

using namespace kzp;

TEST_CASE("leading term of a vector polynomial")
{
    const u64 p = 5;
    VectorPoly v;
    v.p = p;
    v.n = 4;
    v.r = 2;
    v.set(SubsetIndex{1, 3}, MPoly::z_var(p, 0, 4, 0));
    LeadingData ld = leading_term(v);
    CHECK((ld.exponents == std::vector<Exp>{1, 0, 0, 0}));
    CHECK((ld.leading_index == SubsetIndex{1, 3}));
    CHECK((ld.coefficient.at(SubsetIndex{1, 3}) == 1));

    VectorPoly zero;
    zero.p = p;
    zero.n = 4;
    zero.r = 2;
    CHECK_THROWS_AS(leading_term(zero), std::invalid_argument);
}

TEST_CASE("leading data of the base example")
{
    PrimePair pr = classify_pair(5, 2);
    ModelParams prm = params_from_g(pr, 1, 1);
    VectorPoly v = construct_solution(pr, prm, SolutionIndex{1});
    LeadingData ld = leading_term(v);
    CHECK((ld.exponents == std::vector<Exp>{1, 0, 0}));
    CHECK((ld.leading_index == SubsetIndex{1}));
    CHECK((ld.coefficient.at(SubsetIndex{1}) == 4));
    CHECK((ld.coefficient.at(SubsetIndex{2}) == 3));
    CHECK((ld.coefficient.at(SubsetIndex{3}) == 3));
}

TEST_CASE("leading data of the n=5 r=2 example")
{
    PrimePair pr = classify_pair(5, 2);
    ModelParams prm = params_from_g(pr, 1, 2);
    VectorPoly v = construct_solution(pr, prm, SolutionIndex{2, 1});
    LeadingData ld = leading_term(v);
    CHECK((ld.exponents == std::vector<Exp>{3, 2, 1, 0, 0}));
    CHECK((ld.leading_index == SubsetIndex{1, 3}));

    SolutionStore s(pr, prm, SolutionIndex{2, 1});
    LeadingData ld2 = leading_term(s);
    CHECK(ld2.exponents == ld.exponents);
    CHECK(ld2.leading_index == ld.leading_index);
    CHECK(ld2.coefficient == ld.coefficient);
}

TEST_CASE("predicted index")
{
    PrimePair pr = classify_pair(5, 2);
    CHECK((predict_index(pr, params_from_g(pr, 1, 2), SolutionIndex{2, 1}) == SubsetIndex{1, 3}));
    CHECK((predict_index(pr, params_from_g(pr, 1, 1), SolutionIndex{1}) == SubsetIndex{1}));

    CHECK_THROWS_AS(predict_index(pr, params_from_g(pr, 1, 2), SolutionIndex{1, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(predict_index(pr, params_from_g(pr, 1, 2), SolutionIndex{3, 1}),
                    std::invalid_argument);

    // distinct tuples get distinct index sets, and the spacing lemma holds
    struct Case { u64 p, q; int g, r; };
    for (Case c : {Case{7, 2, 2, 2}, Case{11, 2, 2, 2}, Case{13, 3, 2, 2}, Case{7, 2, 3, 1}}) {
        PrimePair pp = classify_pair(c.p, c.q);
        ModelParams prm = params_from_g(pp, c.g, c.r);
        std::map<SubsetIndex, SolutionIndex> seen;
        for (auto& L : admissible_tuples(pp, prm)) {
            SubsetIndex m = predict_index(pp, prm, L);
            for (int i = 0; i + 1 < c.r; ++i) CHECK(m.elems[i] + 2 <= m.elems[i + 1]);
            CHECK(m.elems.front() >= 1);
            CHECK(m.elems.back() < prm.n);
            auto [it, fresh] = seen.emplace(m, L);
            CHECK(fresh);
        }
    }
}

TEST_CASE("predicted leading data")
{
    PrimePair pr = classify_pair(5, 2);

    LeadingData a = predict_leading(pr, params_from_g(pr, 1, 1), SolutionIndex{1});
    CHECK((a.exponents == std::vector<Exp>{1, 0, 0}));
    CHECK(a.coefficient.at(SubsetIndex{1}) == 4);   // (-1)^1 C(1,1) = -1

    LeadingData b = predict_leading(pr, params_from_g(pr, 1, 2), SolutionIndex{2, 1});
    CHECK((b.exponents == std::vector<Exp>{3, 2, 1, 0, 0}));
    CHECK((b.leading_index == SubsetIndex{1, 3}));
    CHECK((b.coefficient.at(SubsetIndex{1, 3}) == 1));

    // the predicted entry is never zero
    struct Case { u64 p, q; int g, r; };
    for (Case c : {Case{7, 2, 2, 2}, Case{11, 2, 2, 2}, Case{13, 3, 1, 2}, Case{7, 3, 2, 1}}) {
        PrimePair pp = classify_pair(c.p, c.q);
        ModelParams prm = params_from_g(pp, c.g, c.r);
        for (auto& L : admissible_tuples(pp, prm))
            CHECK(predict_leading(pp, prm, L).coefficient.begin()->second != 0);
    }
}

TEST_CASE("computed leading terms match predictions")
{
    struct Case { u64 p, q; int g, r; };
    for (Case c : {Case{5, 2, 1, 1}, Case{5, 2, 2, 1}, Case{5, 2, 1, 2},
                   Case{7, 3, 1, 2}, Case{7, 2, 2, 2}}) {
        PrimePair pp = classify_pair(c.p, c.q);
        ModelParams prm = params_from_g(pp, c.g, c.r);
        for (auto& L : admissible_tuples(pp, prm)) {
            SolutionStore s(pp, prm, L);
            TupleLeadingReport rep = leading_report(s);
            INFO(c.p << " " << c.q << " " << c.g << " " << c.r << " " << L.to_string() << " " << rep.detail);
            CHECK(rep.nonzero);
            CHECK(rep.matches);
        }
    }
}

TEST_CASE("leading term of a scalar multiple")
{
    std::mt19937 rng(8);
    PrimePair pr = classify_pair(5, 2);
    ModelParams prm = params_from_g(pr, 1, 2);
    VectorPoly v = construct_solution(pr, prm, SolutionIndex{2, 1});
    LeadingData lv = leading_term(v);

    for (int it = 0; it < 8; ++it) {
        std::vector<Exp> e(5);
        std::uniform_int_distribution<int> de(0, 3);
        for (auto& x : e) x = (Exp)de(rng);
        std::uniform_int_distribution<u64> dc(1, 4);
        ZPoly f = add(MPoly::monomial(5, 0, 5, e, dc(rng)),
                      MPoly::constant(5, 0, 5, dc(rng)));
        VectorPoly fv;
        fv.p = v.p;
        fv.n = v.n;
        fv.r = v.r;
        for (auto& [J, g] : v.components) fv.set(J, mul(f, g));
        LeadingData lf = leading_term(fv);

        auto [fe, fc] = f.lex_leading();
        std::vector<Exp> want(5);
        for (int s = 0; s < 5; ++s) want[s] = (Exp)(lv.exponents[s] + fe[s]);
        CHECK(lf.exponents == want);
        CHECK(lf.leading_index == lv.leading_index);   // index survives multiplication
        for (auto& [J, cv] : lv.coefficient)
            CHECK(lf.coefficient.at(J) == cv * fc % 5);
    }
}

TEST_CASE("eigenvector property of leading coefficients")
{
    PrimePair pr = classify_pair(5, 2);
    ModelParams prm = params_from_g(pr, 1, 1);
    VectorPoly v = construct_solution(pr, prm, SolutionIndex{1});
    LeadingData ld = leading_term(v);
    CHECK(check_eigen(ld, pr, prm));

    // hand check: sum of Casimir rows on C = 4V1+3V2+3V3 equals 2*d_1*C with d=(1,0,0)
    // (q = 2, d_1 = 1)

    // d_n not divisible by p fails fast
    LeadingData bad = ld;
    bad.exponents.back() = 1;
    CHECK_FALSE(check_eigen(bad, pr, prm));

    ModelParams prm2 = params_from_g(pr, 1, 2);
    SolutionStore s(pr, prm2, SolutionIndex{2, 1});
    CHECK(check_eigen(leading_term(s), pr, prm2));
}

TEST_CASE("rank certificates")
{
    PrimePair pr52 = classify_pair(5, 2);

    RankCertificate a = certify_rank(pr52, params_from_g(pr52, 1, 2));
    CHECK(a.ok);
    CHECK(a.rank == 1);
    CHECK(a.basis.size() == 1);
    CHECK((a.basis[0].L == SolutionIndex{2, 1}));

    RankCertificate b = certify_rank(pr52, params_from_g(pr52, 1, 1));
    CHECK(b.ok);
    CHECK(b.rank == 1);
    CHECK((b.basis[0].L == SolutionIndex{1}));

    PrimePair pr72 = classify_pair(7, 2);
    RankCertificate c = certify_rank(pr72, params_from_g(pr72, 3, 1));
    CHECK(c.ok);
    CHECK(c.rank == 3);
    REQUIRE(c.basis.size() == 3);
    CHECK((c.basis[0].L == SolutionIndex{1}));
    CHECK((c.basis[1].L == SolutionIndex{2}));
    CHECK((c.basis[2].L == SolutionIndex{3}));

    // M - g >= 0 is required
    PrimePair pr32 = classify_pair(3, 2);
    CHECK_THROWS_AS(certify_rank(pr32, params_from_g(pr32, 2, 1)), std::invalid_argument);
    // type-2 pairs are not certified
    PrimePair pr53 = classify_pair(5, 3);
    CHECK_THROWS_AS(certify_rank(pr53, params_from_g(pr53, 1, 1)), std::invalid_argument);
}
