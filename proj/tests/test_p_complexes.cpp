#include <gtest/gtest.h>

#include <random>

#include "property_suites.hpp"
#include "supertroesch/p_complexes.hpp"

using namespace supertroesch;

using props::plant;
using props::Planted;
using props::planted_cohomology;

TEST(PComplex, ValidateRejectsBadDifferentials) {
    PComplex c;
    c.p = 3;
    c.terms[0] = k_space(1, 0);
    c.terms[1] = k_space(0, 1);
    c.diffs[0] = SparseMatrix::from_triplets(1, 1, 3, {{0, 0, 1}});
    EXPECT_THROW(validate(c), Error);
    c.terms[1] = k_space(1, 0);
    EXPECT_NO_THROW(validate(c));
    // d^3 != 0 on a chain of four terms.
    for (int i = 1; i < 4; ++i) {
        c.terms[i] = SuperSpace{{{"x" + std::to_string(i), i, 0}}, false};
        c.diffs[i - 1] = SparseMatrix::from_triplets(1, 1, 3, {{0, 0, 1}});
    }
    EXPECT_THROW(validate(c), Error);
}

TEST(PComplex, CyclicDecompositionMatchesPlantedBlocks) {
    const props::PropertyResult res = props::cyclic_decomposition();
    EXPECT_TRUE(res.ok()) << res.summary();
}

TEST(PComplex, CohomologyMatchesPlantedBlocks) {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 250; ++trial) {
        const int p = trial % 3 == 0 ? 5 : 3;
        Planted pl = plant(rng, p, 1 + static_cast<int>(trial % 2), 12);
        const CohomologyTable got = cohomology_table(pl.complex), want = planted_cohomology(pl);
        EXPECT_EQ(got.dims, want.dims);
        for (int s = 1; s < p; ++s) {
            auto row = cohomology(pl.complex, s);
            for (const auto& [i, v] : row) EXPECT_EQ(v, want.at(s, i));
        }
    }
}

TEST(PComplex, NormalComplexesHaveEqualSlices) {
    std::mt19937 rng(43);
    int seen = 0;
    for (int trial = 0; trial < 4000 && seen < 200; ++trial) {
        Planted pl = plant(rng, 3, 1, 10);
        if (!is_normal(pl.complex)) continue;
        const CohomologyTable t = cohomology_table(pl.complex);
        for (const auto& [i, term] : pl.complex.terms) EXPECT_EQ(t.at(1, i), t.at(2, i));
        ++seen;
    }
    EXPECT_GE(seen, 200);
}

TEST(Contract, CohomologyMatchesSlicePrediction) {
    const props::PropertyResult res = props::contraction();
    EXPECT_TRUE(res.ok()) << res.summary();
    EXPECT_THROW(contract(PComplex{}, 0, 0), Error);
    EXPECT_THROW(contract(PComplex{}, 1, 2), Error);
}

TEST(Kunneth, NormalTensorProducts) {
    std::mt19937 rng(45);
    int cases = 0;
    for (int trial = 0; trial < 6000 && cases < 200; ++trial) {
        Planted a = plant(rng, 3, 1, 6), b = plant(rng, 3, 1, 6);
        if (!is_normal(a.complex) || !is_normal(b.complex)) continue;
        PComplex ab = tensor_pcomplex(a.complex, b.complex);
        validate(ab);
        EXPECT_TRUE(is_normal(ab));
        KunnethReport rep = kunneth_check(a.complex, b.complex);
        EXPECT_TRUE(rep.ok()) << rep.first_failure;
        ++cases;
    }
    EXPECT_GE(cases, 200);
}

TEST(Kunneth, RejectsNonNormalInput) {
    PComplex c;
    c.p = 3;
    c.terms[0] = SuperSpace{{{"a", 0, 0}}, false};
    c.terms[1] = SuperSpace{{{"b", 1, 0}}, false};
    c.diffs[0] = SparseMatrix::from_triplets(1, 1, 3, {{0, 0, 1}});
    EXPECT_FALSE(is_normal(c));
    EXPECT_THROW(kunneth_check(c, c), Error);
}
