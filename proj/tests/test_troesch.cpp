#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "oracles.hpp"
#include "supertroesch/troesch.hpp"

using namespace supertroesch;

namespace {

// Degree-wise concatenation of the pieces of a complex into one matrix.
Matrix total_differential(const PComplex& c) {
    std::map<int, int> offset;
    int n = 0;
    for (const auto& [i, t] : c.terms) {
        offset[i] = n;
        n += t.dim();
    }
    Matrix d(n, n, c.p);
    for (const auto& [i, m] : c.diffs)
        for (int j = 0; j < m.cols(); ++j)
            for (const auto& e : m.column(j)) d.set(offset[i + c.alpha] + e.row, offset[i] + j, e.value);
    return d;
}

std::vector<Exps> total_basis(const TroeschComplex& tc) {
    std::vector<Exps> out;
    for (const auto& [deg, mons] : tc.basis) out.insert(out.end(), mons.begin(), mons.end());
    return out;
}

std::map<std::pair<int, int>, ParityDims> nonzero(const CohomologyTable& t) {
    std::map<std::pair<int, int>, ParityDims> out;
    for (const auto& [k, v] : t.dims)
        if (v.first || v.second) out[k] = v;
    return out;
}

}  // namespace

TEST(BuildB, SmallExamples) {
    const PComplex c = build_B(3, 1, 1, k_space(1, 0));
    ASSERT_EQ(c.terms.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(c.dim(i), 1);
    EXPECT_EQ(rank(c.diff(0)), 1);
    EXPECT_EQ(rank(c.diff(1)), 1);

    const PComplex odd = build_B(3, 3, 1, k_space(0, 1));
    ASSERT_EQ(odd.terms.size(), 1u);
    EXPECT_EQ(odd.dim(3), 1);
    EXPECT_EQ(odd.term(3).parity(0), 1);

    EXPECT_TRUE(build_B(3, 2, 1, k_space(0, 0)).terms.empty());
    EXPECT_TRUE(build_B(3, 4, 1, k_space(0, 1)).terms.empty());
    EXPECT_THROW(build_B(7, 1, 1, k_space(1, 0)), Error);
    EXPECT_THROW(build_B(3, 1, 3, k_space(1, 0)), Error);
}

TEST(BuildB, SupportAndPieceDimensions) {
    for (int r = 1; r <= 2; ++r)
        for (int n = 0; n <= 3; ++n) {
            const SuperSpace u = k_space(1, 1);
            TroeschComplex tc = build_troesch(3, n, r, u);
            const int q = static_cast<int>(int_pow(3, r));
            const auto dims = sym_piece_dims(n, tc.w);
            for (const auto& [i, t] : tc.complex.terms) {
                EXPECT_GE(i, 0);
                EXPECT_LE(i, n * (q - 1));
                EXPECT_EQ(t.dim(), dims.at(i));
            }
            EXPECT_EQ(dims.size(), tc.complex.terms.size());
        }
}

TEST(BuildB, DirectRouteMatchesFormalDifferential) {
    struct Case {
        int p, n, r;
        SuperSpace u;
    };
    std::vector<Case> cases;
    for (int n = 0; n <= 4; ++n)
        for (auto u : {k_space(1, 0), k_space(0, 1), k_space(1, 1)}) cases.push_back({3, n, 1, u});
    for (int n = 1; n <= 3; ++n) cases.push_back({5, n, 1, k_space(1, 1)});
    for (int n = 1; n <= 3; ++n)
        for (auto u : {k_space(1, 0), k_space(0, 1)}) cases.push_back({3, n, 2, u});
    cases.push_back({3, 2, 1, k_space(2, 1)});
    for (const auto& c : cases) {
        const PComplex a = build_troesch(c.p, c.n, c.r, c.u, BuildRoute::Direct).complex;
        const PComplex b = build_troesch(c.p, c.n, c.r, c.u, BuildRoute::Formal).complex;
        ASSERT_EQ(a.terms.size(), b.terms.size());
        for (const auto& [i, t] : a.terms) EXPECT_EQ(a.diff(i), b.diff(i)) << "p=" << c.p << " n=" << c.n << " r=" << c.r << " degree " << i;
    }
}

TEST(BuildB, DifferentialIsNilpotentOfOrderP) {
    for (int p : {3, 5})
        for (int r = 1; r <= 2; ++r)
            for (int n = 1; n <= (r == 1 ? 6 : 4); ++n)
                for (auto u : {k_space(1, 0), k_space(0, 1), k_space(1, 1)}) {
                    if (p == 5 && r == 2 && n > 2) continue;
                    EXPECT_NO_THROW(validate(build_B(p, n, r, u))) << p << " " << r << " " << n;
                }
}

TEST(BuildB, BudgetErrorNamesDimension) {
    ::setenv("SUPERTROESCH_BUDGET", "5", 1);
    try {
        build_B(3, 3, 1, k_space(1, 1));
        FAIL() << "expected a budget error";
    } catch (const BudgetError& e) {
        EXPECT_GT(e.dimension(), 5);
        EXPECT_EQ(e.budget(), 5);
        EXPECT_EQ(e.kind(), ErrorKind::Budget);
    }
    ::setenv("SUPERTROESCH_BUDGET", "nope", 1);
    EXPECT_THROW(size_budget(), Error);
    ::unsetenv("SUPERTROESCH_BUDGET");
    EXPECT_EQ(size_budget(), kDefaultSizeBudget);
}

TEST(TheoremB, SpecExamples) {
    TheoremReport a = verify_theorem_B(3, 1, 1, k_space(1, 1));
    EXPECT_TRUE(a.ok()) << a.first_failure;
    for (int s = 1; s <= 2; ++s) {
        EXPECT_EQ(a.table.row(s), (std::map<int, ParityDims>{{0, {1, 0}}, {3, {0, 1}}}));
    }

    TheoremReport b = verify_theorem_B(3, 2, 1, k_space(0, 1));
    EXPECT_TRUE(b.ok()) << b.first_failure;
    EXPECT_TRUE(b.table.all_zero());

    TheoremReport c = verify_theorem_B(3, 1, 2, k_space(1, 0));
    EXPECT_TRUE(c.ok()) << c.first_failure;
    EXPECT_EQ(c.table.row(1), (std::map<int, ParityDims>{{0, {1, 0}}}));
}

TEST(TheoremB, SmallParameterSweep) {
    for (int n = 1; n <= 3; ++n)
        for (auto u : {k_space(1, 0), k_space(0, 1), k_space(1, 1), k_space(2, 1), k_space(1, 2)}) {
            TheoremReport rep = verify_theorem_B(3, n, 1, u);
            EXPECT_TRUE(rep.ok()) << "n=" << n << ": " << rep.first_failure;
        }
    for (int n = 1; n <= 2; ++n) {
        TheoremReport rep = verify_theorem_B(5, n, 1, k_space(1, 1));
        EXPECT_TRUE(rep.ok()) << rep.first_failure;
    }
    TheoremReport odd = verify_theorem_B(3, 1, 2, k_space(0, 1));
    EXPECT_TRUE(odd.ok()) << odd.first_failure;
    EXPECT_EQ(odd.table.row(1), (std::map<int, ParityDims>{{36, {0, 1}}}));
}

TEST(TheoremB, VanishingOffMultiples) {
    for (int p : {3, 5})
        for (int big_n = 1; big_n <= 5; ++big_n) {
            if (big_n % p == 0) continue;
            for (auto u : {k_space(1, 0), k_space(0, 1), k_space(1, 1)}) {
                TheoremReport rep = verify_theorem_B_degree(p, big_n, 1, u);
                EXPECT_TRUE(rep.ok()) << rep.first_failure;
                EXPECT_TRUE(rep.table.all_zero());
            }
        }
    for (int big_n = 1; big_n <= 4; ++big_n) {
        TheoremReport rep = verify_theorem_B_degree(3, big_n, 2, k_space(1, 0));
        EXPECT_TRUE(rep.ok()) << rep.first_failure;
    }
}

TEST(Eta, GeneratorPlacementAndCocycles) {
    for (int r = 1; r <= 2; ++r) {
        const int q = static_cast<int>(int_pow(3, r));
        auto imgs = eta_images(3, 1, r, k_space(1, 1));
        ASSERT_EQ(imgs.size(), 2u);
        EXPECT_EQ(imgs[0].zdeg, 0);
        EXPECT_EQ(imgs[0].parity, 0);
        EXPECT_EQ(imgs[0].image[0], q);
        EXPECT_EQ(imgs[1].zdeg, q * (q - 1) / 2);
        EXPECT_EQ(imgs[1].parity, 1);
        // k^{1|1} at r = 2 exceeds the default budget; each generator is checked on its own line.
        for (const auto& u : {k_space(1, 0), k_space(0, 1)}) {
            TroeschComplex tc = build_troesch(3, q, r, u);
            for (const auto& e : eta_images(3, 1, r, u)) {
                const int pos = tc.index.at(e.image).second;
                EXPECT_TRUE(tc.complex.diff(e.zdeg).column(pos).empty()) << e.label;
            }
        }
    }
    // Products of two odd generators anticommute through the sorting sign.
    auto two = eta_images(3, 2, 1, k_space(0, 2));
    ASSERT_EQ(two.size(), 1u);
    EXPECT_EQ(two[0].zdeg, 6);
    EXPECT_EQ(two[0].parity, 0);
}

TEST(TheoremDims, EvaluatedFunctor) {
    EXPECT_EQ(theorem_dims(3, 2, 1, k_space(1, 1)), (std::map<int, ParityDims>{{0, {1, 0}}, {3, {0, 1}}}));
    EXPECT_EQ(theorem_dims(3, 2, 1, k_space(2, 2)), (std::map<int, ParityDims>{{0, {3, 0}}, {3, {0, 4}}, {6, {1, 0}}}));
    EXPECT_TRUE(theorem_dims(3, 2, 1, k_space(0, 1)).empty());
    EXPECT_EQ(theorem_dims(3, 1, 2, k_space(0, 1)), (std::map<int, ParityDims>{{36, {0, 1}}}));
}

TEST(CorollaryT, SpecExamples) {
    CorollaryReport a = verify_corollary_T(3, 1, 1, k_space(1, 1));
    EXPECT_TRUE(a.ok()) << a.first_failure;
    std::map<int, ParityDims> nz;
    for (const auto& [l, v] : a.cohomology)
        if (v.first || v.second) nz[l] = v;
    EXPECT_EQ(nz, (std::map<int, ParityDims>{{0, {1, 0}}, {2, {0, 1}}}));

    CorollaryReport b = verify_corollary_T(3, 2, 1, k_space(1, 1));
    EXPECT_TRUE(b.ok()) << b.first_failure;
    nz.clear();
    for (const auto& [l, v] : b.cohomology)
        if (v.first || v.second) nz[l] = v;
    EXPECT_EQ(nz, (std::map<int, ParityDims>{{0, {1, 0}}, {2, {0, 1}}}));

    CorollaryReport c = verify_corollary_T(3, 2, 1, k_space(1, 0));
    EXPECT_TRUE(c.ok()) << c.first_failure;
    for (const auto& [l, v] : c.cohomology)
        if (l) {
            EXPECT_EQ(v, (ParityDims{0, 0}));
        }
}

TEST(CorollaryT, TermBound) {
    for (int n = 1; n <= 2; ++n) {
        const ChainComplex t = build_T(3, n, 1, k_space(1, 1));
        EXPECT_LE(t.max_degree(), 2 * n * 2);
        validate(t);
    }
}

TEST(Bigrade, DigitSplitAndCommutingComponents) {
    TroeschComplex sh = build_troesch(3, 1, 2, k_space(1, 0));
    Bigrading one = bigrade(sh);
    for (const auto& [deg, bd] : one.bidegree) {
        ASSERT_EQ(bd.size(), 1u);
        EXPECT_EQ(bd[0].second, deg % 3);
        EXPECT_EQ(bd[0].first, deg - deg % 3);
    }
    for (int n = 1; n <= 4; ++n)
        for (auto u : {k_space(1, 0), k_space(0, 1), k_space(1, 1)}) {
            if (n > 3 && u.dim() > 1) continue;
            Bigrading b = bigrade(build_troesch(3, n, 2, u));
            EXPECT_TRUE(b.components_homogeneous);
            EXPECT_TRUE(b.commute);
            EXPECT_TRUE(b.nilpotent);
            for (const auto& [deg, m] : b.counts)
                for (const auto& [bd, cnt] : m) EXPECT_EQ(bd.first + bd.second, deg);
        }
    EXPECT_THROW(bigrade(build_troesch(3, 1, 1, k_space(1, 0))), Error);
}

TEST(Exponential, SumSpaceMatchesTensorOfSummands) {
    for (int p : {3, 5})
        for (int n = 1; n <= (p == 3 ? 6 : 5); ++n) {
            const CohomologyTable whole = cohomology_table(build_B(p, n, 1, k_space(1, 1)));
            std::map<std::pair<int, int>, ParityDims> sum;
            for (int a = 0; a <= n; ++a) {
                const PComplex t = tensor_pcomplex(build_B(p, a, 1, k_space(1, 0)), build_B(p, n - a, 1, k_space(0, 1)));
                for (const auto& [k, v] : nonzero(cohomology_table(t))) sum[k] = sum[k] + v;
            }
            EXPECT_EQ(nonzero(whole), sum) << "p=" << p << " n=" << n;
        }
}

TEST(Naturality, DifferentialCommutesWithRandomMorphisms) {
    std::mt19937 rng(71);
    int cases = 0;
    const std::vector<SuperSpace> spaces{k_space(1, 0), k_space(0, 1), k_space(1, 1), k_space(2, 0)};
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const int r = trial % 4 == 0 ? 2 : 1;
        const SuperSpace u = spaces[rng() % spaces.size()], v = spaces[rng() % spaces.size()];
        TroeschComplex bu = build_troesch(3, n, r, u), bv = build_troesch(3, n, r, v);
        auto ctx = make_context(u, v, 3);
        const auto mons = power_basis(PowerKind::Div, n, ctx->units);
        if (mons.empty()) continue;
        GammaElement phi(ctx, n);
        for (int k = 0; k < 3; ++k) phi.add_monomial(mons[rng() % mons.size()], 1 + static_cast<int>(rng() % 2));
        const GammaElement lifted = tensor_identity_left(build_Sh(3, r), phi);
        const Matrix bphi = apply_sym_matrix(lifted, total_basis(bu), total_basis(bv)).to_dense();
        EXPECT_EQ(matmul(total_differential(bv.complex), bphi), matmul(bphi, total_differential(bu.complex)));
        ++cases;
    }
    EXPECT_GE(cases, 150);
}

TEST(OddLine, ComparisonPropertiesHold) {
    for (int p : {3, 5})
        for (int n = 1; n < p; ++n) {
            const OddLineModel m = build_odd_line_model(p, n);
            TroeschComplex b = build_troesch(p, n, 1, k_space(0, 1));
            for (const auto& [l, phi] : m.phi) {
                if (!m.phi.count(l + 1)) continue;
                const Matrix& psi = m.psi.at(l);
                const Matrix& dd = m.d_d.at(l);
                const Matrix& dc = m.d_c.at(l);
                const Matrix& s = m.s.at(l);
                const Matrix& phi1 = m.phi.at(l + 1);
                const Matrix& psi1 = m.psi.at(l + 1);
                // (1) phi is a chain map.
                EXPECT_EQ(matmul(dc, phi), matmul(phi1, dd));
                // (2) phi psi = id.
                EXPECT_EQ(matmul(phi, psi), Matrix::identity(phi.rows(), p));
                // (3) psi phi d_D psi = psi d_C.
                EXPECT_EQ(matmul(psi1, matmul(phi1, matmul(dd, psi))), matmul(psi1, dc));
                // (4) d_C = phi d_D psi.
                EXPECT_EQ(dc, matmul(phi1, matmul(dd, psi)));
                std::vector<int> perm(static_cast<size_t>(n));
                std::iota(perm.begin(), perm.end(), 0);
                do {
                    const Matrix sg = odd_line_sigma(m, l, perm);
                    // (5) phi is invariant; (6) d_D is equivariant.
                    EXPECT_EQ(matmul(phi, sg), phi);
                    EXPECT_EQ(matmul(dd, sg), matmul(odd_line_sigma(m, l + 1, perm), dd));
                } while (std::next_permutation(perm.begin(), perm.end()));
                EXPECT_EQ(matmul(phi, s), phi);
                // (7) ker phi = ker s.
                const Matrix both = oracle::vstack(phi, s);
                EXPECT_EQ(rank(phi), rank(s));
                EXPECT_EQ(rank(both), rank(phi));
                // (8) ker(phi d_D) lies in ker(d_D s).
                const Matrix a = matmul(phi1, dd), c = matmul(m.d_d.at(l), s);
                EXPECT_EQ(rank(oracle::vstack(a, c)), rank(a));
                // C matches B_n(1)(k^{0|1}) once increasing tuples are sent to exterior monomials.
                ASSERT_EQ(b.complex.dim(l), dc.cols());
                ASSERT_EQ(b.complex.dim(l + 1), dc.rows());
                auto placement = [&](int deg) {
                    const auto& cb = m.c_basis.at(deg);
                    Matrix pm(b.complex.dim(deg), static_cast<int>(cb.size()), p);
                    for (size_t j = 0; j < cb.size(); ++j) {
                        Exps e(static_cast<size_t>(p), 0);
                        for (int i : cb[j]) e[i] = 1;
                        pm.set(b.index.at(e).second, static_cast<int>(j), 1);
                    }
                    return pm;
                };
                if (dc.cols() && dc.rows()) {
                    EXPECT_EQ(matmul(b.complex.diff(l).to_dense(), placement(l)), matmul(placement(l + 1), dc));
                }
            }
            const CohomologyTable h = cohomology_table(b.complex);
            for (const auto& [i, v] : h.row(1)) ADD_FAILURE() << "H_[1] nonzero in degree " << i;
        }
}
