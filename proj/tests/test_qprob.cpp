#include "qdensity/qprob.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qdensity;
using linalg::max_abs_diff;

namespace {

JointDistribution fruit() {
    const double t = 1.0 / 3.0;
    return JointDistribution(Alphabet({"orange", "green", "purple"}), Alphabet({"fruit", "vegetable"}),
                             {t, 0, t, 0, 0, t});
}

JointDistribution random_distribution(std::size_t nx, std::size_t ny, std::mt19937_64& rng) {
    return JointDistribution(oracle::labels("x", nx), oracle::labels("y", ny), oracle::random_table(nx, ny, rng));
}

}  // namespace

TEST(Alphabet, RejectsEmptyAndDuplicates) {
    EXPECT_THROW(Alphabet(std::vector<std::string>{}), std::invalid_argument);
    EXPECT_THROW(Alphabet({"a", "a"}), std::invalid_argument);
    const Alphabet a({"p", "q"});
    EXPECT_EQ(a.index_of("q"), 1u);
    EXPECT_FALSE(a.index_of("r").has_value());
}

TEST(JointDistribution, Validation) {
    EXPECT_THROW(JointDistribution(Alphabet({"a"}), Alphabet({"u"}), {0.5}), std::invalid_argument);
    EXPECT_THROW(JointDistribution(Alphabet({"a", "b"}), Alphabet({"u"}), {1.5, -0.5}), std::invalid_argument);
    EXPECT_THROW(JointDistribution(Alphabet({"a"}), Alphabet({"u"}), {0.5, 0.5}), linalg::DimensionError);
}

TEST(BuildState, FruitAmplitudes) {
    const PureState psi = build_state(fruit());
    const double r = 1.0 / std::sqrt(3.0);
    const std::vector<double> want{r, r, 0, 0, 0, r};
    ASSERT_EQ(psi.amplitudes().size(), want.size());
    for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(psi.amplitudes()[k], want[k], 1e-15);
}

TEST(BuildState, PointMassAndUniform) {
    const PureState p = build_state(JointDistribution(Alphabet({"a", "b"}), Alphabet({"u", "v"}), {0, 0, 0, 1}));
    EXPECT_EQ(std::vector<double>(p.amplitudes().begin(), p.amplitudes().end()), (std::vector<double>{0, 0, 0, 1}));
    const PureState u = build_state(JointDistribution(Alphabet({"a", "b"}), Alphabet({"u", "v"}), {.25, .25, .25, .25}));
    for (double a : u.amplitudes()) EXPECT_DOUBLE_EQ(a, 0.5);
}

TEST(DensityDiag, Examples) {
    const std::vector<double> p{0.6, 0.2, 0.2};
    const auto d = density_diag(Alphabet({"a", "b", "c"}), p);
    EXPECT_EQ(d.matrix(), Matrix::diagonal(p));
    EXPECT_EQ(born_distribution(d), p);
    const auto joint = density_diag(fruit());
    EXPECT_EQ(born_distribution(joint), (std::vector<double>{1.0 / 3, 1.0 / 3, 0, 0, 0, 1.0 / 3}));
    const std::vector<double> u{0.25, 0.25, 0.25, 0.25};
    EXPECT_EQ(density_diag(oracle::labels("s", 4), u).matrix(), 0.25 * Matrix::identity(4));
}

TEST(DensityProjection, FruitProjectorSupport) {
    const auto rho = density_projection(build_state(fruit()));
    const std::vector<std::size_t> support{0, 1, 5};
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            const bool in = std::count(support.begin(), support.end(), i) && std::count(support.begin(), support.end(), j);
            EXPECT_NEAR(rho.matrix()(i, j), in ? 1.0 / 3.0 : 0.0, 1e-15);
        }
    }
    EXPECT_NEAR(rho.matrix().trace(), 1.0, 1e-15);
}

TEST(DensityProjection, ThreePointDistribution) {
    // π = (3/5, 1/5, 1/5) as a 3×1 table.
    const auto rho = density_projection(
        build_state(JointDistribution(Alphabet({"a", "b", "c"}), Alphabet({"*"}), {0.6, 0.2, 0.2})));
    const double s = std::sqrt(3.0) / 5.0;
    const Matrix want{{0.6, s, s}, {s, 0.2, 0.2}, {s, 0.2, 0.2}};
    EXPECT_LT(max_abs_diff(rho.matrix(), want), 1e-15);
}

TEST(PartialTrace, Fruit) {
    const auto rho = density_projection(build_state(fruit()));
    const auto rx = partial_trace(rho, Side::X);
    const auto ry = partial_trace(rho, Side::Y);
    EXPECT_LT(max_abs_diff(rx.matrix(), (1.0 / 3.0) * Matrix{{1, 1, 0}, {1, 1, 0}, {0, 0, 1}}), 1e-15);
    EXPECT_LT(max_abs_diff(ry.matrix(), (1.0 / 3.0) * Matrix{{2, 0}, {0, 1}}), 1e-15);
    EXPECT_EQ(rx.basis().symbols(), fruit().x_alphabet().symbols());
}

TEST(PartialTrace, ProductOfDensities) {
    const Matrix sigma{{0.7, 0.2}, {0.2, 0.3}};
    const Matrix tau{{0.5, 0.1, 0.0}, {0.1, 0.25, 0.05}, {0.0, 0.05, 0.25}};
    // (σ⊗τ) in suffix-major order: entry ((α,i),(β,j)) = σ_ij τ_αβ.
    Matrix prod(6, 6);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b)
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j) prod(a * 2 + i, b * 2 + j) = sigma(i, j) * tau(a, b);
    const DensityMatrix rho(oracle::labels("x", 2), oracle::labels("y", 3), prod);
    EXPECT_LT(max_abs_diff(partial_trace(rho, Side::X).matrix(), sigma), 1e-15);
    EXPECT_LT(max_abs_diff(partial_trace(rho, Side::Y).matrix(), tau), 1e-15);
}

TEST(PartialTrace, RequiresProductBasis) {
    const auto d = density_diag(Alphabet({"a", "b"}), std::vector<double>{0.5, 0.5});
    EXPECT_THROW(partial_trace(d, Side::X), std::invalid_argument);
}

TEST(ReducedViaGram, Fruit) {
    const PureState psi = build_state(fruit());
    EXPECT_LT(max_abs_diff(reduced_via_gram(psi, Side::X).matrix(), (1.0 / 3.0) * Matrix{{1, 1, 0}, {1, 1, 0}, {0, 0, 1}}),
              1e-15);
    EXPECT_LT(max_abs_diff(reduced_via_gram(psi, Side::Y).matrix(), Matrix{{2.0 / 3, 0}, {0, 1.0 / 3}}), 1e-15);
}

TEST(ReducedViaGram, ProductStateIsRankOne) {
    // π = π_X·π_Y.
    const std::vector<double> px{0.2, 0.5, 0.3}, py{0.6, 0.4};
    std::vector<double> t;
    for (double a : px)
        for (double b : py) t.push_back(a * b);
    const PureState psi = build_state(JointDistribution(oracle::labels("x", 3), oracle::labels("y", 2), t));
    for (Side s : {Side::X, Side::Y}) {
        const auto e = linalg::sym_eigen(reduced_via_gram(psi, s).matrix());
        EXPECT_NEAR(e.eigenvalues[0], 1.0, 1e-12);
        for (std::size_t k = 1; k < e.eigenvalues.size(); ++k) EXPECT_NEAR(e.eigenvalues[k], 0.0, 1e-12);
    }
    EXPECT_NEAR(entanglement_entropy(psi), 0.0, 1e-12);
}

TEST(Reduced, ThreeWayAgreementAndCoordinateFormula) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t nx = 1 + rng() % 6, ny = 1 + rng() % 6;
        const JointDistribution pi = random_distribution(nx, ny, rng);
        const PureState psi = build_state(pi);
        const auto rho = density_projection(psi);
        const std::vector<double> amps(psi.amplitudes().begin(), psi.amplitudes().end());
        for (Side s : {Side::X, Side::Y}) {
            const Matrix pt = partial_trace(rho, s).matrix();
            EXPECT_LT(max_abs_diff(pt, reduced_via_gram(psi, s).matrix()), 1e-12);
            EXPECT_LT(max_abs_diff(pt, kraus_reduced(psi, s).matrix()), 1e-12);
            EXPECT_NEAR(pt.trace(), 1.0, 1e-12);
            EXPECT_TRUE(linalg::is_psd(pt, 1e-12));
        }
        EXPECT_LT(max_abs_diff(reduced_via_gram(psi, Side::X).matrix(), oracle::reduced_x(amps, nx, ny)), 1e-12);
        // Off-diagonal entries: Σ_α √(π(i,α) π(j,α)).
        const Matrix rx = reduced_via_gram(psi, Side::X).matrix();
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t j = 0; j < nx; ++j) {
                double acc = 0.0;
                for (std::size_t a = 0; a < ny; ++a) acc += std::sqrt(pi.prob(i, a) * pi.prob(j, a));
                EXPECT_NEAR(rx(i, j), acc, 1e-12);
            }
        }
    }
}

TEST(Marginals, DiagonalOfReducedDensities) {
    const auto mx = marginalize(fruit(), Side::X);
    const auto my = marginalize(fruit(), Side::Y);
    for (double p : mx) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(my[0], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(my[1], 1.0 / 3.0, 1e-15);
    const PureState psi = build_state(fruit());
    const auto bx = born_distribution(reduced_via_gram(psi, Side::X));
    for (double p : bx) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);

    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 30; ++trial) {
        const auto pi = random_distribution(4, 5, rng);
        const auto st = build_state(pi);
        for (Side s : {Side::X, Side::Y}) {
            const auto classical = marginalize(pi, s);
            const auto born = born_distribution(partial_trace(density_projection(st), s));
            for (std::size_t k = 0; k < classical.size(); ++k) EXPECT_NEAR(born[k], classical[k], 1e-12);
        }
    }
}

TEST(Marginals, ProductRecoversFactors) {
    const std::vector<double> px{0.1, 0.9}, py{0.3, 0.3, 0.4};
    std::vector<double> t;
    for (double a : px)
        for (double b : py) t.push_back(a * b);
    const JointDistribution pi(oracle::labels("x", 2), oracle::labels("y", 3), t);
    const auto mx = marginalize(pi, Side::X);
    const auto my = marginalize(pi, Side::Y);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(mx[i], px[i], 1e-15);
    for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(my[a], py[a], 1e-15);
}

TEST(Schmidt, FruitCoefficients) {
    const auto sd = schmidt(build_state(fruit()));
    ASSERT_EQ(sd.coefficients.size(), 2u);
    EXPECT_NEAR(sd.coefficients[0], std::sqrt(2.0 / 3.0), 1e-12);
    EXPECT_NEAR(sd.coefficients[1], std::sqrt(1.0 / 3.0), 1e-12);
    // Left/right vectors are eigenvectors of the reduced densities.
    const double h = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(sd.x_vectors(0, 0), h, 1e-12);
    EXPECT_NEAR(sd.x_vectors(1, 0), h, 1e-12);
    EXPECT_NEAR(sd.x_vectors(2, 1), 1.0, 1e-12);
    EXPECT_NEAR(sd.y_vectors(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(sd.y_vectors(1, 1), 1.0, 1e-12);
}

TEST(Schmidt, ProductStateHasSingleCoefficient) {
    const auto sd = schmidt(build_state(JointDistribution(Alphabet({"a", "b"}), Alphabet({"u", "v"}), {.25, .25, .25, .25})));
    EXPECT_NEAR(sd.coefficients[0], 1.0, 1e-12);
    EXPECT_NEAR(sd.coefficients[1], 0.0, 1e-12);
}

TEST(Schmidt, RandomReassembly) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const auto pi = random_distribution(3, 4, rng);
        const auto psi = build_state(pi);
        const auto sd = schmidt(psi);
        double s2 = 0.0;
        for (double s : sd.coefficients) s2 += s * s;
        EXPECT_NEAR(s2, 1.0, 1e-10);
        // Σ σ_k f_k ⊗ e_k by hand.
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t a = 0; a < 4; ++a) {
                double acc = 0.0;
                for (std::size_t k = 0; k < sd.coefficients.size(); ++k) {
                    acc += sd.coefficients[k] * sd.y_vectors(a, k) * sd.x_vectors(i, k);
                }
                EXPECT_NEAR(acc, psi.amplitude(i, a), 1e-10);
            }
        }
    }
}

TEST(Reconstruct, RoundTrips) {
    const auto psi = build_state(fruit());
    const auto back = reconstruct_state(schmidt(psi));
    for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(back.amplitudes()[k], psi.amplitudes()[k], 1e-10);

    SchmidtData one{Alphabet({"a", "b"}), Alphabet({"u", "v", "w"}), {1.0}, Matrix{{0}, {1}}, Matrix{{0}, {0}, {1}}};
    const auto hot = reconstruct_state(one);
    for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(hot.amplitudes()[k], k == 5 ? 1.0 : 0.0);

    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = build_state(random_distribution(4, 4, rng));
        const auto r = reconstruct_state(schmidt(p));
        for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(r.amplitudes()[k], p.amplitudes()[k], 1e-10);
    }
}

TEST(Reconstruct, SignedSyntheticData) {
    const double h = 1.0 / std::sqrt(2.0);
    SchmidtData sd{Alphabet({"a", "b"}), Alphabet({"u"}), {1.0}, Matrix{{h}, {-h}}, Matrix{{1}}};
    const auto amps = reconstruct_amplitudes(sd);
    EXPECT_NEAR(amps[0], h, 1e-15);
    EXPECT_NEAR(amps[1], -h, 1e-15);
    EXPECT_THROW(reconstruct_state(sd), std::invalid_argument);
    sd.coefficients = {0.5};
    EXPECT_THROW(reconstruct_amplitudes(sd), std::invalid_argument);
}

TEST(Entropy, Examples) {
    const std::vector<double> v{0.6, 0.8};
    EXPECT_NEAR(von_neumann_entropy(DensityMatrix(Alphabet({"a", "b"}), linalg::outer(v, v))), 0.0, 1e-12);
    EXPECT_NEAR(von_neumann_entropy(density_diag(Alphabet({"a", "b"}), std::vector<double>{0.5, 0.5})), std::log(2.0),
                1e-12);
    const double h = -(2.0 / 3) * std::log(2.0 / 3) - (1.0 / 3) * std::log(1.0 / 3);
    const auto psi = build_state(fruit());
    EXPECT_NEAR(von_neumann_entropy(reduced_via_gram(psi, Side::X)), h, 1e-12);
    EXPECT_NEAR(von_neumann_entropy(reduced_via_gram(psi, Side::Y)), h, 1e-12);
    EXPECT_NEAR(entanglement_entropy(psi), h, 1e-12);
}

TEST(Entropy, EvenParityStateSplitTwoThree) {
    // Uniform on the 16 even strings of length 5, X = first two bits.
    const Alphabet x({"00", "01", "10", "11"});
    const Alphabet y({"000", "001", "010", "011", "100", "101", "110", "111"});
    std::vector<double> t(32, 0.0);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t a = 0; a < 8; ++a) {
            if ((__builtin_popcount(static_cast<unsigned>(i)) + __builtin_popcount(static_cast<unsigned>(a))) % 2 == 0) {
                t[i * 8 + a] = 1.0 / 16.0;
            }
        }
    }
    EXPECT_NEAR(entanglement_entropy(build_state(JointDistribution(x, y, t))), std::log(2.0), 1e-12);
}

TEST(Kraus, OneHot) {
    const auto psi = build_state(JointDistribution(Alphabet({"a", "b"}), Alphabet({"u", "v"}), {0, 1, 0, 0}));
    EXPECT_EQ(kraus_reduced(psi, Side::Y).matrix(), (Matrix{{0, 0}, {0, 1}}));
    EXPECT_EQ(kraus_reduced(psi, Side::X).matrix(), (Matrix{{1, 0}, {0, 0}}));
}

TEST(DensityMatrix, Validation) {
    EXPECT_THROW(DensityMatrix(Alphabet({"a", "b"}), Matrix{{0.5, 0.1}, {0.0, 0.5}}), linalg::SymmetryError);
    EXPECT_THROW(DensityMatrix(Alphabet({"a", "b"}), Matrix{{0.5, 0}, {0, 0.6}}), std::invalid_argument);
    EXPECT_THROW(DensityMatrix(Alphabet({"a"}), Matrix{{0.5, 0}, {0, 0.5}}), linalg::DimensionError);
}

TEST(PureState, Validation) {
    EXPECT_THROW(PureState(Alphabet({"a"}), Alphabet({"u", "v"}), {0.5, 0.5}), std::invalid_argument);
    EXPECT_THROW(PureState(Alphabet({"a"}), Alphabet({"u", "v"}), {-0.6, 0.8}), std::invalid_argument);
}
