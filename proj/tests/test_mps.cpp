#include "qdensity/mps.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace qdensity;
using namespace qdensity::mps;
using linalg::max_abs_diff;

namespace {

SequenceDataset bits_dataset(const std::vector<Sequence>& samples) {
    return SequenceDataset(Alphabet({"0", "1"}), samples, "");
}

std::vector<double> born_vector(const MatrixProductState& m) {
    auto a = oracle::mps_amplitudes(m);
    for (double& x : a) x *= x;
    return a;
}

std::vector<Sequence> random_samples(std::size_t n, std::size_t count, std::mt19937_64& rng) {
    std::vector<Sequence> out(count, Sequence(n));
    for (auto& s : out) {
        for (auto& x : s) x = rng() % 2;
    }
    return out;
}

}  // namespace

TEST(ParityTarget, UniformOnEvenStrings) {
    for (std::size_t n : {2u, 3u, 5u, 8u}) {
        const auto born = born_vector(parity_target(n));
        const double want = 1.0 / static_cast<double>(std::size_t{1} << (n - 1));
        for (std::size_t i = 0; i < born.size(); ++i) {
            const bool even = oracle::is_even(oracle::bits_of(i, n));
            EXPECT_NEAR(born[i], even ? want : 0.0, 1e-15) << "n=" << n << " i=" << i;
        }
        EXPECT_NEAR(inner_product(parity_target(n), parity_target(n)), 1.0, 1e-13);
    }
}

TEST(Train, FullEvenSetIsExact) {
    for (std::size_t n : {3u, 4u, 6u, 10u}) {
        const auto model = train(bits_dataset(oracle::all_even(n)), {});
        EXPECT_LT(bhattacharyya(model, parity_target(n)), 1e-10) << "n=" << n;
        const auto bonds = model.bond_dims();
        EXPECT_EQ(bonds.front(), 2u);
        EXPECT_EQ(bonds.back(), 1u);
        for (auto b : bonds) EXPECT_LE(b, 2u);
    }
}

TEST(Train, FirstStepDensityInParityOrder) {
    TrainTrace trace;
    train(bits_dataset(oracle::all_even(4)), {}, &trace);
    ASSERT_EQ(trace.steps.size(), 2u);
    const Matrix& rho = trace.steps[0].rho;  // index s1·2 + s2: 00, 01, 10, 11
    const std::size_t order[4] = {0, 3, 1, 2};   // 00, 11, 01, 10
    Matrix permuted(4, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) permuted(i, j) = rho(order[i], order[j]);
    }
    const Matrix want = (1.0 / 16.0) * Matrix{{4, 4, 0, 0}, {4, 4, 0, 0}, {0, 0, 4, 4}, {0, 0, 4, 4}};
    EXPECT_LT(max_abs_diff(permuted, want), 1e-15);
    EXPECT_NEAR(trace.steps[0].eigenvalues[0], 0.5, 1e-15);
    EXPECT_NEAR(trace.steps[0].eigenvalues[1], 0.5, 1e-15);
}

TEST(Train, StepSpectrumMatchesGroupMatrix) {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + rng() % 5;
        TrainTrace trace;
        TrainConfig cfg;
        cfg.chi = 1 + rng() % 4;
        train(bits_dataset(random_samples(n, 1 + rng() % 40, rng)), cfg, &trace);
        ASSERT_EQ(trace.steps.size(), n - 2);
        for (const auto& step : trace.steps) {
            const auto s = linalg::svd(step.group_matrix);
            double fro = 0.0;
            for (double x : step.group_matrix.entries()) fro += x * x;
            EXPECT_NEAR(step.rho.trace(), 1.0, 1e-12);
            for (std::size_t k = 0; k < s.singular_values.size(); ++k) {
                EXPECT_NEAR(step.eigenvalues[k], s.singular_values[k] * s.singular_values[k] / fro, 1e-12);
            }
            for (std::size_t k = s.singular_values.size(); k < step.eigenvalues.size(); ++k) {
                EXPECT_NEAR(step.eigenvalues[k], 0.0, 1e-12);
            }
        }
    }
}

TEST(Train, AgreesWithDenseSweep) {
    std::mt19937_64 rng(62);
    int compared = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 3 + rng() % 5;
        const std::size_t chi = 1 + rng() % 3;
        const auto samples = random_samples(n, 2 + rng() % 30, rng);
        TrainConfig cfg;
        cfg.chi = chi;
        TrainTrace trace;
        const auto model = train(bits_dataset(samples), cfg, &trace);
        // A truncation that cuts through a degenerate eigenvalue has no unique answer.
        bool degenerate = false;
        for (const auto& step : trace.steps) {
            const auto& ev = step.eigenvalues;
            if (chi < ev.size() && ev[chi - 1] > 1e-12 && ev[chi - 1] - ev[chi] < 1e-9) degenerate = true;
        }
        if (degenerate) continue;
        ++compared;
        const auto want = oracle::dense_sweep_born(samples, n, chi);
        const auto got = born_vector(model);
        for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-10) << "trial " << trial;
    }
    EXPECT_GT(compared, 20);
}

TEST(Train, NormalizedAndIsometric) {
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng() % 7;
        TrainConfig cfg;
        cfg.chi = 1 + rng() % 4;
        const auto model = train(bits_dataset(random_samples(n, 1 + rng() % 50, rng)), cfg);
        const auto born = born_vector(model);
        double total = 0.0;
        for (double p : born) total += p;
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_NEAR(inner_product(model, model), 1.0, 1e-12);
        for (std::size_t k = 0; k + 1 < model.n(); ++k) {
            const auto& t = model.tensors()[k];
            Matrix g(t.right, t.right);
            for (std::size_t r = 0; r < t.right; ++r) {
                for (std::size_t q = 0; q < t.right; ++q) {
                    for (std::size_t l = 0; l < t.left; ++l) {
                        for (std::size_t s = 0; s < t.phys; ++s) g(r, q) += t(l, s, r) * t(l, s, q);
                    }
                }
            }
            EXPECT_LT(max_abs_diff(g, Matrix::identity(t.right)), 1e-12);
        }
    }
}

TEST(Train, PointMass) {
    const Sequence s{0, 1, 1, 0, 1};
    const auto model = train(bits_dataset({s, s, s}), {});
    EXPECT_NEAR(born_probability(model, s), 1.0, 1e-14);
    for (const auto& draw : sample(model, 50, 9)) EXPECT_EQ(draw, s);
}

TEST(Train, RejectsBadInput) {
    TrainConfig cfg;
    cfg.chi = 0;
    EXPECT_THROW(train(bits_dataset({{0, 1, 1}}), cfg), std::invalid_argument);
    EXPECT_THROW(train(bits_dataset({{0}}), {}), std::invalid_argument);
}

TEST(InnerProduct, MatchesBruteForceAndCauchySchwarz) {
    std::mt19937_64 rng(64);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng() % 7;
        const auto a = random_isometric(n, 1 + rng() % 3, rng());
        const auto b = train(bits_dataset(random_samples(n, 1 + rng() % 20, rng)), {});
        const auto va = oracle::mps_amplitudes(a), vb = oracle::mps_amplitudes(b);
        double dot = 0.0;
        for (std::size_t i = 0; i < va.size(); ++i) dot += va[i] * vb[i];
        const double ip = inner_product(a, b);
        EXPECT_NEAR(ip, dot, 1e-12);
        EXPECT_LE(std::abs(ip), std::sqrt(inner_product(a, a) * inner_product(b, b)) + 1e-12);
        EXPECT_NEAR(inner_product(a, a), 1.0, 1e-12);
    }
}

TEST(RandomIsometric, DeterministicAndShaped) {
    const auto a = random_isometric(6, 3, 5);
    const auto b = random_isometric(6, 3, 5);
    EXPECT_EQ(oracle::mps_amplitudes(a), oracle::mps_amplitudes(b));
    for (auto bond : a.bond_dims()) EXPECT_LE(bond, 3u);
    EXPECT_EQ(a.bond_dims().back(), 1u);
}

TEST(Bhattacharyya, Examples) {
    const std::vector<double> p{0.25, 0.25, 0.5}, q{1.0, 0.0, 0.0}, r{0.0, 1.0, 0.0};
    EXPECT_NEAR(bhattacharyya(p, p), 0.0, 1e-15);
    EXPECT_NEAR(bhattacharyya(p, q), -std::log(0.5), 1e-15);
    EXPECT_EQ(bhattacharyya(q, r), kInfiniteDistance);
    EXPECT_NEAR(bhattacharyya(parity_target(6), parity_target(6)), 0.0, 1e-13);
}

TEST(Bhattacharyya, MpsOverloadMatchesDistributions) {
    std::mt19937_64 rng(65);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 4 + rng() % 4;
        const auto model = train(bits_dataset(random_samples(n, 5 + rng() % 20, rng)), {});
        const auto target = parity_target(n);
        const auto p = born_vector(model), q = born_vector(target);
        // Nonnegative amplitudes make ⟨a|b⟩ the Bhattacharyya coefficient.
        const auto a = oracle::mps_amplitudes(model);
        bool nonneg = std::all_of(a.begin(), a.end(), [](double x) { return x >= -1e-15; });
        if (!nonneg) continue;
        const double want = bhattacharyya(p, q);
        if (std::isinf(want)) {
            EXPECT_EQ(bhattacharyya(model, target), kInfiniteDistance);
        } else {
            EXPECT_NEAR(bhattacharyya(model, target), want, 1e-10);
        }
    }
}

TEST(Sampling, PortableDraws) {
    std::mt19937_64 rng(66);
    for (int k = 0; k < 1000; ++k) {
        const double u = uniform_unit(rng);
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(uniform_below(rng, 7), 7u);
    }
}

TEST(Sampling, FrequenciesWithinFiveSigma) {
    std::mt19937_64 rng(67);
    const std::size_t n = 5;
    const auto model = train(bits_dataset(random_samples(n, 12, rng)), {});
    const auto born = born_vector(model);
    const std::size_t count = 20000;
    std::vector<std::size_t> hits(born.size(), 0);
    for (const auto& s : sample(model, count, 68)) {
        std::size_t idx = 0;
        for (auto b : s) idx = idx * 2 + b;
        ++hits[idx];
    }
    for (std::size_t i = 0; i < born.size(); ++i) {
        const double mean = born[i] * count;
        const double sigma = std::sqrt(count * born[i] * (1 - born[i]));
        EXPECT_LE(std::abs(hits[i] - mean), 5 * sigma + 1e-9) << "index " << i;
    }
}

TEST(Sampling, ParityTargetEmpiricalDistance) {
    const std::size_t n = 8;
    const auto draws = sample(parity_target(n), 100000, 69);
    std::map<Sequence, double> freq;
    for (const auto& s : draws) {
        ASSERT_TRUE(oracle::is_even(s));
        freq[s] += 1.0 / draws.size();
    }
    const double uniform = 1.0 / 128.0;
    double bc = 0.0;
    for (const auto& [s, f] : freq) bc += std::sqrt(f * uniform);
    EXPECT_LT(-std::log(bc), 0.01);
}

TEST(Sampling, SameSeedSameDraws) {
    const auto m = parity_target(7);
    EXPECT_EQ(sample(m, 100, 3), sample(m, 100, 3));
    EXPECT_NE(sample(m, 100, 3), sample(m, 100, 4));
}

TEST(EvenStrings, DistinctEvenSorted) {
    for (std::size_t count : {1u, 10u, 64u, 128u}) {
        const auto s = draw_even_strings(8, count, 71);
        ASSERT_EQ(s.size(), count);
        EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
        EXPECT_EQ(std::set<Sequence>(s.begin(), s.end()).size(), count);
        for (const auto& x : s) EXPECT_TRUE(oracle::is_even(x));
    }
    EXPECT_EQ(draw_even_strings(8, 128, 71), oracle::all_even(8));
    EXPECT_THROW(draw_even_strings(8, 129, 71), std::invalid_argument);
}

TEST(Experiment, ThreadCountDoesNotChangeRows) {
    TrainConfig cfg;
    const auto a = run_experiment(8, {0.25, 0.5, 1.0}, 3, 11, cfg, 1);
    const auto b = run_experiment(8, {0.25, 0.5, 1.0}, 3, 11, cfg, 4);
    ASSERT_EQ(a.size(), 9u);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].fraction, b[k].fraction);
        EXPECT_EQ(a[k].seed, b[k].seed);
        EXPECT_EQ(a[k].n_samples, b[k].n_samples);
        EXPECT_EQ(a[k].bhattacharyya, b[k].bhattacharyya);
    }
    EXPECT_EQ(a[0].n_samples, 32u);
    EXPECT_EQ(a[1].seed, 12u);
    for (std::size_t k = 6; k < 9; ++k) EXPECT_LT(a[k].bhattacharyya, 1e-8);
}

TEST(Train, FullFiveModelValues) {
    const auto model = train(bits_dataset(oracle::all_even(5)), {});
    EXPECT_NEAR(born_probability(model, Sequence{0, 0, 1, 1, 0}), 1.0 / 16.0, 1e-12);
    EXPECT_LE(born_probability(model, Sequence{0, 0, 1, 1, 1}), 1e-12);
    EXPECT_NEAR(inner_product(model, parity_target(5)), 1.0, 1e-10);
    EXPECT_THROW(born_probability(model, Sequence{0, 1}), std::invalid_argument);
}

TEST(Train, SubsetsOfEvenStringsStayEven) {
    std::mt19937_64 rng(72);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + rng() % 10;
        const std::size_t half = std::size_t{1} << (n - 1);
        const auto samples = draw_even_strings(n, 1 + rng() % half, rng());
        const auto born = born_vector(train(bits_dataset(samples), {}));
        for (std::size_t i = 0; i < born.size(); ++i) {
            if (!oracle::is_even(oracle::bits_of(i, n))) EXPECT_LE(born[i], 1e-10) << "n=" << n << " i=" << i;
        }
    }
}

TEST(Sampling, FullFiveModelFrequencies) {
    const auto model = train(bits_dataset(oracle::all_even(5)), {});
    const std::size_t count = 10000;
    std::map<Sequence, std::size_t> hits;
    for (const auto& s : sample(model, count, 73)) {
        ASSERT_TRUE(oracle::is_even(s));
        ++hits[s];
    }
    const double p = 1.0 / 16.0;
    const double sigma = std::sqrt(count * p * (1 - p));
    for (const auto& s : oracle::all_even(5)) EXPECT_LE(std::abs(hits[s] - count * p), 5 * sigma);
}

TEST(Bhattacharyya, TwoPointAgainstPointMass) {
    const std::vector<double> p{0.5, 0.5}, q{1.0, 0.0};
    EXPECT_NEAR(bhattacharyya(p, q), std::log(2.0) / 2, 1e-15);
    EXPECT_NEAR(bhattacharyya(2, [&](std::size_t i) { return p[i]; }, [&](std::size_t i) { return q[i]; }),
                std::log(2.0) / 2, 1e-15);
}
