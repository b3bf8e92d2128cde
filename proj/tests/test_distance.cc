#include <gtest/gtest.h>

#include <set>

#include "helpers.h"
#include "qldpc/circuit.h"
#include "qldpc/dem.h"
#include "qldpc/distance.h"
#include "qldpc/scheduler.h"

using namespace qldpc;
using namespace qldpc::testing;

namespace {

// Smallest number of DEM columns with zero detector parity and nonzero observable parity, searched
// exhaustively up to max_weight; 0 if none.
size_t exhaustive_dem_distance(const DetectorErrorModel &dem, size_t max_weight) {
    BitMatrix ht = dem.h.transpose(), ot = dem.obs.transpose();
    size_t n = ht.rows();
    std::vector<BitVec> det(n), obs(n);
    for (size_t j = 0; j < n; j++) {
        det[j] = BitVec::from_ones(dem.num_detectors(), ht.row(j));
        obs[j] = BitVec::from_ones(dem.obs.rows(), ot.row(j));
    }
    for (size_t a = 0; a < n; a++) {
        if (!det[a].any() && obs[a].any()) return 1;
    }
    if (max_weight < 2) return 0;
    for (size_t a = 0; a < n; a++) {
        for (size_t b = a + 1; b < n; b++) {
            if (det[a] == det[b] && (obs[a] ^ obs[b]).any()) return 2;
        }
    }
    if (max_weight < 3) return 0;
    for (size_t a = 0; a < n; a++) {
        for (size_t b = a + 1; b < n; b++) {
            BitVec d = det[a] ^ det[b];
            BitVec o = obs[a] ^ obs[b];
            for (size_t c = b + 1; c < n; c++) {
                if (d == det[c] && (o ^ obs[c]).any()) return 3;
            }
        }
    }
    return 0;
}

}  // namespace

TEST(Distance, SurfaceCode) {
    CssCode code = surface13();
    DistanceReport r = min_weight_logical(code.hx, code.lx, 100, 1);
    ASSERT_TRUE(r.found);
    EXPECT_EQ(r.weight, 3u);
    EXPECT_EQ(r.witness.size(), 3u);
    EXPECT_TRUE(verify_logical_witness(code.hx, code.lx, r.witness));
}

TEST(Distance, MatchesExhaustiveOnSmallProducts) {
    Rng rng(12);
    int checked = 0;
    while (checked < 12) {
        BitMatrix h1 = random_matrix(2 + rng.below(2), 3 + rng.below(2), 0.6, rng);
        BitMatrix h2 = random_matrix(2 + rng.below(2), 3 + rng.below(2), 0.6, rng);
        CssCode code = hgp(h1, h2);
        if (code.k == 0 || code.n > 24) {
            continue;
        }
        checked++;
        for (auto [h, l] : {std::pair{&code.hx, &code.lx}, std::pair{&code.hz, &code.lz}}) {
            auto exact = exhaustive_min_weight(*h, *l);
            ASSERT_TRUE(exact);
            DistanceReport r = min_weight_logical(*h, *l, 400, checked);
            EXPECT_EQ(r.weight, *exact);
            EXPECT_TRUE(verify_logical_witness(*h, *l, r.witness));
        }
    }
}

TEST(Distance, ClassicalModeAndNoCodeword) {
    DistanceReport r = min_weight_logical(repetition(5), BitMatrix(0, 5), 50, 0);
    EXPECT_TRUE(r.found);
    EXPECT_EQ(r.weight, 5u);
    EXPECT_FALSE(min_weight_logical(BitMatrix::identity(4), BitMatrix(0, 4), 20, 0).found);
}

TEST(Distance, WeightNeverIncreasesWithTrials) {
    auto [p1, p2] = bpc_polynomials(4);
    CssCode code = bpc(p1, p2, 4);
    size_t prev = SIZE_MAX;
    for (size_t trials : {1, 5, 25, 125}) {
        DistanceReport r = min_weight_logical(code.hz, code.lz, trials, 3);
        ASSERT_TRUE(r.found);
        EXPECT_LE(r.weight, prev);
        prev = r.weight;
    }
    EXPECT_GE(prev, 8u);
}

TEST(Distance, LowWeightLogicalsAreDistinctAndValid) {
    CssCode code = surface13();
    auto found = low_weight_logicals(code.hx, code.lx, 200, 5, 4, 50);
    EXPECT_FALSE(found.empty());
    std::set<std::vector<uint32_t>> seen;
    for (const auto &w : found) {
        EXPECT_LE(w.size(), 4u);
        EXPECT_TRUE(verify_logical_witness(code.hx, code.lx, w));
        EXPECT_TRUE(seen.insert(w).second);
    }
    EXPECT_LE(found.size(), 50u);
}

TEST(Distance, WitnessVerification) {
    CssCode code = surface13();
    // A single check row is a stabilizer, not a logical.
    std::vector<uint32_t> stab(code.hz.row(0).begin(), code.hz.row(0).end());
    EXPECT_FALSE(verify_logical_witness(code.hx, code.lx, stab));
    EXPECT_FALSE(verify_logical_witness(code.hx, code.lx, {0}));
}

TEST(CircuitDistance, SurfaceCodeMatchesExhaustiveSearch) {
    CssCode code = surface13();
    DepthSearch ds = minimize_depth(code, 5, 1);
    Circuit noisy = attach_noise(build_memory_experiment(code, ds.schedule, 2, Basis::Z), 1e-3);
    DetectorErrorModel dem = build_dem(noisy).z;
    CircuitDistanceOptions opt;
    opt.trials = 300;
    opt.seed = 2;
    DistanceReport r = circuit_distance_upper_bound(dem, noisy, opt);
    ASSERT_TRUE(r.found);
    EXPECT_LE(r.weight, 3u);
    EXPECT_EQ(r.weight, exhaustive_dem_distance(dem, 3));
    EXPECT_EQ(r.annotations.size(), r.witness.size());
    EXPECT_TRUE(verify_logical_witness(dem.h, dem.obs, r.witness));

    DetectorErrorModel bare = dem;
    bare.faults.clear();
    EXPECT_THROW(circuit_distance_upper_bound(bare, noisy, opt), std::invalid_argument);
}
