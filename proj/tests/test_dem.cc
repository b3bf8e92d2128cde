#include <gtest/gtest.h>

#include <sstream>

#include "helpers.h"
#include "qldpc/circuit.h"
#include "qldpc/dem.h"
#include "qldpc/pauli_sim.h"
#include "qldpc/scheduler.h"

using namespace qldpc;
using namespace qldpc::testing;

namespace {

Circuit noisy_surface(size_t rounds, double p) {
    CssCode code = surface13();
    DepthSearch ds = minimize_depth(code, 5, 1);
    return attach_noise(build_memory_experiment(code, ds.schedule, rounds, Basis::Z), p);
}

// Two-qubit code with two Z checks per round, for window arithmetic.
CssCode two_check_code() {
    BitMatrix h = repetition(2);
    return hgp(h, h);
}

}  // namespace

TEST(Dem, IdenticalMechanismsMerge) {
    Circuit c;
    c.num_z = 1;
    c.rounds = 1;
    c.layers = {Layer{LayerKind::Reset, 0, {Instruction{Gate::RZ, 0.0, {0}}}},
                Layer{LayerKind::Cnot, 0, {Instruction{Gate::FLIP_X, 0.1, {0}}, Instruction{Gate::FLIP_X, 0.1, {0}}}},
                Layer{LayerKind::Measure, 0, {Instruction{Gate::MZ, 0.0, {0}}}}};
    c.detectors = {Detector{Basis::Z, 0, 0, {0}}};
    DemPair d = build_dem(c);
    ASSERT_EQ(d.z.num_mechanisms(), 1u);
    EXPECT_NEAR(d.z.priors[0], 0.18, 1e-15);
    EXPECT_EQ(d.z.faults.size(), 1u);
}

TEST(Dem, ColumnsReproducedByInjection) {
    Circuit c = noisy_surface(2, 1e-3);
    DemPair d = build_dem(c);
    for (const DetectorErrorModel *dem : {&d.z, &d.x}) {
        ASSERT_EQ(dem->faults.size(), dem->num_mechanisms());
        std::vector<std::vector<Injection>> inj;
        for (const Injection &f : dem->faults) {
            inj.push_back({f});
        }
        ShotBatch b = simulate_injections(c, inj);
        BitMatrix ht = dem->h.transpose(), ot = dem->obs.transpose();
        for (size_t j = 0; j < dem->num_mechanisms(); j++) {
            std::vector<uint32_t> rows;
            for (uint32_t r : b.detectors.row(j)) {
                if (r >= dem->first_detector && r < dem->first_detector + dem->num_detectors()) {
                    rows.push_back(r - dem->first_detector);
                }
            }
            EXPECT_EQ(rows, ht.row(j)) << "column " << j;
            if (dem->type == Basis::Z) {
                EXPECT_EQ(std::vector<uint32_t>(b.observables.row(j).begin(), b.observables.row(j).end()), ot.row(j));
            }
            EXPECT_LE(column_round_span(*dem, j), 1u);
            EXPECT_GT(dem->priors[j], 0.0);
        }
    }
}

TEST(Dem, ShapesAndRounds) {
    CssCode code = surface13();
    Circuit c = noisy_surface(3, 1e-3);
    DemPair d = build_dem(c);
    EXPECT_EQ(d.z.num_detectors(), 4 * code.hz.rows());
    EXPECT_EQ(d.z.num_rounds, 4u);
    EXPECT_EQ(d.z.detectors_per_round, code.hz.rows());
    EXPECT_EQ(d.z.obs.rows(), 1u);
    EXPECT_EQ(d.x.num_detectors(), 2 * code.hx.rows());
    EXPECT_EQ(d.x.first_detector, c.first_detector_of(Basis::X));
    for (size_t r = 0; r < d.z.num_detectors(); r++) {
        EXPECT_EQ(d.z.round_of[r], r / code.hz.rows());
    }
    EXPECT_EQ(build_dem(noisy_surface(3, 0.0)).z.num_mechanisms(), 0u);
}

TEST(Dem, TextRoundTrip) {
    DemPair d = build_dem(noisy_surface(2, 3e-3));
    std::stringstream ss;
    d.z.write_text(ss);
    EXPECT_EQ(DetectorErrorModel::read_text(ss), d.z);
}

TEST(Phenomenological, ColumnStructure) {
    CssCode code = surface13();
    const double p = 0.01;
    DetectorErrorModel dem = phenomenological_dem(code, 1, p);
    size_t c = code.hz.rows();
    // Data columns for detector rounds 0 and 1, one measurement column per check.
    EXPECT_EQ(dem.num_mechanisms(), 2 * code.n + c);
    EXPECT_EQ(dem.num_detectors(), 2 * c);
    BitMatrix ht = dem.h.transpose();
    size_t time_like = 0, final_round = 0;
    for (size_t j = 0; j < ht.rows(); j++) {
        const auto &rows = ht.row(j);
        ASSERT_FALSE(rows.empty());
        EXPECT_DOUBLE_EQ(dem.priors[j], p);
        if (column_round_span(dem, j) == 1) {
            time_like++;
            EXPECT_EQ(rows.size(), 2u);
            EXPECT_EQ(rows[1], rows[0] + c);
        } else if (dem.round_of[rows.front()] == 1) {
            final_round++;
        }
    }
    EXPECT_EQ(time_like, c);
    EXPECT_EQ(final_round, code.n);
    EXPECT_EQ(dem.obs.rows(), 1u);
}

TEST(Window, RowRanges) {
    DetectorErrorModel dem = phenomenological_dem(two_check_code(), 16, 0.01);
    ASSERT_EQ(dem.detectors_per_round, 2u);
    ASSERT_EQ(dem.num_rounds, 17u);
    WindowSlice w1 = window_slice(dem, 1, 5, 3);
    EXPECT_EQ(w1.first_row, 0u);
    EXPECT_EQ(w1.end_row, 10u);
    EXPECT_EQ(w1.commit_end_row, 6u);
    WindowSlice w2 = window_slice(dem, 2, 5, 3);
    EXPECT_EQ(w2.first_row, 6u);
    EXPECT_EQ(w2.end_row, 16u);
    EXPECT_EQ(w2.sub_h.rows(), 10u);
    EXPECT_EQ(window_count(17, 5, 3), 5u);
    for (size_t w = 1; w <= 5; w++) {
        EXPECT_EQ(window_slice(dem, w, 5, 3).first_row, 2 * 3 * (w - 1));
    }
    WindowSlice last = window_slice(dem, 5, 5, 3);
    EXPECT_EQ(last.end_row, 34u);
    EXPECT_EQ(last.commit_end_row, 34u);
    EXPECT_EQ(window_count(17, 17, 3), 1u);
    EXPECT_EQ(window_count(17, 40, 40), 1u);
    EXPECT_THROW(window_count(17, 3, 5), std::invalid_argument);
    EXPECT_THROW(window_count(17, 3, 0), std::invalid_argument);
}

TEST(Window, EveryMechanismCommittedOnce) {
    DemPair d = build_dem(noisy_surface(6, 1e-3));
    for (auto [W, F] : std::vector<std::pair<size_t, size_t>>{{1, 1}, {3, 1}, {5, 3}, {4, 4}, {9, 2}}) {
        std::vector<int> committed(d.z.num_mechanisms(), 0);
        size_t n = window_count(d.z.num_rounds, W, F);
        for (size_t w = 1; w <= n; w++) {
            WindowSlice s = window_slice(d.z, w, W, F);
            EXPECT_EQ(s.sub_h.rows(), s.end_row - s.first_row);
            EXPECT_EQ(s.sub_h.cols(), s.column_map.size());
            EXPECT_EQ(s.sub_priors.size(), s.column_map.size());
            for (uint32_t local : s.commit_columns) {
                committed[s.column_map[local]]++;
            }
        }
        for (size_t j = 0; j < committed.size(); j++) {
            EXPECT_EQ(committed[j], 1) << "W=" << W << " F=" << F << " column " << j;
        }
    }
}
