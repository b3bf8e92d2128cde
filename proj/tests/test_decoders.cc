#include <gtest/gtest.h>

#include <cmath>

#include "helpers.h"
#include "qldpc/circuit.h"
#include "qldpc/decoders.h"
#include "qldpc/dem.h"
#include "qldpc/pauli_sim.h"
#include "qldpc/scheduler.h"

using namespace qldpc;
using namespace qldpc::testing;

namespace {

DecoderConfig bp_osd(size_t iters, size_t order) {
    DecoderConfig dc;
    dc.bp.max_iter = iters;
    dc.osd.order = order;
    return dc;
}

}  // namespace

TEST(Bp, SingleVariable) {
    DecodeResult r = bp_decode(BitMatrix::from_dense({{1}}), {0.1}, BitVec::from_ones(1, std::vector<uint32_t>{0}), {});
    EXPECT_TRUE(r.converged);
    EXPECT_TRUE(r.error.get(0));
}

TEST(Bp, ZeroSyndromeConvergesImmediately) {
    Rng rng(2);
    BitMatrix h = random_matrix(6, 10, 0.4, rng);
    DecodeResult r = bp_decode(h, std::vector<double>(10, 0.05), BitVec(6), {});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 0u);
    EXPECT_FALSE(r.error.any());
}

TEST(Bp, TreePosteriorsEqualExactMarginals) {
    Rng rng(31);
    for (int rep = 0; rep < 60; rep++) {
        BitMatrix h = random_tree(2 + rng.below(11), rng);
        std::vector<double> priors(h.cols());
        for (double &p : priors) {
            p = 0.01 + 0.3 * rng.uniform();
        }
        BitVec s(h.rows());
        for (size_t r = 0; r < h.rows(); r++) {
            s.set(r, rng.uniform() < 0.5);
        }
        BpConfig cfg;
        cfg.max_iter = 2 * (h.rows() + h.cols());
        cfg.early_stop = false;
        DecodeResult r = bp_decode(h, priors, s, cfg);
        auto exact = exact_marginals(h, priors, s);
        for (size_t j = 0; j < h.cols(); j++) {
            EXPECT_NEAR(r.posteriors[j], exact[j], 1e-9) << "rep " << rep << " bit " << j;
        }
    }
}

TEST(Bp, MessageUpdatesScaleLinearlyWithIterations) {
    Rng rng(8);
    BitMatrix h = random_matrix(30, 60, 0.1, rng);
    BitVec s(30);
    s.set(3);
    BpConfig cfg;
    cfg.early_stop = false;
    cfg.max_iter = 10;
    bp_decode(h, std::vector<double>(60, 0.02), s, cfg);
    size_t u10 = BpDecoder::last_message_updates();
    cfg.max_iter = 20;
    bp_decode(h, std::vector<double>(60, 0.02), s, cfg);
    size_t u20 = BpDecoder::last_message_updates();
    EXPECT_EQ(u20, 2 * u10);
    EXPECT_EQ(u10, 10 * 2 * h.nnz());
}

TEST(Osd, PicksLikelierSolution) {
    BitMatrix h = BitMatrix::from_dense({{1, 1}});
    BitVec s = BitVec::from_ones(1, std::vector<uint32_t>{0});
    std::vector<double> priors = {0.2, 0.01};
    for (size_t order : {0, 1, 2}) {
        BitVec e = osd_postprocess(h, priors, priors, s, OsdConfig{order});
        EXPECT_EQ(e, BitVec::from_ones(2, std::vector<uint32_t>{0}));
    }
    EXPECT_FALSE(osd_postprocess(h, priors, priors, BitVec(1), OsdConfig{1}).any());
    EXPECT_THROW(osd_postprocess(BitMatrix::from_dense({{1, 1}, {1, 1}}), priors, priors,
                                 BitVec::from_ones(2, std::vector<uint32_t>{0}), OsdConfig{0}),
                 std::invalid_argument);
}

TEST(Osd, OutputSatisfiesSyndrome) {
    Rng rng(13);
    for (int rep = 0; rep < 100; rep++) {
        size_t r = 5 + rng.below(20), n = r + 5 + rng.below(30);
        BitMatrix h = random_matrix(r, n, 0.2, rng);
        BitVec e(n);
        for (size_t j = 0; j < n; j++) {
            e.set(j, rng.uniform() < 0.15);
        }
        BitVec s = mul(h, e);
        std::vector<double> priors(n), post(n);
        for (size_t j = 0; j < n; j++) {
            priors[j] = 0.01 + 0.2 * rng.uniform();
            post[j] = rng.uniform();
        }
        for (size_t order : {0, 1, 4, 10}) {
            EXPECT_EQ(mul(h, osd_postprocess(h, priors, post, s, OsdConfig{order})), s);
        }
    }
}

TEST(BpOsd, CorrectsEverySingleErrorOnSurfaceCode) {
    CssCode code = surface13();
    for (size_t order : {0, 1, 10}) {
        auto dec = make_decoder("bp-osd", bp_osd(10, order))->prepare(code.hz, std::vector<double>(code.n, 0.05));
        for (uint32_t q = 0; q < code.n; q++) {
            BitVec e = BitVec::from_ones(code.n, std::vector<uint32_t>{q});
            BitVec s = mul(code.hz, e);
            DecodeResult r = dec->decode(s);
            ASSERT_TRUE(r.converged);
            EXPECT_EQ(mul(code.hz, r.error), s);
            EXPECT_FALSE(mul(code.lz, e ^ r.error).any()) << "qubit " << q;
        }
    }
}

TEST(BpOsd, MinSumAndRegistry) {
    CssCode code = surface13();
    DecoderConfig dc = bp_osd(20, 2);
    dc.bp.variant = BpConfig::Variant::MinSum;
    auto dec = make_decoder("bp-osd", dc)->prepare(code.hz, std::vector<double>(code.n, 0.05));
    for (uint32_t q = 0; q < code.n; q++) {
        BitVec e = BitVec::from_ones(code.n, std::vector<uint32_t>{q});
        DecodeResult r = dec->decode(mul(code.hz, e));
        EXPECT_FALSE(mul(code.lz, e ^ r.error).any());
    }
    auto names = decoder_names();
    EXPECT_NE(std::find(names.begin(), names.end(), "bp"), names.end());
    EXPECT_NE(std::find(names.begin(), names.end(), "bp-osd"), names.end());
    EXPECT_THROW(make_decoder("nope", {}), std::invalid_argument);
}

TEST(BpOsd, PreparedDecoderIsReentrant) {
    Rng rng(77);
    BitMatrix h = random_matrix(20, 50, 0.12, rng);
    auto dec = make_decoder("bp-osd", bp_osd(10, 3))->prepare(h, std::vector<double>(50, 0.03));
    std::vector<BitVec> syns;
    std::vector<DecodeResult> first;
    for (int i = 0; i < 20; i++) {
        BitVec e(50);
        e.set(rng.below(50));
        e.set(rng.below(50));
        syns.push_back(mul(h, e));
        first.push_back(dec->decode(syns.back()));
    }
    for (int i = 19; i >= 0; i--) {
        DecodeResult again = dec->decode(syns[i]);
        EXPECT_EQ(again.error, first[i].error);
        EXPECT_EQ(again.posteriors, first[i].posteriors);
    }
}

class WindowDecoding : public ::testing::Test {
   protected:
    void SetUp() override {
        CssCode code = surface13();
        DepthSearch ds = minimize_depth(code, 5, 1);
        base = build_memory_experiment(code, ds.schedule, 5, Basis::Z);
        circuit = attach_noise(base, 5e-3);
        dem = build_dem(circuit).z;
    }
    Circuit base, circuit;
    DetectorErrorModel dem;
};

TEST_F(WindowDecoding, SingleWindowEqualsWholeDecoding) {
    ShotBatch b = sample(circuit, 300, 4);
    auto inner = make_decoder("bp-osd", bp_osd(10, 1));
    SlidingWindowDecoder sw(dem, dem.num_rounds, 1, *inner);
    ASSERT_EQ(sw.num_windows(), 1u);
    for (size_t s = 0; s < b.shots(); s++) {
        BitVec det = dem_detectors(b, s, dem);
        EXPECT_EQ(sw.decode(det), decode_whole(dem, det, *inner)) << "shot " << s;
    }
}

TEST_F(WindowDecoding, ZeroDetectorsGiveZeroFlips) {
    auto inner = make_decoder("bp-osd", bp_osd(10, 1));
    for (auto [W, F] : std::vector<std::pair<size_t, size_t>>{{1, 1}, {3, 1}, {5, 3}}) {
        BitVec committed;
        EXPECT_FALSE(SlidingWindowDecoder(dem, W, F, *inner).decode(BitVec(dem.num_detectors()), nullptr, &committed).any());
        EXPECT_FALSE(committed.any());
    }
}

TEST_F(WindowDecoding, CommittedMechanismsReproduceDetectors) {
    ShotBatch b = sample(circuit, 200, 6);
    auto inner = make_decoder("bp-osd", bp_osd(10, 1));
    for (auto [W, F] : std::vector<std::pair<size_t, size_t>>{{1, 1}, {2, 1}, {3, 2}, {5, 3}}) {
        SlidingWindowDecoder sw(dem, W, F, *inner);
        for (size_t s = 0; s < b.shots(); s++) {
            BitVec det = dem_detectors(b, s, dem);
            BitVec committed;
            WindowStats stats;
            BitVec flips = sw.decode(det, &stats, &committed);
            EXPECT_EQ(mul(dem.h, committed), det);
            EXPECT_EQ(mul(dem.obs, committed), flips);
            EXPECT_EQ(stats.calls, sw.num_windows());
        }
    }
}

TEST_F(WindowDecoding, EvaluationCountsFailures) {
    auto inner = make_decoder("bp-osd", bp_osd(10, 1));
    ShotBatch zero = sample(base, 100, 1);
    EvaluationResult ev = evaluate_shots(zero, dem, 3, 1, *inner);
    EXPECT_EQ(ev.shots, 100u);
    EXPECT_EQ(ev.failures, 0u);
    EXPECT_EQ(ev.decoder_calls, 100 * window_count(dem.num_rounds, 3, 1));

    ShotBatch b = sample(circuit, 200, 9);
    ev = evaluate_shots(b, dem, 3, 1, *inner);
    SlidingWindowDecoder sw(dem, 3, 1, *inner);
    size_t failures = 0;
    for (size_t s = 0; s < b.shots(); s++) {
        BitVec truth(dem.obs.rows());
        for (uint32_t o : b.observables.row(s)) {
            truth.set(o);
        }
        bool fail = !(sw.decode(dem_detectors(b, s, dem)) == truth);
        failures += fail;
        EXPECT_EQ(ev.failed[s], fail);
    }
    EXPECT_EQ(ev.failures, failures);
    EXPECT_GT(ev.tau_avg(), 0.0);
}

// A data error at the start of a window together with a measurement error on one of its checks. The
// first round alone is explained by one mechanism, so single-shot decoding commits that lower-weight
// pattern; a five-round window commits a two-mechanism explanation of the same detectors.
TEST(SlidingWindow, SpaceTimeErrorNeedsTheWindow) {
    CssCode code = surface13();
    DetectorErrorModel dem = phenomenological_dem(code, 4, 0.01);
    auto inner = make_decoder("bp-osd", bp_osd(10, 1));
    SlidingWindowDecoder single(dem, 1, 1, *inner), wide(dem, 5, 3, *inner);
    BitMatrix ht = dem.h.transpose();
    auto first_round = [&](uint32_t j) { return dem.round_of[ht.row(j).front()]; };
    size_t instances = 0;
    for (uint32_t a = 0; a < ht.rows(); a++) {
        const auto &ra = ht.row(a);
        if (ra.size() != 2 || column_round_span(dem, a) != 0 || first_round(a) != 0) {
            continue;
        }
        for (uint32_t b = 0; b < ht.rows(); b++) {
            const auto &rb = ht.row(b);
            if (column_round_span(dem, b) != 1 || first_round(b) != 0 || rb.front() != ra.front()) {
                continue;
            }
            instances++;
            BitVec det(dem.num_detectors());
            for (uint32_t r : ra) det.flip(r);
            for (uint32_t r : rb) det.flip(r);
            BitVec c1, c5;
            single.decode(det, nullptr, &c1);
            wide.decode(det, nullptr, &c5);
            size_t round0_single = 0;
            for (uint32_t j : c1.ones()) round0_single += first_round(j) == 0;
            EXPECT_EQ(round0_single, 1u);
            EXPECT_EQ(c5.popcount(), 2u);
            EXPECT_EQ(mul(dem.h, c5), det);
            EXPECT_GE(c1.popcount(), c5.popcount());
        }
    }
    EXPECT_GT(instances, 0u);
}
