#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "helpers.h"
#include "qldpc/circuit.h"
#include "qldpc/dem.h"
#include "qldpc/pauli_sim.h"
#include "qldpc/scheduler.h"

using namespace qldpc;
using namespace qldpc::testing;

namespace {

Circuit surface_memory(size_t rounds) {
    CssCode code = surface13();
    DepthSearch ds = minimize_depth(code, 5, 1);
    return build_memory_experiment(code, ds.schedule, rounds, Basis::Z);
}

// Flattened index of the first noise op of `gate` in the first layer of `kind` and `round`.
std::pair<uint32_t, const Instruction *> find_noise(const Circuit &c, LayerKind kind, uint32_t round, Gate gate,
                                                    uint32_t qubit, uint32_t *slot) {
    for (const NoiseSite &s : noise_sites(c)) {
        const Layer &layer = c.layers[s.layer];
        const Instruction &op = layer.ops[s.op];
        if (layer.kind != kind || layer.round != round || op.gate != gate) {
            continue;
        }
        for (uint32_t k = 0; k < op.targets.size(); k++) {
            if (op.targets[k] == qubit) {
                *slot = k;
                return {s.instruction, &op};
            }
        }
    }
    return {0, nullptr};
}

std::vector<uint32_t> fired(const ShotBatch &b, size_t shot) {
    return std::vector<uint32_t>(b.detectors.row(shot).begin(), b.detectors.row(shot).end());
}

}  // namespace

TEST(PauliFrame, CnotConjugation) {
    Instruction cx{Gate::CX, 0.0, {0, 1}};
    PauliFrame f(2);
    f.x.set(0);
    f.apply(cx);
    EXPECT_TRUE(f.x.get(0));
    EXPECT_TRUE(f.x.get(1));
    PauliFrame g(2);
    g.z.set(0);
    g.apply(cx);
    EXPECT_TRUE(g.z.get(0));
    EXPECT_FALSE(g.z.get(1));
    EXPECT_FALSE(g.x.any());
    PauliFrame h(2);
    h.z.set(1);
    h.apply(cx);
    EXPECT_TRUE(h.z.get(0));
    EXPECT_TRUE(h.z.get(1));
}

TEST(PauliFrame, MeasurementRecordsFlips) {
    PauliFrame f(2);
    f.x.set(0);
    f.z.set(1);
    std::vector<uint8_t> rec;
    f.apply(Instruction{Gate::MZ, 0.0, {0}}, &rec);
    f.apply(Instruction{Gate::MX, 0.0, {1}}, &rec);
    EXPECT_EQ(rec, (std::vector<uint8_t>{1, 1}));
    f.apply(Instruction{Gate::MZ, 0.0, {1}}, &rec);
    EXPECT_EQ(rec.back(), 0);
    f.apply(Instruction{Gate::RZ, 0.0, {0}});
    f.apply(Instruction{Gate::RX, 0.0, {1}});
    EXPECT_FALSE(f.x.get(0));
    EXPECT_FALSE(f.z.get(1));
}

TEST(Circuit, DetectorCounts) {
    CssCode code = surface13();
    Circuit c1 = surface_memory(1);
    EXPECT_EQ(c1.num_detectors_of(Basis::Z), 2 * code.hz.rows());
    EXPECT_EQ(c1.num_detectors_of(Basis::X), 0u);
    EXPECT_EQ(c1.first_detector_of(Basis::Z), 0u);
    Circuit c16 = surface_memory(16);
    EXPECT_EQ(c16.num_detectors_of(Basis::Z), 17 * code.hz.rows());
    EXPECT_EQ(c16.num_detectors_of(Basis::X), 15 * code.hx.rows());
    EXPECT_EQ(c16.num_observables(), 1u);
    EXPECT_EQ(c16.num_measurements(), 16 * (code.hz.rows() + code.hx.rows()) + code.n);
    EXPECT_THROW(surface_memory(0), std::invalid_argument);
}

TEST(Circuit, NoiseProbabilitiesAndStableLocationCount) {
    Circuit base = surface_memory(2);
    Circuit noisy = attach_noise(base, 1.5e-3);
    for (const Layer &layer : noisy.layers) {
        for (const Instruction &op : layer.ops) {
            if (is_noise(op.gate)) {
                EXPECT_DOUBLE_EQ(op.p, 1.5e-3);
                EXPECT_NE(layer.kind, LayerKind::DataInit);
                EXPECT_NE(layer.kind, LayerKind::DataReadout);
            }
        }
    }
    EXPECT_THROW(attach_noise(noisy, 1e-3), std::invalid_argument);
    size_t n1 = attach_noise(surface_memory(1), 1e-3).num_noise_locations();
    size_t n2 = noisy.num_noise_locations();
    size_t n3 = attach_noise(surface_memory(3), 1e-3).num_noise_locations();
    EXPECT_EQ(n2 - n1, n3 - n2);
    EXPECT_EQ(n1, n2 - n1);
    EXPECT_EQ(attach_noise(surface_memory(2), 1.5e-3), noisy);

    NoiseSpec quiet;
    quiet.p = 1e-3;
    quiet.syndrome_idle = false;
    quiet.data_idle_reset_measure = false;
    EXPECT_LT(attach_noise(base, quiet).num_noise_locations(), n2);
    EXPECT_THROW(attach_noise(base, 1.0), std::invalid_argument);
}

TEST(Circuit, TextRoundTripAndStimExport) {
    Circuit c = attach_noise(surface_memory(3), 2.5119e-3);
    std::stringstream ss;
    c.write_text(ss);
    EXPECT_EQ(Circuit::read_text(ss), c);

    std::stringstream stim;
    c.write_stim(stim);
    std::string line;
    size_t detectors = 0, observables = 0, dep2 = 0;
    while (std::getline(stim, line)) {
        detectors += line.rfind("DETECTOR", 0) == 0;
        observables += line.rfind("OBSERVABLE_INCLUDE", 0) == 0;
        dep2 += line.rfind("DEPOLARIZE2", 0) == 0;
    }
    EXPECT_EQ(detectors, c.num_detectors());
    EXPECT_EQ(observables, c.num_observables());
    EXPECT_GT(dep2, 0u);
}

TEST(Sample, ZeroNoiseGivesZeroBits) {
    Circuit c = attach_noise(surface_memory(4), 0.0);
    ShotBatch b = sample(c, 3000, 5);
    EXPECT_EQ(b.shots(), 3000u);
    EXPECT_TRUE(b.detectors.is_zero());
    EXPECT_TRUE(b.observables.is_zero());
}

TEST(Sample, DeterministicUnderSeed) {
    Circuit c = attach_noise(surface_memory(3), 5e-3);
    ShotBatch a = sample(c, 2500, 17);
    EXPECT_EQ(a, sample(c, 2500, 17));
    EXPECT_NE(a, sample(c, 2500, 18));
    std::stringstream ss;
    a.write(ss);
    EXPECT_EQ(ShotBatch::read(ss), a);
}

TEST(Sample, SingleChannelMarginals) {
    // Two qubits measured in Z after one channel; each detector reads one record.
    const double p = 0.15;
    const size_t shots = 40000;
    struct Case {
        Gate gate;
        double flip0, flip1, both;
    };
    // DEPOL2: X or Y on a qubit in 8 of 15 components; both flipped in 4 of 15.
    const std::vector<Case> cases = {{Gate::DEPOL2, 8.0 / 15, 8.0 / 15, 4.0 / 15},
                                     {Gate::DEPOL1, 2.0 / 3, 2.0 / 3, 4.0 / 9},
                                     {Gate::FLIP_X, 1.0, 1.0, 1.0},
                                     {Gate::FLIP_Z, 0.0, 0.0, 0.0}};
    for (const Case &cs : cases) {
        Circuit c;
        c.num_z = 2;
        c.rounds = 1;
        Layer noise{LayerKind::Cnot, 0, {Instruction{cs.gate, p, {0, 1}}}};
        Layer meas{LayerKind::Measure, 0, {Instruction{Gate::MZ, 0.0, {0, 1}}}};
        c.layers = {Layer{LayerKind::Reset, 0, {Instruction{Gate::RZ, 0.0, {0, 1}}}}, noise, meas};
        c.detectors = {Detector{Basis::Z, 0, 0, {0}}, Detector{Basis::Z, 0, 1, {1}}};
        ShotBatch b = sample(c, shots, 3);
        size_t f0 = 0, f1 = 0, both = 0;
        for (size_t s = 0; s < shots; s++) {
            bool a = b.detectors.get(s, 0), d = b.detectors.get(s, 1);
            f0 += a;
            f1 += d;
            both += a && d;
        }
        double e0 = cs.flip0 * p, e1 = cs.flip1 * p;
        // Independent single-qubit channels flip both only if each fires.
        double eb = cs.gate == Gate::DEPOL2 ? cs.both * p : e0 * e1;
        auto within = [&](size_t count, double prob) {
            double sigma = std::sqrt(prob * (1 - prob) / shots);
            return std::abs(static_cast<double>(count) / shots - prob) <= 4 * sigma + 1e-12;
        };
        EXPECT_TRUE(within(f0, e0)) << gate_name(cs.gate) << " q0 " << f0;
        EXPECT_TRUE(within(f1, e1)) << gate_name(cs.gate) << " q1 " << f1;
        EXPECT_TRUE(within(both, eb)) << gate_name(cs.gate) << " both " << both;
    }
}

TEST(Sample, MarginalsMatchDetectorErrorModel) {
    Circuit c = attach_noise(surface_memory(3), 1e-2);
    DemPair dems = build_dem(c);
    const size_t shots = 30000;
    ShotBatch b = sample(c, shots, 99);
    for (const DetectorErrorModel *dem : {&dems.z, &dems.x}) {
        std::vector<double> keep(dem->num_detectors(), 1.0);
        BitMatrix ht = dem->h.transpose();
        for (size_t j = 0; j < ht.rows(); j++) {
            for (uint32_t r : ht.row(j)) {
                keep[r] *= 1 - 2 * dem->priors[j];
            }
        }
        std::vector<size_t> counts(dem->num_detectors(), 0);
        for (size_t s = 0; s < shots; s++) {
            for (uint32_t d : b.detectors.row(s)) {
                if (d >= dem->first_detector && d < dem->first_detector + dem->num_detectors()) {
                    counts[d - dem->first_detector]++;
                }
            }
        }
        for (size_t r = 0; r < counts.size(); r++) {
            double prob = (1 - keep[r]) / 2;
            double sigma = std::sqrt(prob * (1 - prob) / shots);
            // Merged mechanisms are treated as independent, which is exact only to first order.
            EXPECT_NEAR(static_cast<double>(counts[r]) / shots, prob, 5 * sigma + 2e-3) << "row " << r;
        }
    }
}

TEST(Inject, DataErrorBeforeFirstRoundFiresItsChecksAtRoundZero) {
    CssCode code = surface13();
    Circuit c = attach_noise(surface_memory(3), 1e-3);
    for (uint32_t q = 0; q < code.n; q++) {
        uint32_t slot = 0;
        auto [instr, op] = find_noise(c, LayerKind::Reset, 1, Gate::DEPOL1, q, &slot);
        ASSERT_NE(op, nullptr);
        ShotBatch b = simulate_injections(c, {{Injection{instr, slot, 1}}});
        std::vector<uint32_t> expected;
        for (uint32_t r = 0; r < code.hz.rows(); r++) {
            if (code.hz.get(r, q)) {
                expected.push_back(r);
            }
        }
        EXPECT_EQ(fired(b, 0), expected) << "qubit " << q;
        EXPECT_EQ(b.observables.get(0, 0), code.lz.get(0, q));
    }
}

TEST(Inject, MeasurementFlipFiresConsecutiveDetectors) {
    CssCode code = surface13();
    const size_t T = 4;
    Circuit c = attach_noise(surface_memory(T), 1e-3);
    size_t mz = code.hz.rows();
    for (uint32_t t = 1; t <= T; t++) {
        for (uint32_t i = 0; i < mz; i++) {
            uint32_t slot = 0;
            // Syndrome layers count rounds from 1; detector rounds count from 0.
            auto [instr, op] = find_noise(c, LayerKind::Measure, t, Gate::FLIP_X, code.n + i, &slot);
            ASSERT_NE(op, nullptr);
            ShotBatch b = simulate_injections(c, {{Injection{instr, slot, 1}}});
            std::vector<uint32_t> expected = {static_cast<uint32_t>((t - 1) * mz + i), static_cast<uint32_t>(t * mz + i)};
            EXPECT_EQ(fired(b, 0), expected);
            EXPECT_FALSE(b.observables.get(0, 0));
        }
    }
}

TEST(Inject, RejectsNonNoiseTargets) {
    Circuit c = attach_noise(surface_memory(2), 1e-3);
    EXPECT_THROW(simulate_injections(c, {{Injection{0, 0, 1}}}), std::invalid_argument);
}

TEST(Inject, DataErrorBetweenGatesSplitsAcrossRounds) {
    CssCode code = surface13();
    Circuit c = attach_noise(surface_memory(3), 1e-3);
    size_t mz = code.hz.rows();
    size_t splits = 0;
    for (const NoiseSite &s : noise_sites(c)) {
        const Layer &layer = c.layers[s.layer];
        const Instruction &op = layer.ops[s.op];
        if (layer.kind != LayerKind::Cnot || layer.round != 2 || !(op.gate == Gate::DEPOL1 || op.gate == Gate::DEPOL2)) {
            continue;
        }
        bool pair = op.gate == Gate::DEPOL2;
        for (uint32_t k = 0; k < op.targets.size(); k++) {
            uint32_t q = op.targets[k];
            if (q >= code.n) {
                continue;
            }
            // X on the data qubit only; for pairs the second qubit's Pauli sits in bits 2-3.
            Injection inj{s.instruction, pair ? k / 2 : k, static_cast<uint8_t>(pair && k % 2 ? 4 : 1)};
            ShotBatch b = simulate_injections(c, {{inj}});
            std::set<uint32_t> now, next;
            for (uint32_t d : fired(b, 0)) {
                ASSERT_LT(d, c.num_detectors_of(Basis::Z));
                uint32_t round = d / mz;
                ASSERT_TRUE(round == 1 || round == 2) << "detector " << d;
                (round == 1 ? now : next).insert(d % mz);
            }
            std::set<uint32_t> support;
            for (uint32_t r = 0; r < mz; r++) {
                if (code.hz.get(r, q)) {
                    support.insert(r);
                }
            }
            std::set<uint32_t> both = now;
            both.insert(next.begin(), next.end());
            EXPECT_EQ(both, support);
            EXPECT_EQ(now.size() + next.size(), support.size());
            splits += !now.empty() && !next.empty();
        }
    }
    EXPECT_GT(splits, 0u);
}
