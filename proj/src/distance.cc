#include "qldpc/distance.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qldpc/circuit.h"
#include "qldpc/dem.h"
#include "qldpc/pauli_sim.h"
#include "qldpc/rng.h"

namespace qldpc {

namespace {

// Column-major view of the logical matrix: one bit vector over logical rows per code column.
std::vector<BitVec> logical_columns(const BitMatrix &logicals, size_t n) {
    std::vector<BitVec> cols(n, BitVec(logicals.rows()));
    for (size_t r = 0; r < logicals.rows(); r++) {
        for (uint32_t c : logicals.row(r)) {
            cols[c].set(r);
        }
    }
    return cols;
}

// Runs `trials` information-set trials. For each trial the columns are randomly permuted and h is
// brought to reduced echelon form. Every kernel vector with one free column (and, when `pairs` is set,
// two free columns) is a candidate; those with weight at most `*max_weight` and a nonzero logical
// signature are passed to on_hit(weight, support). on_hit may lower *max_weight to prune later work.
// Stops early once should_stop() returns true.
template <typename OnHit, typename ShouldStop>
size_t run_isd(const BitMatrix &h, const BitMatrix &logicals, size_t trials, uint64_t seed, bool pairs,
               size_t *max_weight, OnHit &&on_hit, ShouldStop &&should_stop) {
    size_t n = h.cols();
    if (logicals.rows() > 0 && logicals.cols() != n) {
        throw std::invalid_argument("min_weight_logical: logical matrix column count mismatch");
    }
    bool any_nonzero = logicals.rows() == 0;
    auto lcols = logical_columns(logicals, n);
    Rng rng(seed);
    std::vector<uint32_t> perm(n);
    std::vector<uint32_t> pos(n);
    size_t done = 0;
    for (size_t t = 0; t < trials && !should_stop(); t++) {
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (size_t i = 0; i < n; i++) {
            pos[perm[i]] = static_cast<uint32_t>(i);
        }
        DenseBitMatrix m(h.rows(), n);
        for (size_t r = 0; r < h.rows(); r++) {
            for (uint32_t c : h.row(r)) {
                m.row(r).set(pos[c]);
            }
        }
        auto pivots = m.rref();
        size_t k = pivots.size();
        std::vector<bool> is_pivot(n, false);
        for (uint32_t p : pivots) {
            is_pivot[p] = true;
        }
        // Free column f (permuted index) depends on the pivots in u[f].
        std::vector<uint32_t> free_cols;
        std::vector<int32_t> free_index(n, -1);
        for (size_t f = 0; f < n; f++) {
            if (!is_pivot[f]) {
                free_index[f] = static_cast<int32_t>(free_cols.size());
                free_cols.push_back(static_cast<uint32_t>(f));
            }
        }
        std::vector<BitVec> u(free_cols.size(), BitVec(k));
        for (size_t row = 0; row < k; row++) {
            auto words = m.row(row).words();
            for (size_t w = 0; w < words.size(); w++) {
                uint64_t bits = words[w];
                while (bits) {
                    size_t f = w * 64 + std::countr_zero(bits);
                    bits &= bits - 1;
                    if (free_index[f] >= 0) {
                        u[free_index[f]].set(row);
                    }
                }
            }
        }
        std::vector<BitVec> sig;
        if (!any_nonzero) {
            sig.reserve(free_cols.size());
            for (size_t i = 0; i < free_cols.size(); i++) {
                BitVec s = lcols[perm[free_cols[i]]];
                for (uint32_t row : u[i].ones()) {
                    s ^= lcols[perm[pivots[row]]];
                }
                sig.push_back(std::move(s));
            }
        }
        auto emit = [&](size_t weight, std::initializer_list<size_t> frees, const BitVec &dep) {
            std::vector<uint32_t> support;
            for (size_t i : frees) {
                support.push_back(perm[free_cols[i]]);
            }
            for (uint32_t row : dep.ones()) {
                support.push_back(perm[pivots[row]]);
            }
            std::sort(support.begin(), support.end());
            on_hit(weight, std::move(support));
        };
        for (size_t i = 0; i < free_cols.size(); i++) {
            size_t weight = 1 + u[i].popcount();
            if (weight > *max_weight || (!any_nonzero && !sig[i].any())) {
                continue;
            }
            emit(weight, {i}, u[i]);
        }
        if (pairs) {
            size_t words = (k + 63) / 64;
            for (size_t i = 0; i < free_cols.size(); i++) {
                auto ui = u[i].words();
                for (size_t j = i + 1; j < free_cols.size(); j++) {
                    if (*max_weight < 2) {
                        break;
                    }
                    if (!any_nonzero && sig[i] == sig[j]) {
                        continue;
                    }
                    auto uj = u[j].words();
                    size_t weight = 2;
                    for (size_t w = 0; w < words && weight <= *max_weight; w++) {
                        weight += std::popcount(ui[w] ^ uj[w]);
                    }
                    if (weight > *max_weight) {
                        continue;
                    }
                    emit(weight, {i, j}, u[i] ^ u[j]);
                }
            }
        }
        done++;
    }
    return done;
}

}  // namespace

bool verify_logical_witness(const BitMatrix &h, const BitMatrix &logicals, const std::vector<uint32_t> &witness) {
    if (witness.empty()) {
        return false;
    }
    BitVec x = BitVec::from_ones(h.cols(), witness);
    if (mul(h, x).any()) {
        return false;
    }
    if (logicals.rows() == 0) {
        return true;
    }
    return mul(logicals, x).any();
}

DistanceReport min_weight_logical(const BitMatrix &h, const BitMatrix &logicals, size_t trials, uint64_t seed) {
    if (trials < 1) {
        throw std::invalid_argument("min_weight_logical: trials must be >= 1");
    }
    auto start = std::chrono::steady_clock::now();
    DistanceReport report;
    size_t max_weight = h.cols();
    report.trials = run_isd(
        h, logicals, trials, seed, false, &max_weight,
        [&](size_t weight, std::vector<uint32_t> support) {
            if (!report.found || weight < report.weight) {
                report.found = true;
                report.weight = weight;
                report.witness = std::move(support);
                max_weight = weight - 1;
            }
        },
        [] { return false; });
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<std::vector<uint32_t>> low_weight_logicals(const BitMatrix &h, const BitMatrix &logicals, size_t trials,
                                                       uint64_t seed, size_t max_weight, size_t max_count) {
    std::set<std::vector<uint32_t>> seen;
    size_t bound = max_weight;
    run_isd(
        h, logicals, trials, seed, false, &bound,
        [&](size_t, std::vector<uint32_t> support) {
            if (seen.size() < max_count) {
                seen.insert(std::move(support));
            }
        },
        [&] { return seen.size() >= max_count; });
    std::vector<std::vector<uint32_t>> out(seen.begin(), seen.end());
    std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.size() < b.size(); });
    return out;
}

}  // namespace qldpc

namespace qldpc {

namespace {

std::string pauli_name(uint8_t pauli, bool pair) {
    const char *names = "IXZY";
    std::string s(1, names[pauli & 3]);
    if (pair) {
        s += names[(pauli >> 2) & 3];
    }
    return s;
}

}  // namespace

DistanceReport circuit_distance_upper_bound(const DetectorErrorModel &dem, const Circuit &noisy_circuit,
                                            const CircuitDistanceOptions &options) {
    if (options.trials < 1) {
        throw std::invalid_argument("circuit_distance_upper_bound: trials must be >= 1");
    }
    if (dem.faults.size() != dem.num_mechanisms()) {
        throw std::invalid_argument("circuit_distance_upper_bound: DEM has no fault list to verify against");
    }
    auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    DistanceReport report;

    auto simulator_confirms = [&](const std::vector<uint32_t> &witness) {
        std::vector<Injection> inj;
        for (uint32_t j : witness) {
            inj.push_back(dem.faults[j]);
        }
        ShotBatch b = simulate_injections(noisy_circuit, {inj});
        for (uint32_t d : b.detectors.row(0)) {
            if (d >= dem.first_detector && d < dem.first_detector + dem.num_detectors()) {
                return false;
            }
        }
        BitVec expected = mul(dem.obs, BitVec::from_ones(dem.num_mechanisms(), witness));
        return expected.any() && BitVec::from_ones(dem.obs.rows(), b.observables.row(0)) == expected;
    };
    auto offer = [&](std::vector<uint32_t> witness) {
        if (report.found && witness.size() >= report.weight) {
            return false;
        }
        if (!verify_logical_witness(dem.h, dem.obs, witness) || !simulator_confirms(witness)) {
            return false;
        }
        report.found = true;
        report.weight = witness.size();
        report.witness = std::move(witness);
        return true;
    };

    // Undetectable single mechanisms.
    BitMatrix ht = dem.h.transpose();
    BitMatrix ot = dem.obs.transpose();
    for (uint32_t j = 0; j < dem.num_mechanisms() && !(report.found && report.weight == 1); j++) {
        if (ht.row(j).empty() && !ot.row(j).empty()) {
            offer({j});
        }
    }

    // Sub-problems: mechanisms confined to two consecutive detector rounds, then the whole model.
    struct Sub {
        BitMatrix h, obs;
        std::vector<uint32_t> columns;
        uint64_t seed;
    };
    std::vector<Sub> subs;
    size_t c = dem.detectors_per_round;
    for (size_t t = 0; t + 1 < dem.num_rounds; t++) {
        std::vector<uint32_t> cols;
        for (uint32_t j = 0; j < dem.num_mechanisms(); j++) {
            const auto &rs = ht.row(j);
            if (!rs.empty() && dem.round_of[rs.front()] >= t && dem.round_of[rs.back()] <= t + 1) {
                cols.push_back(j);
            }
        }
        Sub s;
        s.h = dem.h.select_columns(cols).row_slice(t * c, (t + 2) * c);
        s.obs = dem.obs.select_columns(cols);
        s.columns = std::move(cols);
        subs.push_back(std::move(s));
    }
    {
        Sub s;
        s.columns.resize(dem.num_mechanisms());
        std::iota(s.columns.begin(), s.columns.end(), 0);
        s.h = dem.h;
        s.obs = dem.obs;
        subs.push_back(std::move(s));
    }
    for (size_t i = 0; i < subs.size(); i++) {
        subs[i].seed = derive_seed(options.seed, i);
    }

    auto should_stop = [&] {
        return (options.time_budget > 0.0 && elapsed() > options.time_budget) ||
               (options.target_weight > 0 && report.found && report.weight <= options.target_weight) ||
               (report.found && report.weight <= 1);
    };
    const size_t chunk = 8;
    size_t used = 0;
    for (size_t round = 0; used < options.trials && !should_stop(); round++) {
        for (auto &sub : subs) {
            if (used >= options.trials || should_stop()) {
                break;
            }
            size_t n = std::min(chunk, options.trials - used);
            size_t bound = report.found ? report.weight - 1 : sub.h.cols();
            used += run_isd(
                sub.h, sub.obs, n, derive_seed(sub.seed, round), true, &bound,
                [&](size_t, std::vector<uint32_t> support) {
                    std::vector<uint32_t> global;
                    for (uint32_t l : support) {
                        global.push_back(sub.columns[l]);
                    }
                    std::sort(global.begin(), global.end());
                    if (offer(std::move(global))) {
                        bound = report.weight - 1;
                    }
                },
                should_stop);
        }
    }
    report.trials = used;

    if (report.found) {
        std::vector<const Instruction *> flat;
        std::vector<const Layer *> layer_of;
        for (const auto &layer : noisy_circuit.layers) {
            for (const auto &op : layer.ops) {
                flat.push_back(&op);
                layer_of.push_back(&layer);
            }
        }
        for (uint32_t j : report.witness) {
            const Injection &f = dem.faults[j];
            const Instruction &op = *flat.at(f.instruction);
            std::ostringstream os;
            bool pair = op.gate == Gate::DEPOL2;
            os << "mechanism " << j << ": " << pauli_name(f.pauli, pair) << " from " << gate_name(op.gate) << " in "
               << layer_kind_name(layer_of[f.instruction]->kind) << " layer of round " << layer_of[f.instruction]->round
               << " on qubit";
            if (pair) {
                os << "s " << op.targets[2 * f.slot] << "," << op.targets[2 * f.slot + 1];
            } else {
                os << " " << op.targets[f.slot];
            }
            report.annotations.push_back(os.str());
        }
    }
    report.seconds = elapsed();
    return report;
}

}  // namespace qldpc
