#include "qldpc/decoders.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace qldpc {

namespace {

thread_local size_t message_updates = 0;

constexpr double kMaxLlr = 60.0;

double clamp_llr(double x) { return std::clamp(x, -kMaxLlr, kMaxLlr); }

double prior_llr(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("decoder: priors must lie in (0, 1)");
    }
    return std::log((1.0 - p) / p);
}

bool satisfies(const std::vector<BitVec> &columns, const BitVec &error, const BitVec &syndrome) {
    BitVec s(syndrome.size());
    for (uint32_t j : error.ones()) {
        s ^= columns[j];
    }
    return s == syndrome;
}

std::vector<BitVec> column_bits(const BitMatrix &h) {
    BitMatrix ht = h.transpose();
    std::vector<BitVec> cols;
    cols.reserve(h.cols());
    for (size_t j = 0; j < h.cols(); j++) {
        cols.push_back(BitVec::from_ones(h.rows(), ht.row(j)));
    }
    return cols;
}

}  // namespace

BpDecoder::BpDecoder(const BitMatrix &h, std::vector<double> priors, BpConfig cfg)
    : rows_(h.rows()), cols_(h.cols()), cfg_(cfg) {
    if (priors.size() != cols_) {
        throw std::invalid_argument("bp: prior count does not match column count");
    }
    if (cfg_.max_iter < 1) {
        throw std::invalid_argument("bp: max_iter must be >= 1");
    }
    for (double p : priors) {
        llr_.push_back(prior_llr(p));
    }
    check_start_.push_back(0);
    std::vector<uint32_t> degree(cols_, 0);
    for (size_t r = 0; r < rows_; r++) {
        for (uint32_t j : h.row(r)) {
            var_of_edge_.push_back(j);
            degree[j]++;
        }
        check_start_.push_back(static_cast<uint32_t>(var_of_edge_.size()));
    }
    var_start_.assign(cols_ + 1, 0);
    for (size_t j = 0; j < cols_; j++) {
        var_start_[j + 1] = var_start_[j] + degree[j];
    }
    edges_of_var_.resize(var_of_edge_.size());
    std::vector<uint32_t> fill(var_start_.begin(), var_start_.end() - 1);
    for (uint32_t e = 0; e < var_of_edge_.size(); e++) {
        edges_of_var_[fill[var_of_edge_[e]]++] = e;
    }
}

size_t BpDecoder::last_message_updates() { return message_updates; }

DecodeResult BpDecoder::decode(const BitVec &syndrome) const {
    if (syndrome.size() != rows_) {
        throw std::invalid_argument("bp: syndrome length does not match row count");
    }
    message_updates = 0;
    size_t ne = var_of_edge_.size();
    std::vector<double> v2c(ne), c2v(ne, 0.0), total(llr_);
    for (size_t e = 0; e < ne; e++) {
        v2c[e] = llr_[var_of_edge_[e]];
    }
    DecodeResult res;
    res.error = BitVec(cols_);
    auto hard_decision_ok = [&]() {
        res.error.clear();
        for (size_t j = 0; j < cols_; j++) {
            if (total[j] < 0.0) {
                res.error.set(j);
            }
        }
        for (size_t r = 0; r < rows_; r++) {
            bool parity = false;
            for (uint32_t e = check_start_[r]; e < check_start_[r + 1]; e++) {
                parity ^= res.error.get(var_of_edge_[e]);
            }
            if (parity != syndrome.get(r)) {
                return false;
            }
        }
        return true;
    };
    bool ok = hard_decision_ok();
    size_t it = 0;
    std::vector<double> prefix, work;
    while (!(ok && cfg_.early_stop) && it < cfg_.max_iter) {
        it++;
        for (size_t r = 0; r < rows_; r++) {
            uint32_t b = check_start_[r], end = check_start_[r + 1];
            size_t deg = end - b;
            double sign = syndrome.get(r) ? -1.0 : 1.0;
            if (cfg_.variant == BpConfig::Variant::SumProduct) {
                // Leave-one-out products of tanh(m / 2) via prefix and suffix products.
                work.resize(deg);
                prefix.resize(deg + 1);
                prefix[0] = 1.0;
                for (size_t k = 0; k < deg; k++) {
                    double m = v2c[b + k];
                    double e = std::exp(-std::fabs(m));
                    double t = (1.0 - e) / (1.0 + e);
                    work[k] = m < 0.0 ? -t : t;
                    prefix[k + 1] = prefix[k] * work[k];
                }
                double suffix = 1.0;
                for (size_t k = deg; k-- > 0;) {
                    double prod = prefix[k] * suffix;
                    // 2 atanh(prod), saturated at the LLR clamp.
                    double out = prod >= 1.0 ? kMaxLlr
                                 : prod <= -1.0 ? -kMaxLlr
                                                : std::log((1.0 + prod) / (1.0 - prod));
                    c2v[b + k] = clamp_llr(sign * out);
                    suffix *= work[k];
                }
            } else {
                double min1 = INFINITY, min2 = INFINITY;
                size_t arg = 0;
                double sgn = sign;
                for (size_t k = 0; k < deg; k++) {
                    double m = v2c[b + k];
                    double a = std::fabs(m);
                    if (m < 0.0) {
                        sgn = -sgn;
                    }
                    if (a < min1) {
                        min2 = min1;
                        min1 = a;
                        arg = k;
                    } else if (a < min2) {
                        min2 = a;
                    }
                }
                for (size_t k = 0; k < deg; k++) {
                    double m = v2c[b + k];
                    double s = m < 0.0 ? -sgn : sgn;
                    c2v[b + k] = s * cfg_.min_sum_factor * (k == arg ? min2 : min1);
                }
            }
        }
        for (size_t j = 0; j < cols_; j++) {
            double t = llr_[j];
            for (uint32_t k = var_start_[j]; k < var_start_[j + 1]; k++) {
                t += c2v[edges_of_var_[k]];
            }
            total[j] = t;
            for (uint32_t k = var_start_[j]; k < var_start_[j + 1]; k++) {
                uint32_t e = edges_of_var_[k];
                v2c[e] = clamp_llr(t - c2v[e]);
            }
        }
        message_updates += 2 * ne;
        ok = hard_decision_ok();
    }
    res.iterations = it;
    res.bp_converged = ok;
    res.converged = ok;
    res.posteriors.resize(cols_);
    for (size_t j = 0; j < cols_; j++) {
        res.posteriors[j] = 1.0 / (1.0 + std::exp(total[j]));
    }
    return res;
}

DecodeResult bp_decode(const BitMatrix &h, const std::vector<double> &priors, const BitVec &syndrome,
                       const BpConfig &cfg) {
    return BpDecoder(h, priors, cfg).decode(syndrome);
}

OsdDecoder::OsdDecoder(const BitMatrix &h, std::vector<double> priors, OsdConfig cfg)
    : rows_(h.rows()), cfg_(cfg), columns_(column_bits(h)) {
    if (priors.size() != h.cols()) {
        throw std::invalid_argument("osd: prior count does not match column count");
    }
    for (double p : priors) {
        cost_.push_back(prior_llr(p));
    }
}

BitVec OsdDecoder::decode(const std::vector<double> &posteriors, const BitVec &syndrome) const {
    size_t n = columns_.size();
    if (posteriors.size() != n || syndrome.size() != rows_) {
        throw std::invalid_argument("osd: size mismatch");
    }
    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return posteriors[a] > posteriors[b]; });

    // Incremental elimination in column order. basis[k] is a reduced combination of pivot columns
    // with leading row pivot_row[k]; combo[k] records which pivots (by index) it sums.
    std::vector<BitVec> basis, combo;
    std::vector<uint32_t> pivot_row, pivot_col;
    std::vector<uint32_t> free_cols;
    std::vector<BitVec> free_combo;
    size_t want_free = cfg_.order;
    auto reduce = [&](BitVec &v, BitVec &c) {
        for (size_t k = 0; k < basis.size(); k++) {
            if (v.get(pivot_row[k])) {
                v ^= basis[k];
                c ^= combo[k];
            }
        }
    };
    for (uint32_t j : order) {
        if (basis.size() == rows_ && free_cols.size() >= want_free) {
            break;
        }
        if (!columns_[j].any()) {
            continue;
        }
        BitVec v = columns_[j];
        BitVec c(rows_);
        reduce(v, c);
        if (v.any()) {
            if (basis.size() == rows_) {
                throw std::logic_error("osd: rank exceeds row count");
            }
            c.set(basis.size());
            pivot_row.push_back(v.ones().front());
            pivot_col.push_back(j);
            basis.push_back(std::move(v));
            combo.push_back(std::move(c));
        } else if (free_cols.size() < want_free) {
            free_cols.push_back(j);
            free_combo.push_back(std::move(c));
        }
    }
    BitVec s = syndrome;
    BitVec e_piv(rows_);
    reduce(s, e_piv);
    if (s.any()) {
        throw std::invalid_argument("osd: syndrome is not in the column space");
    }
    auto cost_of = [&](const BitVec &piv) {
        double c = 0.0;
        for (uint32_t k : piv.ones()) {
            c += cost_[pivot_col[k]];
        }
        return c;
    };
    BitVec best_piv = e_piv;
    double best_cost = cost_of(e_piv);
    int best_a = -1, best_b = -1;
    for (size_t a = 0; a < free_cols.size(); a++) {
        BitVec t = e_piv ^ free_combo[a];
        double c = cost_of(t) + cost_[free_cols[a]];
        if (c < best_cost) {
            best_cost = c;
            best_piv = t;
            best_a = static_cast<int>(a);
            best_b = -1;
        }
    }
    for (size_t a = 0; a < free_cols.size(); a++) {
        BitVec ta = e_piv ^ free_combo[a];
        for (size_t b = a + 1; b < free_cols.size(); b++) {
            BitVec t = ta ^ free_combo[b];
            double c = cost_of(t) + cost_[free_cols[a]] + cost_[free_cols[b]];
            if (c < best_cost) {
                best_cost = c;
                best_piv = t;
                best_a = static_cast<int>(a);
                best_b = static_cast<int>(b);
            }
        }
    }
    BitVec e(n);
    for (uint32_t k : best_piv.ones()) {
        e.flip(pivot_col[k]);
    }
    if (best_a >= 0) {
        e.flip(free_cols[best_a]);
    }
    if (best_b >= 0) {
        e.flip(free_cols[best_b]);
    }
    if (!satisfies(columns_, e, syndrome)) {
        throw std::logic_error("osd: output violates the syndrome equation");
    }
    return e;
}

BitVec osd_postprocess(const BitMatrix &h, const std::vector<double> &priors, const std::vector<double> &posteriors,
                       const BitVec &syndrome, const OsdConfig &cfg) {
    return OsdDecoder(h, priors, cfg).decode(posteriors, syndrome);
}

namespace {

class PreparedBp : public PreparedDecoder {
   public:
    PreparedBp(const BitMatrix &h, const std::vector<double> &priors, const BpConfig &cfg) : bp_(h, priors, cfg) {}
    DecodeResult decode(const BitVec &syndrome) const override { return bp_.decode(syndrome); }

   private:
    BpDecoder bp_;
};

class PreparedBpOsd : public PreparedDecoder {
   public:
    PreparedBpOsd(const BitMatrix &h, const std::vector<double> &priors, const DecoderConfig &cfg)
        : bp_(h, priors, cfg.bp), osd_(h, priors, cfg.osd) {}
    DecodeResult decode(const BitVec &syndrome) const override {
        DecodeResult r = bp_.decode(syndrome);
        if (!r.bp_converged) {
            r.error = osd_.decode(r.posteriors, syndrome);
            r.converged = true;
        }
        return r;
    }

   private:
    BpDecoder bp_;
    OsdDecoder osd_;
};

class BpInner : public InnerDecoder {
   public:
    explicit BpInner(const DecoderConfig &cfg) : cfg_(cfg) {}
    std::string name() const override { return "bp"; }
    std::unique_ptr<PreparedDecoder> prepare(const BitMatrix &h, const std::vector<double> &priors) const override {
        return std::make_unique<PreparedBp>(h, priors, cfg_.bp);
    }

   private:
    DecoderConfig cfg_;
};

class BpOsdInner : public InnerDecoder {
   public:
    explicit BpOsdInner(const DecoderConfig &cfg) : cfg_(cfg) {}
    std::string name() const override { return "bp-osd"; }
    std::unique_ptr<PreparedDecoder> prepare(const BitMatrix &h, const std::vector<double> &priors) const override {
        return std::make_unique<PreparedBpOsd>(h, priors, cfg_);
    }

   private:
    DecoderConfig cfg_;
};

std::mutex registry_mutex;

std::map<std::string, DecoderFactory> &registry() {
    static std::map<std::string, DecoderFactory> r = {
        {"bp", [](const DecoderConfig &c) { return std::make_unique<BpInner>(c); }},
        {"bp-osd", [](const DecoderConfig &c) { return std::make_unique<BpOsdInner>(c); }},
    };
    return r;
}

}  // namespace

void register_decoder(const std::string &name, DecoderFactory factory) {
    std::lock_guard lock(registry_mutex);
    registry()[name] = std::move(factory);
}

std::unique_ptr<InnerDecoder> make_decoder(const std::string &name, const DecoderConfig &cfg) {
    std::lock_guard lock(registry_mutex);
    auto it = registry().find(name);
    if (it == registry().end()) {
        throw std::invalid_argument("unknown decoder '" + name + "'");
    }
    return it->second(cfg);
}

std::vector<std::string> decoder_names() {
    std::lock_guard lock(registry_mutex);
    std::vector<std::string> names;
    for (const auto &[name, f] : registry()) {
        names.push_back(name);
    }
    return names;
}

SlidingWindowDecoder::SlidingWindowDecoder(const DetectorErrorModel &dem, size_t W, size_t F,
                                           const InnerDecoder &inner)
    : rows_(dem.num_detectors()), cols_(dem.num_mechanisms()), num_obs_(dem.obs.rows()), col_rows_(dem.h.transpose()),
      col_obs_(dem.obs.transpose()) {
    size_t n = window_count(dem.num_rounds, W, F);
    for (size_t w = 1; w <= n; w++) {
        Window win;
        win.slice = window_slice(dem, w, W, F);
        win.decoder = inner.prepare(win.slice.sub_h, win.slice.sub_priors);
        windows_.push_back(std::move(win));
    }
}

BitVec SlidingWindowDecoder::decode(const BitVec &detectors, WindowStats *stats, BitVec *committed) const {
    if (detectors.size() != rows_) {
        throw std::invalid_argument("sliding window: detector vector length does not match the DEM");
    }
    BitVec residual = detectors;
    BitVec flips(num_obs_);
    if (committed) {
        *committed = BitVec(cols_);
    }
    for (const auto &win : windows_) {
        const WindowSlice &ws = win.slice;
        BitVec syn(ws.end_row - ws.first_row);
        for (size_t r = ws.first_row; r < ws.end_row; r++) {
            if (residual.get(r)) {
                syn.set(r - ws.first_row);
            }
        }
        auto t0 = std::chrono::steady_clock::now();
        DecodeResult res = win.decoder->decode(syn);
        if (stats) {
            stats->calls++;
            stats->seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        for (uint32_t local : ws.commit_columns) {
            if (!res.error.get(local)) {
                continue;
            }
            uint32_t j = ws.column_map[local];
            if (committed) {
                committed->flip(j);
            }
            for (uint32_t r : col_rows_.row(j)) {
                residual.flip(r);
            }
            for (uint32_t o : col_obs_.row(j)) {
                flips.flip(o);
            }
        }
    }
    return flips;
}

BitVec sliding_window_decode(const DetectorErrorModel &dem, const BitVec &detectors, size_t W, size_t F,
                             const InnerDecoder &inner) {
    return SlidingWindowDecoder(dem, W, F, inner).decode(detectors);
}

BitVec decode_whole(const DetectorErrorModel &dem, const BitVec &detectors, const InnerDecoder &inner) {
    auto dec = inner.prepare(dem.h, dem.priors);
    DecodeResult res = dec->decode(detectors);
    return mul(dem.obs, res.error);
}

BitVec dem_detectors(const ShotBatch &batch, size_t shot, const DetectorErrorModel &dem) {
    BitVec d(dem.num_detectors());
    for (uint32_t x : batch.detectors.row(shot)) {
        if (x >= dem.first_detector && x < dem.first_detector + dem.num_detectors()) {
            d.set(x - dem.first_detector);
        }
    }
    return d;
}

EvaluationResult evaluate_shots(const ShotBatch &batch, const DetectorErrorModel &dem, size_t W, size_t F,
                                const InnerDecoder &inner) {
    if (batch.observables.cols() != dem.obs.rows()) {
        throw std::invalid_argument("evaluate_shots: observable count mismatch");
    }
    if (dem.first_detector + dem.num_detectors() > batch.detectors.cols()) {
        throw std::invalid_argument("evaluate_shots: DEM rows exceed the shot detector count");
    }
    SlidingWindowDecoder dec(dem, W, F, inner);
    EvaluationResult out;
    out.shots = batch.shots();
    out.failed.assign(out.shots, 0);
    WindowStats stats;
    for (size_t s = 0; s < out.shots; s++) {
        BitVec pred = dec.decode(dem_detectors(batch, s, dem), &stats);
        BitVec truth = BitVec::from_ones(dem.obs.rows(), batch.observables.row(s));
        if (pred != truth) {
            out.failed[s] = 1;
            out.failures++;
        }
    }
    out.decoder_calls = stats.calls;
    out.decoder_seconds = stats.seconds;
    return out;
}

}  // namespace qldpc
