#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qldpc/dem.h"
#include "qldpc/gf2.h"
#include "qldpc/pauli_sim.h"

namespace qldpc {

struct BpConfig {
    enum class Variant { SumProduct, MinSum };
    size_t max_iter = 10;
    Variant variant = Variant::SumProduct;
    /// Scaling of check-to-variable messages in normalized min-sum.
    double min_sum_factor = 0.625;
    /// Stop at the first iteration whose hard decision satisfies the syndrome.
    bool early_stop = true;
};

struct OsdConfig {
    /// Combination-sweep size: weight-1 flips over the first `order` non-pivot columns (most likely in
    /// error first) plus all weight-2 flips among them. 0 is plain OSD-0.
    size_t order = 0;
};

struct DecodeResult {
    BitVec error;
    /// h * error == syndrome.
    bool converged = false;
    bool bp_converged = false;
    size_t iterations = 0;
    /// Posterior error probability of each column.
    std::vector<double> posteriors;
};

/// Log-domain flooding belief propagation on a fixed graph.
class BpDecoder {
   public:
    BpDecoder(const BitMatrix &h, std::vector<double> priors, BpConfig cfg);
    DecodeResult decode(const BitVec &syndrome) const;
    /// Message updates (check and variable side) performed by the last decode on this thread.
    static size_t last_message_updates();

   private:
    size_t rows_, cols_;
    std::vector<double> llr_;
    BpConfig cfg_;
    // Edges grouped by check; var_of_edge_ / check_start_ form a CSR layout.
    std::vector<uint32_t> check_start_, var_of_edge_;
    // For each variable, its edge indices.
    std::vector<uint32_t> var_start_, edges_of_var_;
};

DecodeResult bp_decode(const BitMatrix &h, const std::vector<double> &priors, const BitVec &syndrome,
                       const BpConfig &cfg);

/// Ordered-statistics post-processing on a fixed matrix.
class OsdDecoder {
   public:
    OsdDecoder(const BitMatrix &h, std::vector<double> priors, OsdConfig cfg);
    /// Throws std::invalid_argument if the syndrome is not in the column space of h.
    BitVec decode(const std::vector<double> &posteriors, const BitVec &syndrome) const;

   private:
    size_t rows_;
    std::vector<double> cost_;
    OsdConfig cfg_;
    std::vector<BitVec> columns_;
};

BitVec osd_postprocess(const BitMatrix &h, const std::vector<double> &priors, const std::vector<double> &posteriors,
                       const BitVec &syndrome, const OsdConfig &cfg);

/// Decoder bound to one matrix and prior vector. decode() is const and keeps no state between calls.
class PreparedDecoder {
   public:
    virtual ~PreparedDecoder() = default;
    virtual DecodeResult decode(const BitVec &syndrome) const = 0;
};

class InnerDecoder {
   public:
    virtual ~InnerDecoder() = default;
    virtual std::string name() const = 0;
    virtual std::unique_ptr<PreparedDecoder> prepare(const BitMatrix &h, const std::vector<double> &priors) const = 0;
};

struct DecoderConfig {
    BpConfig bp;
    OsdConfig osd;
};

using DecoderFactory = std::function<std::unique_ptr<InnerDecoder>(const DecoderConfig &)>;

/// Built-in names: "bp" and "bp-osd" (OSD runs only when BP does not converge).
void register_decoder(const std::string &name, DecoderFactory factory);
std::unique_ptr<InnerDecoder> make_decoder(const std::string &name, const DecoderConfig &cfg);
std::vector<std::string> decoder_names();

struct WindowStats {
    size_t calls = 0;
    double seconds = 0.0;
};

/// (W, F) sliding-window decoding over one detector error model. Each window decodes the residual
/// detectors of its rows; mechanisms whose first row lies in the commit rows are applied: their full
/// column is XORed out of the residual and their observable flips are accumulated.
class SlidingWindowDecoder {
   public:
    SlidingWindowDecoder(const DetectorErrorModel &dem, size_t W, size_t F, const InnerDecoder &inner);
    /// `detectors` indexes DEM rows. Returns the predicted observable flips; *committed (if given)
    /// receives the committed mechanisms.
    BitVec decode(const BitVec &detectors, WindowStats *stats = nullptr, BitVec *committed = nullptr) const;
    size_t num_windows() const { return windows_.size(); }

   private:
    struct Window {
        WindowSlice slice;
        std::unique_ptr<PreparedDecoder> decoder;
    };
    size_t rows_, cols_, num_obs_;
    std::vector<Window> windows_;
    BitMatrix col_rows_, col_obs_;
};

BitVec sliding_window_decode(const DetectorErrorModel &dem, const BitVec &detectors, size_t W, size_t F,
                             const InnerDecoder &inner);

/// One inner-decoder call on the full matrix.
BitVec decode_whole(const DetectorErrorModel &dem, const BitVec &detectors, const InnerDecoder &inner);

struct EvaluationResult {
    size_t shots = 0;
    size_t failures = 0;
    size_t decoder_calls = 0;
    double decoder_seconds = 0.0;
    std::vector<uint8_t> failed;  // per shot

    double tau_avg() const { return decoder_calls ? decoder_seconds / static_cast<double>(decoder_calls) : 0.0; }
};

/// DEM rows of one shot: the circuit detectors [first_detector, first_detector + rows).
BitVec dem_detectors(const ShotBatch &batch, size_t shot, const DetectorErrorModel &dem);

/// A shot fails when any predicted observable flip differs from the sampled one.
EvaluationResult evaluate_shots(const ShotBatch &batch, const DetectorErrorModel &dem, size_t W, size_t F,
                                const InnerDecoder &inner);

}  // namespace qldpc
