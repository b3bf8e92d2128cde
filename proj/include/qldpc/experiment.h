#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qldpc/circuit.h"
#include "qldpc/codes.h"
#include "qldpc/decoders.h"
#include "qldpc/dem.h"
#include "qldpc/scheduler.h"

namespace qldpc {

/// Per-round failure rate 1 - (1 - p_L)^(1/T).
double lfr(double p_l, size_t rounds);
/// Inverse of lfr: 1 - (1 - x)^T.
double lfr_inverse(double x, size_t rounds);

/// Wilson score interval for a binomial proportion (default 95%).
std::pair<double, double> wilson_interval(size_t failures, size_t shots, double z = 1.959963984540054);

struct CodeConfig {
    /// "hgp" (two copies of a random (3,4)-regular girth-6 classical code), "rep" (repetition-code HGP),
    /// "qlp", "bpc" or "bundle".
    std::string family = "hgp";
    size_t classical_n = 12;
    uint64_t classical_seed = 0;
    size_t classical_pool = 100;
    size_t rep_length = 3;
    size_t lift_size = 16;
    size_t bpc_q = 4;
    std::string bundle;
};

struct ScheduleConfig {
    size_t attempts = 1000;
    uint64_t seed = 1;
    ColoringMethod coloring = ColoringMethod::Konig;
    SignMode sign_mode = SignMode::Shared;
    /// 0 keeps the minimum depth; otherwise the first attempt with exactly this depth.
    size_t target_depth = 0;
};

enum class DemMode { Circuit, Phenomenological };

struct ExperimentConfig {
    CodeConfig code;
    ScheduleConfig schedule;
    size_t rounds = 16;
    std::vector<double> p = {1e-3};
    NoiseSpec noise;
    size_t shots = 1000;
    /// When > 0, shots grow in batches of `shots` until the Wilson interval's half-width relative to p_L
    /// is at most this value, or max_shots is reached.
    double target_rel_ci = 0.0;
    size_t max_shots = 1000000;
    size_t window = 5;
    size_t offset = 3;
    std::string decoder = "bp-osd";
    DecoderConfig decoder_config;
    DemMode dem_mode = DemMode::Circuit;
    uint64_t seed = 0;
    std::string output;

    /// Key-value file with sections [code], [schedule], [noise], [decoder], [run]; see README.
    static ExperimentConfig from_ini(const std::string &path);
    /// Applies one "section.key=value" override.
    void set(const std::string &dotted_key, const std::string &value);
    /// Every field as "section.key=value" lines, defaults included.
    std::vector<std::pair<std::string, std::string>> entries() const;
};

struct RunRow {
    double p = 0.0;
    size_t shots = 0;
    size_t failures = 0;
    double p_l = 0.0;
    double lfr = 0.0;
    double ci_lo = 0.0;  // LFR scale
    double ci_hi = 0.0;
    double tau_avg = 0.0;
    size_t windows = 0;
    size_t depth = 0;
    size_t decoder_calls = 0;
    size_t mechanisms = 0;
    size_t W = 0, F = 0, max_iter = 0, osd_order = 0;
    DemMode dem_mode = DemMode::Circuit;
};

struct RunResult {
    std::string code_label;
    size_t n = 0, k = 0;
    size_t depth = 0;
    std::vector<RunRow> rows;
};

CssCode build_code(const CodeConfig &cfg);
DepthSearch build_schedule_for(const CssCode &code, const ScheduleConfig &cfg);

/// code -> schedule -> noisy circuit -> DEM + samples -> sliding-window decoding -> statistics, per p.
RunResult run_memory(const ExperimentConfig &cfg);

struct TradeoffPoint {
    size_t W = 5, F = 3, max_iter = 10, osd_order = 1;
    DemMode dem_mode = DemMode::Circuit;
};

/// Decodes one fixed shot batch per p with every grid point, so rows are paired comparisons.
RunResult run_tradeoff(const ExperimentConfig &cfg, const std::vector<TradeoffPoint> &grid);

/// Parses "W,F,I,O[,phen]" items separated by ';'.
std::vector<TradeoffPoint> parse_grid(const std::string &text);

const char *dem_mode_name(DemMode m);

/// CSV with header p,shots,failures,p_l,lfr,ci_lo,ci_hi,tau_avg_s,windows,depth,decoder_calls,mechanisms,W,F,I,O,dem.
void write_csv(const RunResult &r, std::ostream &out);
/// JSON summary: configuration entries plus the rows.
std::string summary_json(const ExperimentConfig &cfg, const RunResult &r);

}  // namespace qldpc
