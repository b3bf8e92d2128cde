#include "qldpc/experiment.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include "json.hpp"
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qldpc/classical_ldpc.h"
#include "qldpc/pauli_sim.h"
#include "qldpc/rng.h"

namespace qldpc {

double lfr(double p_l, size_t rounds) {
    if (!(p_l >= 0.0 && p_l <= 1.0) || rounds < 1) {
        throw std::invalid_argument("lfr: need 0 <= p_L <= 1 and T >= 1");
    }
    return 1.0 - std::pow(1.0 - p_l, 1.0 / static_cast<double>(rounds));
}

double lfr_inverse(double x, size_t rounds) {
    if (!(x >= 0.0 && x <= 1.0) || rounds < 1) {
        throw std::invalid_argument("lfr_inverse: need 0 <= x <= 1 and T >= 1");
    }
    return 1.0 - std::pow(1.0 - x, static_cast<double>(rounds));
}

std::pair<double, double> wilson_interval(size_t failures, size_t shots, double z) {
    if (shots == 0 || failures > shots) {
        throw std::invalid_argument("wilson_interval: need 0 <= failures <= shots and shots > 0");
    }
    double n = static_cast<double>(shots);
    double ph = static_cast<double>(failures) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (ph + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
    double lo = failures == 0 ? 0.0 : std::max(0.0, center - half);
    double hi = failures == shots ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

namespace {

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
        size_t a = cur.find_first_not_of(" \t");
        size_t b = cur.find_last_not_of(" \t");
        if (a != std::string::npos) {
            out.push_back(cur.substr(a, b - a + 1));
        }
    }
    return out;
}

size_t to_size(const std::string &key, const std::string &v) {
    size_t pos = 0;
    unsigned long long x = 0;
    try {
        x = std::stoull(v, &pos);
    } catch (const std::exception &) {
        pos = 0;
    }
    if (pos != v.size() || v.empty() || v[0] == '-') {
        throw std::invalid_argument("config: " + key + " expects a non-negative integer, got '" + v + "'");
    }
    return static_cast<size_t>(x);
}

double to_double(const std::string &key, const std::string &v) {
    size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception &) {
        pos = 0;
    }
    if (pos != v.size() || v.empty()) {
        throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
    }
    return x;
}

bool to_bool(const std::string &key, const std::string &v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "0" || v == "false" || v == "no" || v == "off") {
        return false;
    }
    throw std::invalid_argument("config: " + key + " expects a boolean, got '" + v + "'");
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

const char *dem_mode_name(DemMode m) { return m == DemMode::Circuit ? "circuit" : "phenomenological"; }

void ExperimentConfig::set(const std::string &key, const std::string &v) {
    if (key == "code.family") {
        if (v != "hgp" && v != "rep" && v != "qlp" && v != "bpc" && v != "bundle") {
            throw std::invalid_argument("config: unknown code family '" + v + "'");
        }
        code.family = v;
    } else if (key == "code.classical_n") {
        code.classical_n = to_size(key, v);
    } else if (key == "code.classical_seed") {
        code.classical_seed = to_size(key, v);
    } else if (key == "code.classical_pool") {
        code.classical_pool = to_size(key, v);
    } else if (key == "code.rep_length") {
        code.rep_length = to_size(key, v);
    } else if (key == "code.lift_size") {
        code.lift_size = to_size(key, v);
    } else if (key == "code.bpc_q") {
        code.bpc_q = to_size(key, v);
    } else if (key == "code.bundle") {
        code.bundle = v;
    } else if (key == "schedule.attempts") {
        schedule.attempts = to_size(key, v);
    } else if (key == "schedule.seed") {
        schedule.seed = to_size(key, v);
    } else if (key == "schedule.coloring") {
        if (v == "konig") {
            schedule.coloring = ColoringMethod::Konig;
        } else if (v == "greedy") {
            schedule.coloring = ColoringMethod::Greedy;
        } else {
            throw std::invalid_argument("config: schedule.coloring must be konig or greedy");
        }
    } else if (key == "schedule.sign_mode") {
        if (v == "shared") {
            schedule.sign_mode = SignMode::Shared;
        } else if (v == "independent") {
            schedule.sign_mode = SignMode::Independent;
        } else {
            throw std::invalid_argument("config: schedule.sign_mode must be shared or independent");
        }
    } else if (key == "schedule.target_depth") {
        schedule.target_depth = to_size(key, v);
    } else if (key == "noise.p") {
        p.clear();
        for (const auto &item : split(v, ',')) {
            double x = to_double(key, item);
            if (!(x >= 0.0 && x < 1.0)) {
                throw std::invalid_argument("config: noise.p values must lie in [0, 1)");
            }
            p.push_back(x);
        }
        if (p.empty()) {
            throw std::invalid_argument("config: noise.p is empty");
        }
    } else if (key == "noise.idle") {
        noise.idle = to_double(key, v);
    } else if (key == "noise.cx") {
        noise.cx = to_double(key, v);
    } else if (key == "noise.reset") {
        noise.reset = to_double(key, v);
    } else if (key == "noise.measure") {
        noise.measure = to_double(key, v);
    } else if (key == "noise.syndrome_idle") {
        noise.syndrome_idle = to_bool(key, v);
    } else if (key == "noise.data_idle_reset_measure") {
        noise.data_idle_reset_measure = to_bool(key, v);
    } else if (key == "decoder.name") {
        decoder = v;
    } else if (key == "decoder.max_iter") {
        decoder_config.bp.max_iter = to_size(key, v);
    } else if (key == "decoder.variant") {
        if (v == "sum-product") {
            decoder_config.bp.variant = BpConfig::Variant::SumProduct;
        } else if (v == "min-sum") {
            decoder_config.bp.variant = BpConfig::Variant::MinSum;
        } else {
            throw std::invalid_argument("config: decoder.variant must be sum-product or min-sum");
        }
    } else if (key == "decoder.min_sum_factor") {
        decoder_config.bp.min_sum_factor = to_double(key, v);
    } else if (key == "decoder.osd_order") {
        decoder_config.osd.order = to_size(key, v);
    } else if (key == "decoder.window") {
        window = to_size(key, v);
    } else if (key == "decoder.offset") {
        offset = to_size(key, v);
    } else if (key == "decoder.dem") {
        if (v == "circuit") {
            dem_mode = DemMode::Circuit;
        } else if (v == "phenomenological") {
            dem_mode = DemMode::Phenomenological;
        } else {
            throw std::invalid_argument("config: decoder.dem must be circuit or phenomenological");
        }
    } else if (key == "run.rounds") {
        rounds = to_size(key, v);
    } else if (key == "run.shots") {
        shots = to_size(key, v);
    } else if (key == "run.target_rel_ci") {
        target_rel_ci = to_double(key, v);
    } else if (key == "run.max_shots") {
        max_shots = to_size(key, v);
    } else if (key == "run.seed") {
        seed = to_size(key, v);
    } else if (key == "run.output") {
        output = v;
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

ExperimentConfig ExperimentConfig::from_ini(const std::string &path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error &e) {
        throw std::invalid_argument("config: " + std::string(e.what()));
    }
    ExperimentConfig cfg;
    for (const auto &[section, body] : tree) {
        if (body.empty()) {
            throw std::invalid_argument("config: key '" + section + "' is outside a section");
        }
        for (const auto &[key, value] : body) {
            // Inline comments after ';' or '#'.
            std::string v = value.get_value<std::string>();
            v = v.substr(0, v.find_first_of(";#"));
            v.erase(v.find_last_not_of(" \t") + 1);
            cfg.set(section + "." + key, v);
        }
    }
    return cfg;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
    std::string plist;
    for (size_t i = 0; i < p.size(); i++) {
        plist += (i ? "," : "") + fmt(p[i]);
    }
    return {
        {"code.family", code.family},
        {"code.classical_n", std::to_string(code.classical_n)},
        {"code.classical_seed", std::to_string(code.classical_seed)},
        {"code.classical_pool", std::to_string(code.classical_pool)},
        {"code.rep_length", std::to_string(code.rep_length)},
        {"code.lift_size", std::to_string(code.lift_size)},
        {"code.bpc_q", std::to_string(code.bpc_q)},
        {"code.bundle", code.bundle},
        {"schedule.attempts", std::to_string(schedule.attempts)},
        {"schedule.seed", std::to_string(schedule.seed)},
        {"schedule.coloring", schedule.coloring == ColoringMethod::Konig ? "konig" : "greedy"},
        {"schedule.sign_mode", schedule.sign_mode == SignMode::Shared ? "shared" : "independent"},
        {"schedule.target_depth", std::to_string(schedule.target_depth)},
        {"noise.p", plist},
        {"noise.idle", fmt(noise.idle)},
        {"noise.cx", fmt(noise.cx)},
        {"noise.reset", fmt(noise.reset)},
        {"noise.measure", fmt(noise.measure)},
        {"noise.syndrome_idle", noise.syndrome_idle ? "true" : "false"},
        {"noise.data_idle_reset_measure", noise.data_idle_reset_measure ? "true" : "false"},
        {"decoder.name", decoder},
        {"decoder.max_iter", std::to_string(decoder_config.bp.max_iter)},
        {"decoder.variant", decoder_config.bp.variant == BpConfig::Variant::SumProduct ? "sum-product" : "min-sum"},
        {"decoder.min_sum_factor", fmt(decoder_config.bp.min_sum_factor)},
        {"decoder.osd_order", std::to_string(decoder_config.osd.order)},
        {"decoder.window", std::to_string(window)},
        {"decoder.offset", std::to_string(offset)},
        {"decoder.dem", dem_mode_name(dem_mode)},
        {"run.rounds", std::to_string(rounds)},
        {"run.shots", std::to_string(shots)},
        {"run.target_rel_ci", fmt(target_rel_ci)},
        {"run.max_shots", std::to_string(max_shots)},
        {"run.seed", std::to_string(seed)},
        {"run.output", output},
    };
}

CssCode build_code(const CodeConfig &cfg) {
    if (cfg.family == "hgp") {
        GenerationOptions opt;
        opt.pool_size = cfg.classical_pool;
        ClassicalCode c = generate_regular(cfg.classical_n, 3, 4, 6, cfg.classical_seed, opt);
        return hgp(c.h, c.h);
    }
    if (cfg.family == "rep") {
        if (cfg.rep_length < 2) {
            throw std::invalid_argument("build_code: rep_length must be >= 2");
        }
        std::vector<std::vector<uint32_t>> rows;
        for (uint32_t i = 0; i + 1 < cfg.rep_length; i++) {
            rows.push_back({i, i + 1});
        }
        BitMatrix h = BitMatrix::from_rows(cfg.rep_length, rows);
        return hgp(h, h);
    }
    if (cfg.family == "qlp") {
        MonomialMatrix b = qlp_base_matrix(cfg.lift_size);
        return qlp(b, b);
    }
    if (cfg.family == "bpc") {
        auto [p1, p2] = bpc_polynomials(cfg.bpc_q);
        return bpc(p1, p2, cfg.bpc_q);
    }
    if (cfg.family == "bundle") {
        return load_bundle(cfg.bundle);
    }
    throw std::invalid_argument("build_code: unknown family '" + cfg.family + "'");
}

DepthSearch build_schedule_for(const CssCode &code, const ScheduleConfig &cfg) {
    DepthSearch ds = cfg.target_depth
                         ? schedule_with_depth(code, cfg.target_depth, cfg.attempts, cfg.seed, cfg.sign_mode, cfg.coloring)
                         : minimize_depth(code, cfg.attempts, cfg.seed, cfg.sign_mode, cfg.coloring);
    ScheduleCheck check = verify_schedule(code, ds.tanner, ds.schedule);
    if (!check.ok()) {
        std::string msg = "schedule verification failed";
        for (const auto &f : check.failures) {
            msg += "; " + f;
        }
        throw std::logic_error(msg);
    }
    return ds;
}

namespace {

std::string code_label(const CssCode &code) {
    return code.family + "[[" + std::to_string(code.n) + "," + std::to_string(code.k) + "]]";
}

DetectorErrorModel dem_for(const ExperimentConfig &cfg, DemMode mode, const CssCode &code, const Circuit &noisy,
                           double p) {
    if (mode == DemMode::Circuit) {
        return build_dem(noisy).z;
    }
    DetectorErrorModel dem = phenomenological_dem(code, cfg.rounds, p, Basis::Z);
    dem.first_detector = noisy.first_detector_of(Basis::Z);
    return dem;
}

void fill_stats(RunRow &row, size_t rounds, const EvaluationResult &ev) {
    row.shots = ev.shots;
    row.failures = ev.failures;
    row.p_l = static_cast<double>(ev.failures) / static_cast<double>(ev.shots);
    row.lfr = lfr(row.p_l, rounds);
    auto [lo, hi] = wilson_interval(ev.failures, ev.shots);
    row.ci_lo = lfr(lo, rounds);
    row.ci_hi = lfr(hi, rounds);
    row.tau_avg = ev.tau_avg();
    row.decoder_calls = ev.decoder_calls;
}

void merge_eval(EvaluationResult &acc, const EvaluationResult &ev) {
    acc.shots += ev.shots;
    acc.failures += ev.failures;
    acc.decoder_calls += ev.decoder_calls;
    acc.decoder_seconds += ev.decoder_seconds;
    acc.failed.insert(acc.failed.end(), ev.failed.begin(), ev.failed.end());
}

void check_config(const ExperimentConfig &cfg) {
    if (cfg.rounds < 1) {
        throw std::invalid_argument("config: run.rounds must be >= 1");
    }
    if (cfg.shots < 1) {
        throw std::invalid_argument("config: run.shots must be >= 1");
    }
    if (cfg.p.empty()) {
        throw std::invalid_argument("config: noise.p is empty");
    }
}

}  // namespace

RunResult run_memory(const ExperimentConfig &cfg) {
    check_config(cfg);
    CssCode code = build_code(cfg.code);
    DepthSearch ds = build_schedule_for(code, cfg.schedule);
    Circuit base = build_memory_experiment(code, ds.schedule, cfg.rounds, Basis::Z);
    auto inner = make_decoder(cfg.decoder, cfg.decoder_config);
    RunResult out;
    out.code_label = code_label(code);
    out.n = code.n;
    out.k = code.k;
    out.depth = ds.schedule.depth();
    for (size_t pi = 0; pi < cfg.p.size(); pi++) {
        double p = cfg.p[pi];
        NoiseSpec noise = cfg.noise;
        noise.p = p;
        Circuit noisy = attach_noise(base, noise);
        DetectorErrorModel dem = dem_for(cfg, cfg.dem_mode, code, noisy, p);
        EvaluationResult acc;
        for (size_t batch = 0;; batch++) {
            ShotBatch shots = sample(noisy, cfg.shots, derive_seed(cfg.seed, pi, batch));
            merge_eval(acc, evaluate_shots(shots, dem, cfg.window, cfg.offset, *inner));
            if (cfg.target_rel_ci <= 0.0 || acc.shots + cfg.shots > cfg.max_shots) {
                break;
            }
            if (acc.failures > 0) {
                auto [lo, hi] = wilson_interval(acc.failures, acc.shots);
                double pl = static_cast<double>(acc.failures) / static_cast<double>(acc.shots);
                if ((hi - lo) / 2.0 <= cfg.target_rel_ci * pl) {
                    break;
                }
            }
        }
        RunRow row;
        row.p = p;
        fill_stats(row, cfg.rounds, acc);
        row.windows = window_count(dem.num_rounds, cfg.window, cfg.offset);
        row.depth = out.depth;
        row.mechanisms = dem.num_mechanisms();
        row.W = cfg.window;
        row.F = cfg.offset;
        row.max_iter = cfg.decoder_config.bp.max_iter;
        row.osd_order = cfg.decoder_config.osd.order;
        row.dem_mode = cfg.dem_mode;
        out.rows.push_back(row);
    }
    return out;
}

std::vector<TradeoffPoint> parse_grid(const std::string &text) {
    std::vector<TradeoffPoint> grid;
    for (const auto &item : split(text, ';')) {
        auto f = split(item, ',');
        if (f.size() != 4 && f.size() != 5) {
            throw std::invalid_argument("grid: expected W,F,I,O[,phen] in '" + item + "'");
        }
        TradeoffPoint pt;
        pt.W = to_size("grid W", f[0]);
        pt.F = to_size("grid F", f[1]);
        pt.max_iter = to_size("grid I", f[2]);
        pt.osd_order = to_size("grid O", f[3]);
        if (f.size() == 5) {
            if (f[4] == "phen" || f[4] == "phenomenological") {
                pt.dem_mode = DemMode::Phenomenological;
            } else if (f[4] != "circuit") {
                throw std::invalid_argument("grid: DEM mode must be circuit or phen");
            }
        }
        grid.push_back(pt);
    }
    if (grid.empty()) {
        throw std::invalid_argument("grid: empty");
    }
    return grid;
}

RunResult run_tradeoff(const ExperimentConfig &cfg, const std::vector<TradeoffPoint> &grid) {
    check_config(cfg);
    if (grid.empty()) {
        throw std::invalid_argument("run_tradeoff: grid is empty");
    }
    CssCode code = build_code(cfg.code);
    DepthSearch ds = build_schedule_for(code, cfg.schedule);
    Circuit base = build_memory_experiment(code, ds.schedule, cfg.rounds, Basis::Z);
    RunResult out;
    out.code_label = code_label(code);
    out.n = code.n;
    out.k = code.k;
    out.depth = ds.schedule.depth();
    for (size_t pi = 0; pi < cfg.p.size(); pi++) {
        double p = cfg.p[pi];
        NoiseSpec noise = cfg.noise;
        noise.p = p;
        Circuit noisy = attach_noise(base, noise);
        ShotBatch shots = sample(noisy, cfg.shots, derive_seed(cfg.seed, pi, 0));
        DetectorErrorModel circuit_dem = build_dem(noisy).z;
        DetectorErrorModel phen_dem = dem_for(cfg, DemMode::Phenomenological, code, noisy, p);
        for (const auto &pt : grid) {
            DecoderConfig dc = cfg.decoder_config;
            dc.bp.max_iter = pt.max_iter;
            dc.osd.order = pt.osd_order;
            auto inner = make_decoder(cfg.decoder, dc);
            const DetectorErrorModel &dem = pt.dem_mode == DemMode::Circuit ? circuit_dem : phen_dem;
            EvaluationResult ev = evaluate_shots(shots, dem, pt.W, pt.F, *inner);
            RunRow row;
            row.p = p;
            fill_stats(row, cfg.rounds, ev);
            row.windows = window_count(dem.num_rounds, pt.W, pt.F);
            row.depth = out.depth;
            row.mechanisms = dem.num_mechanisms();
            row.W = pt.W;
            row.F = pt.F;
            row.max_iter = pt.max_iter;
            row.osd_order = pt.osd_order;
            row.dem_mode = pt.dem_mode;
            out.rows.push_back(row);
        }
    }
    return out;
}

void write_csv(const RunResult &r, std::ostream &out) {
    out << "p,shots,failures,p_l,lfr,ci_lo,ci_hi,tau_avg_s,windows,depth,decoder_calls,mechanisms,W,F,I,O,dem\n";
    for (const auto &row : r.rows) {
        out << fmt(row.p) << "," << row.shots << "," << row.failures << "," << fmt(row.p_l) << "," << fmt(row.lfr)
            << "," << fmt(row.ci_lo) << "," << fmt(row.ci_hi) << "," << fmt(row.tau_avg) << "," << row.windows << ","
            << row.depth << "," << row.decoder_calls << "," << row.mechanisms << "," << row.W << "," << row.F << ","
            << row.max_iter << "," << row.osd_order << "," << dem_mode_name(row.dem_mode) << "\n";
    }
}

std::string summary_json(const ExperimentConfig &cfg, const RunResult &r) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json config;
    for (const auto &[k, v] : cfg.entries()) {
        config[k] = v;
    }
    j["config"] = config;
    j["code"] = r.code_label;
    j["n"] = r.n;
    j["k"] = r.k;
    j["depth"] = r.depth;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto &row : r.rows) {
        rows.push_back({{"p", row.p},
                        {"shots", row.shots},
                        {"failures", row.failures},
                        {"p_l", row.p_l},
                        {"lfr", row.lfr},
                        {"ci95", {row.ci_lo, row.ci_hi}},
                        {"tau_avg_s", row.tau_avg},
                        {"windows", row.windows},
                        {"decoder_calls", row.decoder_calls},
                        {"mechanisms", row.mechanisms},
                        {"W", row.W},
                        {"F", row.F},
                        {"I", row.max_iter},
                        {"O", row.osd_order},
                        {"dem", dem_mode_name(row.dem_mode)}});
    }
    j["rows"] = rows;
    return j.dump(2);
}

}  // namespace qldpc
