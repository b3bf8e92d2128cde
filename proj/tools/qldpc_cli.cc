// Command-line front end: gen-code, schedule, build-dem, sample, decode, run, tradeoff, distance.
// Exit codes: 0 success, 1 bad input, 2 invariant violation.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qldpc/circuit.h"
#include "qldpc/codes.h"
#include "qldpc/decoders.h"
#include "qldpc/dem.h"
#include "qldpc/distance.h"
#include "qldpc/experiment.h"
#include "qldpc/pauli_sim.h"
#include "qldpc/scheduler.h"

using namespace qldpc;
using json = nlohmann::ordered_json;

namespace {

struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

struct ConfigFlags {
    std::string config;
    std::vector<std::string> sets;
    std::string family, bundle, p, dem, decoder;
    size_t rounds = 0, shots = 0, window = 0, offset = 0, max_iter = 0, attempts = 0;
    int osd_order = -1;
    int64_t seed = -1;
    double target_rel_ci = -1.0;

    void add(CLI::App *cmd) {
        cmd->add_option("--config", config, "INI file with [code] [schedule] [noise] [decoder] [run]");
        cmd->add_option("--set", sets, "Override section.key=value (repeatable)");
        cmd->add_option("--family", family, "hgp | rep | qlp | bpc | bundle");
        cmd->add_option("--bundle", bundle, "Code bundle directory (family bundle)");
        cmd->add_option("--p", p, "Comma-separated physical error rates");
        cmd->add_option("--rounds,-T", rounds, "Syndrome rounds");
        cmd->add_option("--shots", shots, "Shots (per batch when --target-rel-ci is set)");
        cmd->add_option("--target-rel-ci", target_rel_ci, "Relative CI half-width target");
        cmd->add_option("--window,-W", window, "Window size W");
        cmd->add_option("--offset,-F", offset, "Window offset F");
        cmd->add_option("--decoder", decoder, "Inner decoder name");
        cmd->add_option("--max-iter", max_iter, "BP iterations");
        cmd->add_option("--osd-order", osd_order, "OSD-CS order");
        cmd->add_option("--dem", dem, "circuit | phenomenological");
        cmd->add_option("--attempts", attempts, "Scheduling attempts");
        cmd->add_option("--seed", seed, "Master seed");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg = config.empty() ? ExperimentConfig{} : ExperimentConfig::from_ini(config);
        for (const auto &s : sets) {
            size_t eq = s.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("--set expects section.key=value, got '" + s + "'");
            }
            cfg.set(s.substr(0, eq), s.substr(eq + 1));
        }
        if (!bundle.empty()) {
            cfg.set("code.family", "bundle");
            cfg.set("code.bundle", bundle);
        }
        if (!family.empty()) cfg.set("code.family", family);
        if (!p.empty()) cfg.set("noise.p", p);
        if (rounds) cfg.set("run.rounds", std::to_string(rounds));
        if (shots) cfg.set("run.shots", std::to_string(shots));
        if (target_rel_ci >= 0.0) cfg.target_rel_ci = target_rel_ci;
        if (window) cfg.set("decoder.window", std::to_string(window));
        if (offset) cfg.set("decoder.offset", std::to_string(offset));
        if (!decoder.empty()) cfg.set("decoder.name", decoder);
        if (max_iter) cfg.set("decoder.max_iter", std::to_string(max_iter));
        if (osd_order >= 0) cfg.set("decoder.osd_order", std::to_string(osd_order));
        if (!dem.empty()) cfg.set("decoder.dem", dem);
        if (attempts) cfg.set("schedule.attempts", std::to_string(attempts));
        if (seed >= 0) cfg.set("run.seed", std::to_string(seed));
        return cfg;
    }
};

std::ofstream open_out(const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::invalid_argument("cannot write " + path);
    }
    return out;
}

std::ifstream open_in(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("cannot read " + path);
    }
    return in;
}

// CSV to <prefix>.csv and JSON to <prefix>.json, or CSV on stdout and JSON on stderr.
void emit(const std::string &prefix, const std::string &csv, const json &summary) {
    if (prefix.empty()) {
        std::cout << csv;
        std::cerr << summary.dump(2) << "\n";
        return;
    }
    open_out(prefix + ".csv") << csv;
    open_out(prefix + ".json") << summary.dump(2) << "\n";
}

json config_json(const ExperimentConfig &cfg) {
    json j;
    for (const auto &[k, v] : cfg.entries()) {
        j[k] = v;
    }
    return j;
}

void require(bool ok, const std::string &what) {
    if (!ok) {
        throw InvariantViolation(what);
    }
}

void check_code(const CssCode &code) {
    CssReport rep = validate_css(code);
    std::string msg = "CSS validation failed";
    for (const auto &f : rep.failures) {
        msg += "; " + f;
    }
    require(rep.ok, msg);
}

std::vector<size_t> weights(const BitMatrix &m, bool rows) {
    std::vector<size_t> w = rows ? m.row_weights() : m.col_weights();
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
    return w;
}

Schedule load_schedule(const std::string &path, const CssCode &code) {
    auto in = open_in(path);
    Schedule s = Schedule::read_text(in);
    std::vector<std::string> failures;
    bool ok = check_deterministic(code, s, &failures);
    std::string msg = "schedule is not deterministic";
    for (const auto &f : failures) {
        msg += "; " + f;
    }
    require(ok, msg);
    return s;
}

Circuit load_circuit(const std::string &path) {
    auto in = open_in(path);
    return Circuit::read_text(in);
}

DetectorErrorModel load_dem(const std::string &path) {
    auto in = open_in(path);
    return DetectorErrorModel::read_text(in);
}

std::string csv_of_run(const RunResult &r) {
    std::ostringstream os;
    write_csv(r, os);
    return os.str();
}

void check_run(const RunResult &r) {
    for (const auto &row : r.rows) {
        require(row.lfr >= 0.0 && row.lfr <= 1.0, "LFR outside [0, 1]");
        require(row.ci_lo <= row.lfr && row.lfr <= row.ci_hi, "confidence interval does not bracket the LFR");
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qldpc: QLDPC code construction, scheduling, simulation and sliding-window decoding"};
    app.require_subcommand(1);

    ConfigFlags gen_flags;
    std::string gen_out;
    auto *gen = app.add_subcommand("gen-code", "Build a code and save it as a bundle directory");
    gen_flags.add(gen);
    gen->add_option("--out", gen_out, "Bundle directory")->required();

    ConfigFlags sched_flags;
    std::string sched_out, sched_prefix;
    auto *sched = app.add_subcommand("schedule", "Depth-minimized syndrome-extraction schedule");
    sched_flags.add(sched);
    sched->add_option("--out", sched_out, "Schedule text file")->required();
    sched->add_option("--output", sched_prefix, "Prefix for the depth histogram CSV and JSON summary");

    ConfigFlags dem_flags;
    std::string dem_schedule, dem_circuit_out, dem_stim_out, dem_out_z, dem_out_x, dem_prefix;
    auto *bdem = app.add_subcommand("build-dem", "Noisy memory circuit and its detector error models");
    dem_flags.add(bdem);
    bdem->add_option("--schedule", dem_schedule, "Schedule file (default: run minimize_depth)");
    bdem->add_option("--circuit-out", dem_circuit_out, "Noisy circuit text file")->required();
    bdem->add_option("--stim-out", dem_stim_out, "Optional stim-format circuit");
    bdem->add_option("--dem-z", dem_out_z, "Z-detector DEM file")->required();
    bdem->add_option("--dem-x", dem_out_x, "X-detector DEM file");
    bdem->add_option("--output", dem_prefix, "Prefix for the per-round CSV and JSON summary");

    std::string sample_circuit, sample_out;
    size_t sample_shots = 1000;
    uint64_t sample_seed = 0;
    auto *samp = app.add_subcommand("sample", "Sample detector and observable bits from a noisy circuit");
    samp->add_option("--circuit", sample_circuit, "Noisy circuit text file")->required();
    samp->add_option("--shots", sample_shots, "Shots");
    samp->add_option("--seed", sample_seed, "Seed");
    samp->add_option("--out", sample_out, "Shot file")->required();

    std::string dec_dem, dec_shots, dec_name = "bp-osd", dec_prefix, dec_variant;
    size_t dec_W = 5, dec_F = 3, dec_iter = 10, dec_order = 1;
    auto *dec = app.add_subcommand("decode", "Sliding-window decode a shot file against a DEM");
    dec->add_option("--dem", dec_dem, "DEM file")->required();
    dec->add_option("--shots", dec_shots, "Shot file")->required();
    dec->add_option("--window,-W", dec_W, "Window size W");
    dec->add_option("--offset,-F", dec_F, "Window offset F");
    dec->add_option("--decoder", dec_name, "Inner decoder name");
    dec->add_option("--max-iter", dec_iter, "BP iterations");
    dec->add_option("--osd-order", dec_order, "OSD-CS order");
    dec->add_option("--variant", dec_variant, "sum-product | min-sum");
    dec->add_option("--output", dec_prefix, "Prefix for the per-shot CSV and JSON summary");

    ConfigFlags run_flags;
    std::string run_prefix;
    auto *run = app.add_subcommand("run", "Memory experiment: LFR per physical error rate");
    run_flags.add(run);
    run->add_option("--output", run_prefix, "Prefix for CSV and JSON (overrides run.output)");

    ConfigFlags trade_flags;
    std::string trade_grid = "5,3,10,1", trade_prefix;
    auto *trade = app.add_subcommand("tradeoff", "Decoder settings grid on fixed shot batches");
    trade_flags.add(trade);
    trade->add_option("--grid", trade_grid, "Items W,F,I,O[,phen] separated by ';'");
    trade->add_option("--output", trade_prefix, "Prefix for CSV and JSON (overrides run.output)");

    ConfigFlags dist_flags;
    std::string dist_mode = "code", dist_prefix;
    size_t dist_trials = 2000, dist_target = 0;
    double dist_budget = 0.0;
    auto *dist = app.add_subcommand("distance", "Randomized minimum-weight logical search");
    dist_flags.add(dist);
    dist->add_option("--mode", dist_mode, "code | circuit")->check(CLI::IsMember({"code", "circuit"}));
    dist->add_option("--trials", dist_trials, "Search trials");
    dist->add_option("--time-budget", dist_budget, "Seconds (0 = unlimited)");
    dist->add_option("--target-weight", dist_target, "Stop at this weight (circuit mode)");
    dist->add_option("--output", dist_prefix, "Prefix for CSV and JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    try {
        if (*gen) {
            ExperimentConfig cfg = gen_flags.resolve();
            CssCode code = build_code(cfg.code);
            check_code(code);
            save_bundle(code, gen_out);
            json j;
            j["family"] = code.family;
            j["n"] = code.n;
            j["k"] = code.k;
            j["hx_rows"] = code.hx.rows();
            j["hz_rows"] = code.hz.rows();
            j["hx_row_weights"] = weights(code.hx, true);
            j["hx_col_weights"] = weights(code.hx, false);
            j["hz_row_weights"] = weights(code.hz, true);
            j["hz_col_weights"] = weights(code.hz, false);
            j["bundle"] = gen_out;
            j["config"] = config_json(cfg);
            std::cout << j.dump(2) << "\n";
        } else if (*sched) {
            ExperimentConfig cfg = sched_flags.resolve();
            CssCode code = build_code(cfg.code);
            check_code(code);
            DepthSearch ds = build_schedule_for(code, cfg.schedule);
            auto out = open_out(sched_out);
            ds.schedule.write_text(out);
            std::ostringstream csv;
            csv << "depth,attempts,fraction\n";
            size_t total = 0;
            for (const auto &[d, c] : ds.histogram) {
                total += c;
            }
            json hist = json::object();
            for (const auto &[d, c] : ds.histogram) {
                csv << d << "," << c << "," << static_cast<double>(c) / static_cast<double>(total) << "\n";
                hist[std::to_string(d)] = c;
            }
            json j;
            j["n"] = code.n;
            j["k"] = code.k;
            j["depth"] = ds.schedule.depth();
            j["best_attempt"] = ds.best_attempt;
            j["histogram"] = hist;
            j["config"] = config_json(cfg);
            emit(sched_prefix, csv.str(), j);
        } else if (*bdem) {
            ExperimentConfig cfg = dem_flags.resolve();
            CssCode code = build_code(cfg.code);
            check_code(code);
            Schedule schedule =
                dem_schedule.empty() ? build_schedule_for(code, cfg.schedule).schedule : load_schedule(dem_schedule, code);
            if (cfg.p.size() != 1) {
                throw std::invalid_argument("build-dem takes exactly one p");
            }
            NoiseSpec noise = cfg.noise;
            noise.p = cfg.p[0];
            Circuit noisy = attach_noise(build_memory_experiment(code, schedule, cfg.rounds, Basis::Z), noise);
            {
                auto out = open_out(dem_circuit_out);
                noisy.write_text(out);
            }
            if (!dem_stim_out.empty()) {
                auto out = open_out(dem_stim_out);
                noisy.write_stim(out);
            }
            DemPair dems = build_dem(noisy);
            if (cfg.dem_mode == DemMode::Phenomenological) {
                dems.z = phenomenological_dem(code, cfg.rounds, cfg.p[0], Basis::Z);
                dems.z.first_detector = noisy.first_detector_of(Basis::Z);
                dems.x = phenomenological_dem(code, cfg.rounds, cfg.p[0], Basis::X);
                dems.x.first_detector = noisy.first_detector_of(Basis::X);
            }
            size_t max_span = 0;
            for (size_t j = 0; j < dems.z.num_mechanisms(); j++) {
                max_span = std::max(max_span, column_round_span(dems.z, j));
            }
            if (cfg.dem_mode == DemMode::Circuit) {
                require(max_span <= 1, "a DEM column spans more than two consecutive detector rounds");
            }
            {
                auto out = open_out(dem_out_z);
                dems.z.write_text(out);
            }
            if (!dem_out_x.empty()) {
                auto out = open_out(dem_out_x);
                dems.x.write_text(out);
            }
            std::ostringstream csv;
            csv << "round,detectors,mechanisms_starting\n";
            std::vector<size_t> starting(dems.z.num_rounds, 0);
            BitMatrix ht = dems.z.h.transpose();
            for (size_t j = 0; j < ht.rows(); j++) {
                if (!ht.row(j).empty()) {
                    starting[dems.z.round_of[ht.row(j).front()]]++;
                }
            }
            for (size_t t = 0; t < dems.z.num_rounds; t++) {
                csv << t << "," << dems.z.detectors_per_round << "," << starting[t] << "\n";
            }
            json j;
            j["n"] = code.n;
            j["k"] = code.k;
            j["depth"] = schedule.depth();
            j["qubits"] = noisy.num_qubits();
            j["measurements"] = noisy.num_measurements();
            j["detectors"] = noisy.detectors.size();
            j["noise_locations"] = noisy.num_noise_locations();
            j["dem_mode"] = dem_mode_name(cfg.dem_mode);
            j["z_dem"] = {{"rows", dems.z.num_detectors()}, {"columns", dems.z.num_mechanisms()}, {"max_round_span", max_span}};
            j["x_dem"] = {{"rows", dems.x.num_detectors()}, {"columns", dems.x.num_mechanisms()}};
            j["config"] = config_json(cfg);
            emit(dem_prefix, csv.str(), j);
        } else if (*samp) {
            Circuit c = load_circuit(sample_circuit);
            auto t0 = std::chrono::steady_clock::now();
            ShotBatch batch = sample(c, sample_shots, sample_seed);
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            auto out = open_out(sample_out);
            batch.write(out);
            size_t fired = 0;
            for (size_t s = 0; s < batch.shots(); s++) {
                fired += batch.detectors.row(s).size();
            }
            json j;
            j["shots"] = batch.shots();
            j["detectors"] = batch.detectors.cols();
            j["observables"] = batch.observables.cols();
            j["mean_fired_detectors"] = batch.shots() ? static_cast<double>(fired) / static_cast<double>(batch.shots()) : 0.0;
            j["seconds"] = secs;
            j["seed"] = sample_seed;
            std::cout << j.dump(2) << "\n";
        } else if (*dec) {
            DetectorErrorModel dem = load_dem(dec_dem);
            ShotBatch batch;
            {
                auto in = open_in(dec_shots);
                batch = ShotBatch::read(in);
            }
            require(batch.detectors.cols() >= dem.first_detector + dem.num_detectors(), "shot file has too few detectors");
            require(batch.observables.cols() == dem.obs.rows(), "observable count differs between shots and DEM");
            DecoderConfig dc;
            dc.bp.max_iter = dec_iter;
            dc.osd.order = dec_order;
            if (dec_variant == "min-sum") {
                dc.bp.variant = BpConfig::Variant::MinSum;
            } else if (!dec_variant.empty() && dec_variant != "sum-product") {
                throw std::invalid_argument("--variant must be sum-product or min-sum");
            }
            auto inner = make_decoder(dec_name, dc);
            EvaluationResult ev = evaluate_shots(batch, dem, dec_W, dec_F, *inner);
            std::ostringstream csv;
            csv << "shot,failed\n";
            for (size_t s = 0; s < ev.failed.size(); s++) {
                csv << s << "," << int(ev.failed[s]) << "\n";
            }
            auto [lo, hi] = wilson_interval(ev.failures, ev.shots);
            json j;
            j["shots"] = ev.shots;
            j["failures"] = ev.failures;
            j["p_l"] = static_cast<double>(ev.failures) / static_cast<double>(ev.shots);
            j["lfr"] = lfr(static_cast<double>(ev.failures) / static_cast<double>(ev.shots), dem.num_rounds - 1);
            j["p_l_ci95"] = {lo, hi};
            j["windows"] = window_count(dem.num_rounds, dec_W, dec_F);
            j["decoder_calls"] = ev.decoder_calls;
            j["tau_avg_s"] = ev.tau_avg();
            j["W"] = dec_W;
            j["F"] = dec_F;
            j["decoder"] = dec_name;
            j["I"] = dec_iter;
            j["O"] = dec_order;
            emit(dec_prefix, csv.str(), j);
        } else if (*run) {
            ExperimentConfig cfg = run_flags.resolve();
            if (!run_prefix.empty()) cfg.output = run_prefix;
            RunResult r = run_memory(cfg);
            check_run(r);
            emit(cfg.output, csv_of_run(r), json::parse(summary_json(cfg, r)));
        } else if (*trade) {
            ExperimentConfig cfg = trade_flags.resolve();
            if (!trade_prefix.empty()) cfg.output = trade_prefix;
            RunResult r = run_tradeoff(cfg, parse_grid(trade_grid));
            check_run(r);
            json j = json::parse(summary_json(cfg, r));
            j["grid"] = trade_grid;
            emit(cfg.output, csv_of_run(r), j);
        } else if (*dist) {
            ExperimentConfig cfg = dist_flags.resolve();
            CssCode code = build_code(cfg.code);
            check_code(code);
            DistanceReport rep;
            json j;
            if (dist_mode == "code") {
                // Z-type logicals commute with the X checks and anticommute with some X logical.
                DistanceReport rz = min_weight_logical(code.hx, code.lx, dist_trials, cfg.seed);
                DistanceReport rx = min_weight_logical(code.hz, code.lz, dist_trials, cfg.seed + 1);
                require(rz.found && verify_logical_witness(code.hx, code.lx, rz.witness), "Z-logical witness failed verification");
                require(rx.found && verify_logical_witness(code.hz, code.lz, rx.witness), "X-logical witness failed verification");
                rep = rz.weight <= rx.weight ? rz : rx;
                j["d_z"] = rz.weight;
                j["d_x"] = rx.weight;
            } else {
                if (cfg.p.size() != 1) {
                    throw std::invalid_argument("circuit distance takes exactly one p");
                }
                DepthSearch ds = build_schedule_for(code, cfg.schedule);
                NoiseSpec noise = cfg.noise;
                noise.p = cfg.p[0];
                Circuit noisy = attach_noise(build_memory_experiment(code, ds.schedule, cfg.rounds, Basis::Z), noise);
                DetectorErrorModel dem = build_dem(noisy).z;
                CircuitDistanceOptions opt;
                opt.trials = dist_trials;
                opt.seed = cfg.seed;
                opt.time_budget = dist_budget;
                opt.target_weight = dist_target;
                rep = circuit_distance_upper_bound(dem, noisy, opt);
                require(rep.found, "no verified circuit-level logical found");
                j["depth"] = ds.schedule.depth();
                j["mechanisms"] = dem.num_mechanisms();
            }
            std::ostringstream csv;
            csv << "element,index,location\n";
            for (size_t i = 0; i < rep.witness.size(); i++) {
                csv << i << "," << rep.witness[i] << ","
                    << (i < rep.annotations.size() ? "\"" + rep.annotations[i] + "\"" : std::string()) << "\n";
            }
            j["mode"] = dist_mode;
            j["n"] = code.n;
            j["k"] = code.k;
            j["weight"] = rep.weight;
            j["witness"] = rep.witness;
            j["trials"] = rep.trials;
            j["seconds"] = rep.seconds;
            j["config"] = config_json(cfg);
            emit(dist_prefix, csv.str(), j);
        }
    } catch (const std::logic_error &e) {
        if (dynamic_cast<const std::invalid_argument *>(&e)) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
