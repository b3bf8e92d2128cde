#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qldpc/experiment.h"
#include "qldpc/pauli_sim.h"

using namespace qldpc;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.code.family = "rep";
    cfg.code.rep_length = 3;
    cfg.schedule.attempts = 5;
    cfg.rounds = 4;
    cfg.p = {5e-3, 1e-2};
    cfg.shots = 400;
    cfg.window = 3;
    cfg.offset = 2;
    cfg.decoder_config.osd.order = 1;
    cfg.seed = 11;
    return cfg;
}

}  // namespace

TEST(Statistics, Lfr) {
    EXPECT_EQ(lfr(0.0, 16), 0.0);
    EXPECT_DOUBLE_EQ(lfr(0.3, 1), 0.3);
    for (double x : {1e-6, 1e-3, 0.02, 0.3}) {
        EXPECT_NEAR(lfr(lfr_inverse(x, 16), 16), x, 1e-12);
    }
    EXPECT_THROW(lfr(1.5, 3), std::invalid_argument);
    EXPECT_THROW(lfr(0.1, 0), std::invalid_argument);
}

TEST(Statistics, WilsonInterval) {
    EXPECT_EQ(wilson_interval(0, 100).first, 0.0);
    auto [lo, hi] = wilson_interval(50, 100);
    EXPECT_LT(lo, 0.5);
    EXPECT_GT(hi, 0.5);
    EXPECT_NEAR(0.5 - lo, hi - 0.5, 1e-3);
    // Hand value: center 0.5, half-width z sqrt(0.25/100 + z^2/40000) / (1 + z^2/100).
    double z = 1.959963984540054;
    double half = z * std::sqrt(0.0025 + z * z / 40000) / (1 + z * z / 100);
    EXPECT_NEAR(hi - lo, 2 * half, 1e-12);
    auto width = [](size_t f, size_t n) {
        auto [a, b] = wilson_interval(f, n);
        return b - a;
    };
    double w1 = width(5, 10000), w4 = width(20, 40000), w16 = width(80, 160000);
    EXPECT_NEAR(w1 / w4, 2.0, 0.15);
    EXPECT_NEAR(w4 / w16, 2.0, 0.05);
    EXPECT_THROW(wilson_interval(3, 2), std::invalid_argument);
}

TEST(Config, IniOverridesAndEntries) {
    auto path = std::filesystem::temp_directory_path() / "qldpc_config_test.ini";
    {
        std::ofstream out(path);
        out << "[code]\nfamily = bpc\nbpc_q = 5\n"
            << "[schedule]\nattempts = 7   ; inline comment\ncoloring = greedy # another\n"
            << "[noise]\np = 1e-3, 2e-3\nsyndrome_idle = false\n"
            << "[decoder]\nname = bp\nmax_iter = 20\nosd_order = 10\nwindow = 4\noffset = 2\ndem = phenomenological\n"
            << "[run]\nrounds = 8\nshots = 123\nseed = 9\n";
    }
    ExperimentConfig cfg = ExperimentConfig::from_ini(path.string());
    EXPECT_EQ(cfg.code.family, "bpc");
    EXPECT_EQ(cfg.code.bpc_q, 5u);
    EXPECT_EQ(cfg.schedule.attempts, 7u);
    EXPECT_EQ(cfg.schedule.coloring, ColoringMethod::Greedy);
    EXPECT_EQ(cfg.p, (std::vector<double>{1e-3, 2e-3}));
    EXPECT_FALSE(cfg.noise.syndrome_idle);
    EXPECT_TRUE(cfg.noise.data_idle_reset_measure);
    EXPECT_EQ(cfg.decoder, "bp");
    EXPECT_EQ(cfg.decoder_config.bp.max_iter, 20u);
    EXPECT_EQ(cfg.decoder_config.osd.order, 10u);
    EXPECT_EQ(cfg.window, 4u);
    EXPECT_EQ(cfg.offset, 2u);
    EXPECT_EQ(cfg.dem_mode, DemMode::Phenomenological);
    EXPECT_EQ(cfg.rounds, 8u);
    EXPECT_EQ(cfg.shots, 123u);
    EXPECT_EQ(cfg.seed, 9u);

    ExperimentConfig copy;
    for (const auto &[k, v] : cfg.entries()) {
        copy.set(k, v);
    }
    EXPECT_EQ(copy.entries(), cfg.entries());

    EXPECT_THROW(cfg.set("run.colour", "1"), std::invalid_argument);
    EXPECT_THROW(cfg.set("run.rounds", "-3"), std::invalid_argument);
    EXPECT_THROW(cfg.set("noise.p", "1.5"), std::invalid_argument);
    EXPECT_THROW(cfg.set("decoder.dem", "other"), std::invalid_argument);
    {
        std::ofstream out(path);
        out << "[run]\nbogus = 1\n";
    }
    EXPECT_THROW(ExperimentConfig::from_ini(path.string()), std::invalid_argument);
    std::filesystem::remove(path);
}

TEST(Config, GridParsing) {
    auto g = parse_grid("5,3,10,1; 9,3,10,1,phen");
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[0].W, 5u);
    EXPECT_EQ(g[0].dem_mode, DemMode::Circuit);
    EXPECT_EQ(g[1].W, 9u);
    EXPECT_EQ(g[1].dem_mode, DemMode::Phenomenological);
    EXPECT_THROW(parse_grid(""), std::invalid_argument);
    EXPECT_THROW(parse_grid("5,3"), std::invalid_argument);
}

TEST(Run, DeterministicRowsWithValidIntervals) {
    ExperimentConfig cfg = small_config();
    RunResult a = run_memory(cfg);
    RunResult b = run_memory(cfg);
    ASSERT_EQ(a.rows.size(), 2u);
    EXPECT_EQ(a.n, 13u);
    EXPECT_EQ(a.k, 1u);
    for (size_t i = 0; i < a.rows.size(); i++) {
        const RunRow &r = a.rows[i];
        EXPECT_EQ(r.failures, b.rows[i].failures);
        EXPECT_EQ(r.shots, 400u);
        EXPECT_GE(r.lfr, 0.0);
        EXPECT_LE(r.lfr, 1.0);
        EXPECT_LE(r.ci_lo, r.lfr);
        EXPECT_GE(r.ci_hi, r.lfr);
        EXPECT_EQ(r.windows, window_count(cfg.rounds + 1, 3, 2));
        EXPECT_EQ(r.decoder_calls, r.shots * r.windows);
        EXPECT_GT(r.mechanisms, 0u);
    }
    EXPECT_LE(a.rows[0].failures, a.rows[1].failures);
}

TEST(Run, AutoScalingStopsAtTarget) {
    ExperimentConfig cfg = small_config();
    cfg.p = {1e-2};
    cfg.shots = 200;
    cfg.target_rel_ci = 0.25;
    cfg.max_shots = 20000;
    RunResult r = run_memory(cfg);
    const RunRow &row = r.rows[0];
    EXPECT_GT(row.shots, 200u);
    EXPECT_EQ(row.shots % 200, 0u);
    auto [lo, hi] = wilson_interval(row.failures, row.shots);
    EXPECT_LE((hi - lo) / 2, 0.25 * row.p_l);
}

TEST(Run, SingleGridPointMatchesRunMemory) {
    ExperimentConfig cfg = small_config();
    RunResult m = run_memory(cfg);
    TradeoffPoint pt;
    pt.W = cfg.window;
    pt.F = cfg.offset;
    pt.max_iter = cfg.decoder_config.bp.max_iter;
    pt.osd_order = cfg.decoder_config.osd.order;
    RunResult t = run_tradeoff(cfg, {pt});
    ASSERT_EQ(t.rows.size(), m.rows.size());
    for (size_t i = 0; i < m.rows.size(); i++) {
        EXPECT_EQ(t.rows[i].failures, m.rows[i].failures);
        EXPECT_EQ(t.rows[i].shots, m.rows[i].shots);
        EXPECT_EQ(t.rows[i].lfr, m.rows[i].lfr);
        EXPECT_EQ(t.rows[i].windows, m.rows[i].windows);
    }
}

TEST(Run, PhenomenologicalModeDecodesCircuitShots) {
    ExperimentConfig cfg = small_config();
    cfg.dem_mode = DemMode::Phenomenological;
    RunResult r = run_memory(cfg);
    EXPECT_EQ(r.rows[0].dem_mode, DemMode::Phenomenological);
    EXPECT_LT(r.rows[0].failures, r.rows[0].shots);
}

TEST(Run, BundleAndScheduleReproduceShots) {
    ExperimentConfig cfg = small_config();
    CssCode code = build_code(cfg.code);
    DepthSearch ds = build_schedule_for(code, cfg.schedule);
    auto dir = std::filesystem::temp_directory_path() / "qldpc_repro_bundle";
    std::filesystem::remove_all(dir);
    save_bundle(code, dir);
    std::stringstream sched;
    ds.schedule.write_text(sched);

    CssCode code2 = load_bundle(dir);
    Schedule s2 = Schedule::read_text(sched);
    Circuit a = attach_noise(build_memory_experiment(code, ds.schedule, cfg.rounds), 3e-3);
    Circuit b = attach_noise(build_memory_experiment(code2, s2, cfg.rounds), 3e-3);
    EXPECT_EQ(sample(a, 1500, 4), sample(b, 1500, 4));
    std::filesystem::remove_all(dir);
}

TEST(Output, CsvHeaderAndJsonSummary) {
    ExperimentConfig cfg = small_config();
    cfg.p = {1e-2};
    RunResult r = run_memory(cfg);
    std::stringstream csv;
    write_csv(r, csv);
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "p,shots,failures,p_l,lfr,ci_lo,ci_hi,tau_avg_s,windows,depth,decoder_calls,mechanisms,W,F,I,O,dem");
    std::string line;
    size_t rows = 0;
    while (std::getline(csv, line)) {
        rows++;
    }
    EXPECT_EQ(rows, 1u);
    auto j = nlohmann::json::parse(summary_json(cfg, r));
    EXPECT_EQ(j["config"].size(), cfg.entries().size());
    EXPECT_EQ(j["rows"].size(), 1u);
    EXPECT_EQ(j["rows"][0]["failures"].get<size_t>(), r.rows[0].failures);
}
