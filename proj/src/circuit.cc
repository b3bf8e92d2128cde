#include "qldpc/circuit.h"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qldpc {

namespace {

constexpr Gate all_gates[] = {Gate::RZ,     Gate::RX,     Gate::MZ,     Gate::MX,    Gate::CX,
                              Gate::DEPOL1, Gate::DEPOL2, Gate::FLIP_X, Gate::FLIP_Z};
constexpr LayerKind all_kinds[] = {LayerKind::DataInit, LayerKind::Reset, LayerKind::Cnot, LayerKind::Measure,
                                   LayerKind::DataReadout};

Gate parse_gate(const std::string &s) {
    for (Gate g : all_gates) {
        if (s == gate_name(g)) {
            return g;
        }
    }
    throw std::invalid_argument("circuit text: unknown gate '" + s + "'");
}

LayerKind parse_kind(const std::string &s) {
    for (LayerKind k : all_kinds) {
        if (s == layer_kind_name(k)) {
            return k;
        }
    }
    throw std::invalid_argument("circuit text: unknown layer kind '" + s + "'");
}

std::string format_prob(double p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", p);
    return buf;
}

bool is_pair_gate(Gate g) { return g == Gate::CX || g == Gate::DEPOL2; }

}  // namespace

const char *gate_name(Gate g) {
    switch (g) {
        case Gate::RZ:
            return "RZ";
        case Gate::RX:
            return "RX";
        case Gate::MZ:
            return "MZ";
        case Gate::MX:
            return "MX";
        case Gate::CX:
            return "CX";
        case Gate::DEPOL1:
            return "DEPOL1";
        case Gate::DEPOL2:
            return "DEPOL2";
        case Gate::FLIP_X:
            return "FLIP_X";
        case Gate::FLIP_Z:
            return "FLIP_Z";
    }
    return "?";
}

bool is_noise(Gate g) { return g == Gate::DEPOL1 || g == Gate::DEPOL2 || g == Gate::FLIP_X || g == Gate::FLIP_Z; }

const char *layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::DataInit:
            return "DATA_INIT";
        case LayerKind::Reset:
            return "RESET";
        case LayerKind::Cnot:
            return "CNOT";
        case LayerKind::Measure:
            return "MEASURE";
        case LayerKind::DataReadout:
            return "DATA_READOUT";
    }
    return "?";
}

size_t Circuit::num_measurements() const {
    size_t m = 0;
    for (const auto &layer : layers) {
        for (const auto &op : layer.ops) {
            if (op.gate == Gate::MZ || op.gate == Gate::MX) {
                m += op.targets.size();
            }
        }
    }
    return m;
}

size_t Circuit::num_detectors_of(Basis type) const {
    size_t c = 0;
    for (const auto &d : detectors) {
        c += d.type == type;
    }
    return c;
}

size_t Circuit::first_detector_of(Basis type) const {
    for (size_t i = 0; i < detectors.size(); i++) {
        if (detectors[i].type == type) {
            return i;
        }
    }
    return detectors.size();
}

size_t Circuit::num_noise_locations() const {
    size_t c = 0;
    for (const auto &layer : layers) {
        for (const auto &op : layer.ops) {
            if (is_noise(op.gate)) {
                c += is_pair_gate(op.gate) ? op.targets.size() / 2 : op.targets.size();
            }
        }
    }
    return c;
}

Circuit build_memory_experiment(const CssCode &code, const Schedule &schedule, size_t rounds, Basis basis) {
    if (rounds < 1) {
        throw std::invalid_argument("build_memory_experiment: rounds must be >= 1");
    }
    if (schedule.num_data != code.n || schedule.num_z != code.hz.rows() || schedule.num_x != code.hx.rows()) {
        throw std::invalid_argument("build_memory_experiment: schedule does not match the code");
    }
    Circuit c;
    c.num_data = code.n;
    c.num_z = code.hz.rows();
    c.num_x = code.hx.rows();
    c.rounds = rounds;
    c.basis = basis;
    std::vector<uint32_t> data(c.num_data), zs(c.num_z), xs(c.num_x);
    for (size_t i = 0; i < c.num_data; i++) {
        data[i] = static_cast<uint32_t>(i);
    }
    for (size_t i = 0; i < c.num_z; i++) {
        zs[i] = schedule.z_qubit(i);
    }
    for (size_t i = 0; i < c.num_x; i++) {
        xs[i] = schedule.x_qubit(i);
    }
    Gate data_reset = basis == Basis::Z ? Gate::RZ : Gate::RX;
    Gate data_measure = basis == Basis::Z ? Gate::MZ : Gate::MX;
    c.layers.push_back({LayerKind::DataInit, 0, {{data_reset, 0.0, data}}});
    for (uint32_t t = 1; t <= rounds; t++) {
        c.layers.push_back({LayerKind::Reset, t, {{Gate::RZ, 0.0, zs}, {Gate::RX, 0.0, xs}}});
        for (const auto &gates : schedule.layers) {
            Instruction cx{Gate::CX, 0.0, {}};
            for (const auto &[ctrl, tgt] : gates) {
                cx.targets.push_back(ctrl);
                cx.targets.push_back(tgt);
            }
            c.layers.push_back({LayerKind::Cnot, t, {std::move(cx)}});
        }
        c.layers.push_back({LayerKind::Measure, t, {{Gate::MZ, 0.0, zs}, {Gate::MX, 0.0, xs}}});
    }
    c.layers.push_back({LayerKind::DataReadout, static_cast<uint32_t>(rounds), {{data_measure, 0.0, data}}});

    size_t per_round = c.num_z + c.num_x;
    auto z_rec = [&](size_t t, size_t i) { return static_cast<uint32_t>((t - 1) * per_round + i); };
    auto x_rec = [&](size_t t, size_t i) { return static_cast<uint32_t>((t - 1) * per_round + c.num_z + i); };
    auto data_rec = [&](size_t q) { return static_cast<uint32_t>(rounds * per_round + q); };

    const BitMatrix &h_mem = basis == Basis::Z ? code.hz : code.hx;
    const BitMatrix &h_other = basis == Basis::Z ? code.hx : code.hz;
    auto rec_mem = [&](size_t t, size_t i) { return basis == Basis::Z ? z_rec(t, i) : x_rec(t, i); };
    auto rec_other = [&](size_t t, size_t i) { return basis == Basis::Z ? x_rec(t, i) : z_rec(t, i); };
    Basis other = basis == Basis::Z ? Basis::X : Basis::Z;
    for (uint32_t t = 0; t <= rounds; t++) {
        for (uint32_t i = 0; i < h_mem.rows(); i++) {
            Detector d{basis, t, i, {}};
            if (t == 0) {
                d.records = {rec_mem(1, i)};
            } else if (t < rounds) {
                d.records = {rec_mem(t, i), rec_mem(t + 1, i)};
            } else {
                d.records = {rec_mem(rounds, i)};
                for (uint32_t q : h_mem.row(i)) {
                    d.records.push_back(data_rec(q));
                }
            }
            c.detectors.push_back(std::move(d));
        }
    }
    for (uint32_t t = 1; t < rounds; t++) {
        for (uint32_t i = 0; i < h_other.rows(); i++) {
            c.detectors.push_back({other, t - 1, i, {rec_other(t, i), rec_other(t + 1, i)}});
        }
    }
    const BitMatrix &logicals = basis == Basis::Z ? code.lz : code.lx;
    for (size_t r = 0; r < logicals.rows(); r++) {
        std::vector<uint32_t> recs;
        for (uint32_t q : logicals.row(r)) {
            recs.push_back(data_rec(q));
        }
        c.observables.push_back(std::move(recs));
    }
    return c;
}

Circuit attach_noise(const Circuit &c, const NoiseSpec &noise) {
    auto check = [](double p, const char *what) {
        if (!(p >= 0.0 && p < 1.0)) {
            throw std::invalid_argument(std::string("attach_noise: ") + what + " probability out of [0, 1)");
        }
    };
    double p_idle = noise.p * noise.idle, p_cx = noise.p * noise.cx;
    double p_reset = noise.p * noise.reset, p_meas = noise.p * noise.measure;
    check(noise.p, "base");
    check(p_idle, "idle");
    check(p_cx, "CNOT");
    check(p_reset, "reset");
    check(p_meas, "measurement");
    if (c.num_noise_locations() > 0) {
        throw std::invalid_argument("attach_noise: circuit already carries noise");
    }

    Circuit out = c;
    std::vector<uint32_t> data(c.num_data), zs(c.num_z), xs(c.num_x);
    for (size_t i = 0; i < c.num_data; i++) {
        data[i] = static_cast<uint32_t>(i);
    }
    for (size_t i = 0; i < c.num_z; i++) {
        zs[i] = static_cast<uint32_t>(c.num_data + i);
    }
    for (size_t i = 0; i < c.num_x; i++) {
        xs[i] = static_cast<uint32_t>(c.num_data + c.num_z + i);
    }
    auto add = [](std::vector<Instruction> &ops, Gate g, double p, const std::vector<uint32_t> &targets) {
        if (p > 0.0 && !targets.empty()) {
            ops.push_back({g, p, targets});
        }
    };
    for (auto &layer : out.layers) {
        std::vector<Instruction> ops;
        switch (layer.kind) {
            case LayerKind::DataInit:
            case LayerKind::DataReadout:
                continue;
            case LayerKind::Reset:
                ops = layer.ops;
                add(ops, Gate::FLIP_X, p_reset, zs);
                add(ops, Gate::FLIP_Z, p_reset, xs);
                add(ops, Gate::DEPOL1, noise.data_idle_reset_measure ? p_idle : 0.0, data);
                break;
            case LayerKind::Measure:
                add(ops, Gate::FLIP_X, p_meas, zs);
                add(ops, Gate::FLIP_Z, p_meas, xs);
                add(ops, Gate::DEPOL1, noise.data_idle_reset_measure ? p_idle : 0.0, data);
                ops.insert(ops.end(), layer.ops.begin(), layer.ops.end());
                break;
            case LayerKind::Cnot: {
                ops = layer.ops;
                std::vector<bool> busy(c.num_qubits(), false);
                std::vector<uint32_t> pairs;
                for (const auto &op : layer.ops) {
                    for (uint32_t q : op.targets) {
                        busy[q] = true;
                    }
                    pairs.insert(pairs.end(), op.targets.begin(), op.targets.end());
                }
                std::vector<uint32_t> idle;
                size_t idle_end = noise.syndrome_idle ? c.num_qubits() : c.num_data;
                for (uint32_t q = 0; q < idle_end; q++) {
                    if (!busy[q]) {
                        idle.push_back(q);
                    }
                }
                add(ops, Gate::DEPOL2, p_cx, pairs);
                add(ops, Gate::DEPOL1, p_idle, idle);
                break;
            }
        }
        layer.ops = std::move(ops);
    }
    return out;
}

Circuit attach_noise(const Circuit &c, double p) {
    NoiseSpec spec;
    spec.p = p;
    return attach_noise(c, spec);
}

void Circuit::write_text(std::ostream &out) const {
    out << "CIRCUIT " << num_data << " " << num_z << " " << num_x << " " << rounds << " "
        << (basis == Basis::Z ? "Z" : "X") << "\n";
    for (const auto &layer : layers) {
        out << "LAYER " << layer_kind_name(layer.kind) << " " << layer.round << " |";
        for (size_t k = 0; k < layer.ops.size(); k++) {
            const auto &op = layer.ops[k];
            out << (k ? " ; " : " ") << gate_name(op.gate);
            if (is_noise(op.gate)) {
                out << " " << format_prob(op.p);
            }
            for (uint32_t q : op.targets) {
                out << " " << q;
            }
        }
        out << "\n";
    }
    for (const auto &d : detectors) {
        out << "DETECTOR " << (d.type == Basis::Z ? "Z" : "X") << " " << d.round << " " << d.check;
        for (uint32_t r : d.records) {
            out << " " << r;
        }
        out << "\n";
    }
    for (const auto &o : observables) {
        out << "OBSERVABLE";
        for (uint32_t r : o) {
            out << " " << r;
        }
        out << "\n";
    }
}

Circuit Circuit::read_text(std::istream &in) {
    Circuit c;
    std::string line;
    bool header = false;
    auto parse_basis = [](const std::string &s) {
        if (s == "Z") {
            return Basis::Z;
        }
        if (s == "X") {
            return Basis::X;
        }
        throw std::invalid_argument("circuit text: bad basis '" + s + "'");
    };
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "CIRCUIT") {
            std::string b;
            ls >> c.num_data >> c.num_z >> c.num_x >> c.rounds >> b;
            c.basis = parse_basis(b);
            header = true;
        } else if (!header) {
            throw std::invalid_argument("circuit text: missing CIRCUIT header");
        } else if (head == "LAYER") {
            Layer layer;
            std::string kind, bar;
            ls >> kind >> layer.round >> bar;
            layer.kind = parse_kind(kind);
            std::string rest;
            std::getline(ls, rest);
            std::istringstream ops(rest);
            std::string chunk;
            std::string tok;
            Instruction op;
            bool open = false;
            while (ops >> tok) {
                if (tok == ";") {
                    if (open) {
                        layer.ops.push_back(std::move(op));
                    }
                    op = Instruction{};
                    open = false;
                    continue;
                }
                if (!open) {
                    op.gate = parse_gate(tok);
                    open = true;
                    if (is_noise(op.gate)) {
                        ops >> tok;
                        op.p = std::stod(tok);
                    }
                    continue;
                }
                op.targets.push_back(static_cast<uint32_t>(std::stoul(tok)));
            }
            if (open) {
                layer.ops.push_back(std::move(op));
            }
            c.layers.push_back(std::move(layer));
        } else if (head == "DETECTOR") {
            Detector d;
            std::string t;
            ls >> t >> d.round >> d.check;
            d.type = parse_basis(t);
            uint32_t r;
            while (ls >> r) {
                d.records.push_back(r);
            }
            c.detectors.push_back(std::move(d));
        } else if (head == "OBSERVABLE") {
            std::vector<uint32_t> recs;
            uint32_t r;
            while (ls >> r) {
                recs.push_back(r);
            }
            c.observables.push_back(std::move(recs));
        } else {
            throw std::invalid_argument("circuit text: unknown line '" + head + "'");
        }
    }
    if (!header) {
        throw std::invalid_argument("circuit text: missing CIRCUIT header");
    }
    size_t m = c.num_measurements();
    for (const auto &d : c.detectors) {
        for (uint32_t r : d.records) {
            if (r >= m) {
                throw std::invalid_argument("circuit text: detector record out of range");
            }
        }
    }
    return c;
}

void Circuit::write_stim(std::ostream &out) const {
    size_t m = num_measurements();
    size_t seen = 0;
    for (const auto &layer : layers) {
        for (const auto &op : layer.ops) {
            switch (op.gate) {
                case Gate::RZ:
                    out << "R";
                    break;
                case Gate::DEPOL1:
                    out << "DEPOLARIZE1(" << format_prob(op.p) << ")";
                    break;
                case Gate::DEPOL2:
                    out << "DEPOLARIZE2(" << format_prob(op.p) << ")";
                    break;
                case Gate::FLIP_X:
                    out << "X_ERROR(" << format_prob(op.p) << ")";
                    break;
                case Gate::FLIP_Z:
                    out << "Z_ERROR(" << format_prob(op.p) << ")";
                    break;
                case Gate::MZ:
                    out << "M";
                    break;
                default:
                    out << gate_name(op.gate);
            }
            for (uint32_t q : op.targets) {
                out << " " << q;
            }
            out << "\n";
            if (op.gate == Gate::MZ || op.gate == Gate::MX) {
                seen += op.targets.size();
            }
        }
        out << "TICK\n";
    }
    (void)seen;
    for (const auto &d : detectors) {
        out << "DETECTOR";
        for (uint32_t r : d.records) {
            out << " rec[" << static_cast<int64_t>(r) - static_cast<int64_t>(m) << "]";
        }
        out << "\n";
    }
    for (size_t i = 0; i < observables.size(); i++) {
        out << "OBSERVABLE_INCLUDE(" << i << ")";
        for (uint32_t r : observables[i]) {
            out << " rec[" << static_cast<int64_t>(r) - static_cast<int64_t>(m) << "]";
        }
        out << "\n";
    }
}

}  // namespace qldpc
