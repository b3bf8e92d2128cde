#include "qldpc/dem.h"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qldpc {

namespace {

struct Merged {
    double p = 0.0;
    Injection fault;
    bool has_fault = false;
};

// Signature key: detector rows, then num_rows + observable index; sorted ascending.
using Key = std::vector<uint32_t>;

void merge_into(std::map<Key, Merged> &cols, Key key, double p, const Injection *fault) {
    if (key.empty() || p <= 0.0) {
        return;
    }
    auto [it, inserted] = cols.try_emplace(std::move(key));
    Merged &m = it->second;
    if (inserted) {
        m.p = p;
        if (fault) {
            m.fault = *fault;
            m.has_fault = true;
        }
    } else {
        m.p = m.p * (1.0 - p) + p * (1.0 - m.p);
    }
}

void fill_columns(DetectorErrorModel &dem, size_t rows, size_t num_obs, const std::map<Key, Merged> &cols,
                  bool with_faults) {
    std::vector<std::pair<uint32_t, uint32_t>> h_entries, o_entries;
    uint32_t j = 0;
    for (const auto &[key, m] : cols) {
        for (uint32_t b : key) {
            if (b < rows) {
                h_entries.push_back({b, j});
            } else {
                o_entries.push_back({static_cast<uint32_t>(b - rows), j});
            }
        }
        dem.priors.push_back(m.p);
        if (with_faults) {
            dem.faults.push_back(m.fault);
        }
        j++;
    }
    dem.h = BitMatrix::from_entries(rows, j, h_entries);
    dem.obs = BitMatrix::from_entries(num_obs, j, o_entries);
}

std::string format_prob(double p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", p);
    return buf;
}

}  // namespace

DemPair build_dem(const Circuit &noisy) {
    size_t nq = noisy.num_qubits();
    size_t nd = noisy.num_detectors(), no = noisy.num_observables();
    size_t width = nd + no;

    // Which detector / observable bits each measurement record feeds.
    std::vector<std::vector<uint32_t>> rec_bits(noisy.num_measurements());
    for (size_t d = 0; d < nd; d++) {
        for (uint32_t r : noisy.detectors[d].records) {
            rec_bits[r].push_back(static_cast<uint32_t>(d));
        }
    }
    for (size_t o = 0; o < no; o++) {
        for (uint32_t r : noisy.observables[o]) {
            rec_bits[r].push_back(static_cast<uint32_t>(nd + o));
        }
    }

    DemPair out;
    DetectorErrorModel *dems[2] = {&out.z, &out.x};
    Basis types[2] = {Basis::Z, Basis::X};
    size_t checks[2] = {noisy.num_z, noisy.num_x};
    size_t first[2], count[2];
    for (int t = 0; t < 2; t++) {
        first[t] = noisy.first_detector_of(types[t]);
        count[t] = noisy.num_detectors_of(types[t]);
        if (count[t] == 0) {
            first[t] = 0;
        }
        DetectorErrorModel &dem = *dems[t];
        dem.type = types[t];
        dem.detectors_per_round = checks[t];
        dem.num_rounds = checks[t] ? count[t] / checks[t] : 0;
        dem.first_detector = first[t];
        for (size_t r = 0; r < count[t]; r++) {
            const Detector &det = noisy.detectors[first[t] + r];
            if (det.type != types[t] || det.round * checks[t] + det.check != r) {
                throw std::logic_error("build_dem: detectors of one type must be contiguous and round-major");
            }
            dem.round_of.push_back(det.round);
        }
    }

    // Key of a sensitivity vector restricted to one type's detector block plus all observables.
    auto key_of = [&](const BitVec &sig, int t) {
        Key key;
        for (uint32_t b : sig.ones()) {
            if (b >= nd) {
                key.push_back(static_cast<uint32_t>(count[t] + (b - nd)));
            } else if (b >= first[t] && b < first[t] + count[t]) {
                key.push_back(static_cast<uint32_t>(b - first[t]));
            } else {
                throw std::logic_error("build_dem: fault part flips a detector of the other type");
            }
        }
        return key;
    };

    std::vector<const Instruction *> flat;
    for (const auto &layer : noisy.layers) {
        for (const auto &op : layer.ops) {
            flat.push_back(&op);
        }
    }
    std::vector<BitVec> sx(nq, BitVec(width)), sz(nq, BitVec(width));
    std::map<Key, Merged> cols[2];
    size_t m = noisy.num_measurements();
    for (size_t idx = flat.size(); idx-- > 0;) {
        const Instruction &op = *flat[idx];
        switch (op.gate) {
            case Gate::RZ:
            case Gate::RX:
                for (uint32_t q : op.targets) {
                    sx[q].clear();
                    sz[q].clear();
                }
                break;
            case Gate::MZ:
            case Gate::MX:
                for (size_t i = op.targets.size(); i-- > 0;) {
                    uint32_t q = op.targets[i];
                    m--;
                    BitVec &read = op.gate == Gate::MZ ? sx[q] : sz[q];
                    (op.gate == Gate::MZ ? sz[q] : sx[q]).clear();
                    for (uint32_t b : rec_bits[m]) {
                        read.flip(b);
                    }
                }
                break;
            case Gate::CX:
                for (size_t i = 0; i + 1 < op.targets.size(); i += 2) {
                    uint32_t c = op.targets[i], tg = op.targets[i + 1];
                    sx[c] ^= sx[tg];
                    sz[tg] ^= sz[c];
                }
                break;
            default: {
                std::vector<uint8_t> paulis;
                double pc = op.p;
                if (op.gate == Gate::DEPOL1) {
                    paulis = {1, 2, 3};
                    pc = op.p / 3.0;
                } else if (op.gate == Gate::DEPOL2) {
                    for (uint8_t k = 1; k < 16; k++) {
                        paulis.push_back(k);
                    }
                    pc = op.p / 15.0;
                } else if (op.gate == Gate::FLIP_X) {
                    paulis = {1};
                } else {
                    paulis = {2};
                }
                bool pair = op.gate == Gate::DEPOL2;
                size_t slots = pair ? op.targets.size() / 2 : op.targets.size();
                for (size_t s = 0; s < slots; s++) {
                    for (uint8_t pauli : paulis) {
                        BitVec xs(width), zs(width);
                        for (int k = 0; k < (pair ? 2 : 1); k++) {
                            uint32_t q = op.targets[pair ? 2 * s + k : s];
                            uint8_t part = (pauli >> (2 * k)) & 3;
                            if (part & 1) {
                                xs ^= sx[q];
                            }
                            if (part & 2) {
                                zs ^= sz[q];
                            }
                        }
                        Injection fault{static_cast<uint32_t>(idx), static_cast<uint32_t>(s), pauli};
                        merge_into(cols[0], key_of(xs, 0), pc, &fault);
                        merge_into(cols[1], key_of(zs, 1), pc, &fault);
                    }
                }
            }
        }
    }
    for (int t = 0; t < 2; t++) {
        fill_columns(*dems[t], count[t], no, cols[t], true);
    }
    return out;
}

DetectorErrorModel phenomenological_dem(const CssCode &code, size_t rounds, double p, Basis type) {
    if (rounds < 1) {
        throw std::invalid_argument("phenomenological_dem: rounds must be >= 1");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("phenomenological_dem: p must be in (0, 1)");
    }
    const BitMatrix &h = type == Basis::Z ? code.hz : code.hx;
    const BitMatrix &logicals = type == Basis::Z ? code.lz : code.lx;
    size_t c = h.rows();
    size_t num_rounds = rounds + 1;
    size_t rows = c * num_rounds;
    BitMatrix ht = h.transpose();
    BitMatrix lt = logicals.transpose();
    DetectorErrorModel dem;
    dem.type = type;
    dem.detectors_per_round = c;
    dem.num_rounds = num_rounds;
    for (size_t r = 0; r < rows; r++) {
        dem.round_of.push_back(static_cast<uint32_t>(r / c));
    }
    std::map<Key, Merged> cols;
    for (size_t t = 0; t < num_rounds; t++) {
        for (size_t q = 0; q < code.n; q++) {
            Key key;
            for (uint32_t i : ht.row(q)) {
                key.push_back(static_cast<uint32_t>(t * c + i));
            }
            for (uint32_t o : lt.row(q)) {
                key.push_back(static_cast<uint32_t>(rows + o));
            }
            merge_into(cols, std::move(key), p, nullptr);
        }
    }
    for (size_t t = 1; t <= rounds; t++) {
        for (size_t i = 0; i < c; i++) {
            merge_into(cols, {static_cast<uint32_t>((t - 1) * c + i), static_cast<uint32_t>(t * c + i)}, p, nullptr);
        }
    }
    fill_columns(dem, rows, logicals.rows(), cols, false);
    return dem;
}

size_t column_round_span(const DetectorErrorModel &dem, size_t column) {
    uint32_t lo = UINT32_MAX, hi = 0;
    BitMatrix ht = dem.h.transpose();
    for (uint32_t r : ht.row(column)) {
        lo = std::min(lo, dem.round_of[r]);
        hi = std::max(hi, dem.round_of[r]);
    }
    return lo == UINT32_MAX ? 0 : hi - lo;
}

size_t window_count(size_t num_rounds, size_t W, size_t F) {
    if (W < 1 || F < 1 || F > W) {
        throw std::invalid_argument("window_count: need 1 <= F <= W");
    }
    size_t n = 1;
    while ((n - 1) * F + W < num_rounds) {
        n++;
    }
    return n;
}

WindowSlice window_slice(const DetectorErrorModel &dem, size_t w, size_t W, size_t F) {
    size_t n = window_count(dem.num_rounds, W, F);
    if (w < 1 || w > n) {
        throw std::invalid_argument("window_slice: window index out of range");
    }
    size_t c = dem.detectors_per_round;
    size_t start = (w - 1) * F;
    bool last = w == n;
    size_t end_round = last ? dem.num_rounds : std::min(start + W, dem.num_rounds);
    size_t commit_round = last ? dem.num_rounds : start + F;
    WindowSlice ws;
    ws.first_row = start * c;
    ws.end_row = end_round * c;
    ws.commit_end_row = commit_round * c;

    BitMatrix ht = dem.h.transpose();
    std::vector<std::pair<uint32_t, uint32_t>> entries;
    for (uint32_t j = 0; j < ht.rows(); j++) {
        const auto &rs = ht.row(j);
        // Columns starting before the window were decided by an earlier window.
        if (rs.empty() || rs.front() < ws.first_row || rs.front() >= ws.end_row) {
            continue;
        }
        uint32_t local = static_cast<uint32_t>(ws.column_map.size());
        ws.column_map.push_back(j);
        ws.sub_priors.push_back(dem.priors[j]);
        if (rs.front() < ws.commit_end_row) {
            ws.commit_columns.push_back(local);
        }
        for (auto it = rs.begin(); it != rs.end() && *it < ws.end_row; ++it) {
            entries.push_back({static_cast<uint32_t>(*it - ws.first_row), local});
        }
    }
    ws.sub_h = BitMatrix::from_entries(ws.end_row - ws.first_row, ws.column_map.size(), entries);
    return ws;
}

void DetectorErrorModel::write_text(std::ostream &out) const {
    out << "DEM " << (type == Basis::Z ? "Z" : "X") << " " << h.rows() << " " << h.cols() << " " << obs.rows() << " "
        << detectors_per_round << " " << num_rounds << " " << first_detector << "\n";
    for (size_t j = 0; j < priors.size(); j++) {
        out << "PRIOR " << j << " " << format_prob(priors[j]) << "\n";
    }
    for (size_t r = 0; r < h.rows(); r++) {
        for (uint32_t j : h.row(r)) {
            out << "H " << r << " " << j << "\n";
        }
    }
    for (size_t o = 0; o < obs.rows(); o++) {
        for (uint32_t j : obs.row(o)) {
            out << "O " << o << " " << j << "\n";
        }
    }
    for (size_t r = 0; r < round_of.size(); r++) {
        out << "ROUND " << r << " " << round_of[r] << "\n";
    }
    for (size_t j = 0; j < faults.size(); j++) {
        out << "FAULT " << j << " " << faults[j].instruction << " " << faults[j].slot << " "
            << static_cast<int>(faults[j].pauli) << "\n";
    }
}

DetectorErrorModel DetectorErrorModel::read_text(std::istream &in) {
    DetectorErrorModel dem;
    std::string line, tag;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("DEM file: missing header");
    }
    std::istringstream hs(line);
    std::string type;
    size_t rows = 0, cols = 0, nobs = 0;
    if (!(hs >> tag >> type >> rows >> cols >> nobs >> dem.detectors_per_round >> dem.num_rounds >>
          dem.first_detector) ||
        tag != "DEM" || (type != "Z" && type != "X")) {
        throw std::invalid_argument("DEM file: bad header");
    }
    dem.type = type == "Z" ? Basis::Z : Basis::X;
    dem.priors.assign(cols, 0.0);
    dem.round_of.assign(rows, 0);
    std::vector<std::pair<uint32_t, uint32_t>> he, oe;
    std::vector<std::pair<size_t, Injection>> faults;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        ls >> tag;
        size_t a = 0, b = 0;
        if (tag == "PRIOR") {
            std::string p;
            ls >> a >> p;
            if (a >= cols) {
                throw std::invalid_argument("DEM file: prior index out of range");
            }
            dem.priors[a] = std::stod(p);
        } else if (tag == "H" || tag == "O") {
            ls >> a >> b;
            (tag == "H" ? he : oe).push_back({static_cast<uint32_t>(a), static_cast<uint32_t>(b)});
        } else if (tag == "ROUND") {
            ls >> a >> b;
            if (a >= rows) {
                throw std::invalid_argument("DEM file: round index out of range");
            }
            dem.round_of[a] = static_cast<uint32_t>(b);
        } else if (tag == "FAULT") {
            Injection f;
            int pauli = 0;
            ls >> a >> f.instruction >> f.slot >> pauli;
            f.pauli = static_cast<uint8_t>(pauli);
            faults.push_back({a, f});
        } else {
            throw std::invalid_argument("DEM file: unknown line '" + tag + "'");
        }
        if (ls.fail()) {
            throw std::invalid_argument("DEM file: malformed line '" + line + "'");
        }
    }
    dem.h = BitMatrix::from_entries(rows, cols, he);
    dem.obs = BitMatrix::from_entries(nobs, cols, oe);
    if (!faults.empty()) {
        if (faults.size() != cols) {
            throw std::invalid_argument("DEM file: fault list incomplete");
        }
        dem.faults.resize(cols);
        for (const auto &[j, f] : faults) {
            dem.faults.at(j) = f;
        }
    }
    return dem;
}

}  // namespace qldpc
