#include "qldpc/pauli_sim.h"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qldpc/rng.h"

namespace qldpc {

namespace {

constexpr size_t kBlockShots = 1024;

// Frame state of up to kBlockShots shots: one run of `words` words per qubit and per measurement.
class BlockSim {
   public:
    BlockSim(const Circuit &c, size_t lanes, uint64_t gauge_seed)
        : c_(c), lanes_(lanes), words_((lanes + 63) / 64), x_(c.num_qubits() * words_),
          z_(c.num_qubits() * words_), rec_(c.num_measurements() * words_), gauge_(gauge_seed) {}

    size_t lanes() const { return lanes_; }

    void flip(uint32_t q, size_t lane, uint8_t pauli) {
        uint64_t bit = uint64_t{1} << (lane & 63);
        size_t w = q * words_ + (lane >> 6);
        if (pauli & 1) {
            x_[w] ^= bit;
        }
        if (pauli & 2) {
            z_[w] ^= bit;
        }
    }

    // Applies the slot-th Pauli of a noise instruction to one lane.
    void inject(const Instruction &op, uint32_t slot, size_t lane, uint8_t pauli) {
        if (op.gate == Gate::DEPOL2) {
            flip(op.targets[2 * slot], lane, pauli & 3);
            flip(op.targets[2 * slot + 1], lane, (pauli >> 2) & 3);
        } else {
            flip(op.targets[slot], lane, pauli);
        }
    }

    // Walks the circuit; noise instructions are handed to on_noise(instruction index, op).
    template <typename OnNoise>
    void run(OnNoise &&on_noise) {
        uint32_t idx = 0;
        size_t m = 0;
        for (const auto &layer : c_.layers) {
            for (const auto &op : layer.ops) {
                if (is_noise(op.gate)) {
                    on_noise(idx, op);
                } else {
                    apply(op, &m);
                }
                idx++;
            }
        }
    }

    ShotBatch collect() const {
        size_t nd = c_.num_detectors(), no = c_.num_observables();
        std::vector<std::vector<uint32_t>> det_rows(lanes_), obs_rows(lanes_);
        std::vector<uint64_t> acc(words_);
        auto gather = [&](const std::vector<uint32_t> &records, uint32_t index,
                          std::vector<std::vector<uint32_t>> &rows) {
            std::fill(acc.begin(), acc.end(), 0);
            for (uint32_t r : records) {
                for (size_t w = 0; w < words_; w++) {
                    acc[w] ^= rec_[r * words_ + w];
                }
            }
            for (size_t w = 0; w < words_; w++) {
                uint64_t bits = acc[w];
                while (bits) {
                    size_t lane = w * 64 + std::countr_zero(bits);
                    bits &= bits - 1;
                    if (lane < lanes_) {
                        rows[lane].push_back(index);
                    }
                }
            }
        };
        for (size_t d = 0; d < nd; d++) {
            gather(c_.detectors[d].records, static_cast<uint32_t>(d), det_rows);
        }
        for (size_t o = 0; o < no; o++) {
            gather(c_.observables[o], static_cast<uint32_t>(o), obs_rows);
        }
        return {BitMatrix::from_rows(nd, std::move(det_rows)), BitMatrix::from_rows(no, std::move(obs_rows))};
    }

   private:
    void randomize(std::vector<uint64_t> &v, uint32_t q) {
        for (size_t w = 0; w < words_; w++) {
            v[q * words_ + w] = gauge_();
        }
    }
    void clear(std::vector<uint64_t> &v, uint32_t q) {
        std::fill(v.begin() + q * words_, v.begin() + (q + 1) * words_, 0);
    }

    void apply(const Instruction &op, size_t *m) {
        switch (op.gate) {
            case Gate::RZ:
                for (uint32_t q : op.targets) {
                    clear(x_, q);
                    randomize(z_, q);
                }
                break;
            case Gate::RX:
                for (uint32_t q : op.targets) {
                    clear(z_, q);
                    randomize(x_, q);
                }
                break;
            case Gate::MZ:
            case Gate::MX: {
                bool zb = op.gate == Gate::MZ;
                for (uint32_t q : op.targets) {
                    const auto &src = zb ? x_ : z_;
                    std::copy(src.begin() + q * words_, src.begin() + (q + 1) * words_, rec_.begin() + *m * words_);
                    randomize(zb ? z_ : x_, q);
                    (*m)++;
                }
                break;
            }
            case Gate::CX:
                for (size_t i = 0; i + 1 < op.targets.size(); i += 2) {
                    size_t cb = op.targets[i] * words_, tb = op.targets[i + 1] * words_;
                    for (size_t w = 0; w < words_; w++) {
                        x_[tb + w] ^= x_[cb + w];
                        z_[cb + w] ^= z_[tb + w];
                    }
                }
                break;
            default:
                break;
        }
    }

    const Circuit &c_;
    size_t lanes_;
    size_t words_;
    std::vector<uint64_t> x_, z_, rec_;
    Rng gauge_;
};

size_t num_slots(const Instruction &op) { return op.gate == Gate::DEPOL2 ? op.targets.size() / 2 : op.targets.size(); }

uint8_t draw_pauli(Gate g, Rng &rng) {
    switch (g) {
        case Gate::DEPOL1:
            return static_cast<uint8_t>(1 + rng.below(3));
        case Gate::DEPOL2:
            return static_cast<uint8_t>(1 + rng.below(15));
        case Gate::FLIP_X:
            return 1;
        case Gate::FLIP_Z:
            return 2;
        default:
            return 0;
    }
}

}  // namespace

void PauliFrame::apply(const Instruction &op, std::vector<uint8_t> *records) {
    switch (op.gate) {
        case Gate::RZ:
        case Gate::RX:
            for (uint32_t q : op.targets) {
                x.set(q, false);
                z.set(q, false);
            }
            break;
        case Gate::MZ:
        case Gate::MX:
            for (uint32_t q : op.targets) {
                bool flip = op.gate == Gate::MZ ? x.get(q) : z.get(q);
                if (records) {
                    records->push_back(flip);
                }
                (op.gate == Gate::MZ ? z : x).set(q, false);
            }
            break;
        case Gate::CX:
            for (size_t i = 0; i + 1 < op.targets.size(); i += 2) {
                uint32_t c = op.targets[i], t = op.targets[i + 1];
                if (x.get(c)) {
                    x.flip(t);
                }
                if (z.get(t)) {
                    z.flip(c);
                }
            }
            break;
        default:
            break;
    }
}

std::vector<NoiseSite> noise_sites(const Circuit &c) {
    std::vector<NoiseSite> out;
    uint32_t idx = 0;
    for (uint32_t l = 0; l < c.layers.size(); l++) {
        for (uint32_t o = 0; o < c.layers[l].ops.size(); o++) {
            if (is_noise(c.layers[l].ops[o].gate)) {
                out.push_back({idx, l, o});
            }
            idx++;
        }
    }
    return out;
}

ShotBatch sample(const Circuit &c, size_t shots, uint64_t seed) {
    if (shots < 1) {
        throw std::invalid_argument("sample: shots must be >= 1");
    }
    std::vector<std::vector<uint32_t>> det_rows, obs_rows;
    det_rows.reserve(shots);
    obs_rows.reserve(shots);
    for (size_t block = 0, begin = 0; begin < shots; block++, begin += kBlockShots) {
        size_t lanes = std::min(kBlockShots, shots - begin);
        BlockSim sim(c, lanes, derive_seed(seed, ~uint64_t{0}, block));
        sim.run([&](uint32_t idx, const Instruction &op) {
            if (op.p <= 0.0) {
                return;
            }
            Rng rng(derive_seed(seed, idx, block));
            size_t total = num_slots(op) * lanes;
            double log_q = std::log1p(-op.p);
            size_t e = 0;
            while (true) {
                double gap = std::floor(std::log1p(-rng.uniform()) / log_q);
                if (gap >= static_cast<double>(total - e)) {
                    break;
                }
                e += static_cast<size_t>(gap);
                sim.inject(op, static_cast<uint32_t>(e / lanes), e % lanes, draw_pauli(op.gate, rng));
                if (++e >= total) {
                    break;
                }
            }
        });
        ShotBatch part = sim.collect();
        for (size_t s = 0; s < lanes; s++) {
            det_rows.push_back(part.detectors.row(s));
            obs_rows.push_back(part.observables.row(s));
        }
    }
    return {BitMatrix::from_rows(c.num_detectors(), std::move(det_rows)),
            BitMatrix::from_rows(c.num_observables(), std::move(obs_rows))};
}

ShotBatch simulate_injections(const Circuit &c, const std::vector<std::vector<Injection>> &injections) {
    size_t shots = injections.size();
    std::vector<std::vector<uint32_t>> det_rows, obs_rows;
    std::vector<const Instruction *> flat;
    for (const auto &layer : c.layers) {
        for (const auto &op : layer.ops) {
            flat.push_back(&op);
        }
    }
    size_t num_instr = flat.size();
    for (size_t block = 0, begin = 0; begin < shots; block++, begin += kBlockShots) {
        size_t lanes = std::min(kBlockShots, shots - begin);
        std::vector<std::vector<std::pair<size_t, Injection>>> by_instr(num_instr);
        for (size_t s = 0; s < lanes; s++) {
            for (const Injection &inj : injections[begin + s]) {
                if (inj.instruction >= num_instr || !is_noise(flat[inj.instruction]->gate)) {
                    throw std::invalid_argument("simulate_injections: injection must target a noise instruction");
                }
                by_instr[inj.instruction].push_back({s, inj});
            }
        }
        BlockSim sim(c, lanes, derive_seed(0, block));
        sim.run([&](uint32_t idx, const Instruction &op) {
            for (const auto &[lane, inj] : by_instr[idx]) {
                if (inj.slot >= num_slots(op)) {
                    throw std::invalid_argument("simulate_injections: slot out of range");
                }
                sim.inject(op, inj.slot, lane, inj.pauli);
            }
        });
        ShotBatch part = sim.collect();
        for (size_t s = 0; s < lanes; s++) {
            det_rows.push_back(part.detectors.row(s));
            obs_rows.push_back(part.observables.row(s));
        }
    }
    return {BitMatrix::from_rows(c.num_detectors(), std::move(det_rows)),
            BitMatrix::from_rows(c.num_observables(), std::move(obs_rows))};
}

void ShotBatch::write(std::ostream &out) const {
    size_t nd = detectors.cols(), no = observables.cols();
    out << "SHOTS " << shots() << " " << nd << " " << no << "\n";
    size_t bytes = (nd + no + 7) / 8;
    std::string buf(bytes, '\0');
    for (size_t s = 0; s < shots(); s++) {
        std::fill(buf.begin(), buf.end(), '\0');
        for (uint32_t d : detectors.row(s)) {
            buf[d >> 3] = static_cast<char>(buf[d >> 3] | (1 << (d & 7)));
        }
        for (uint32_t o : observables.row(s)) {
            size_t b = nd + o;
            buf[b >> 3] = static_cast<char>(buf[b >> 3] | (1 << (b & 7)));
        }
        out.write(buf.data(), static_cast<std::streamsize>(bytes));
    }
}

ShotBatch ShotBatch::read(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("shot file: missing header");
    }
    std::istringstream hs(line);
    std::string tag;
    size_t shots = 0, nd = 0, no = 0;
    if (!(hs >> tag >> shots >> nd >> no) || tag != "SHOTS") {
        throw std::invalid_argument("shot file: bad header");
    }
    size_t bytes = (nd + no + 7) / 8;
    std::string buf(bytes, '\0');
    std::vector<std::vector<uint32_t>> det_rows(shots), obs_rows(shots);
    for (size_t s = 0; s < shots; s++) {
        if (!in.read(buf.data(), static_cast<std::streamsize>(bytes))) {
            throw std::invalid_argument("shot file: truncated");
        }
        for (size_t b = 0; b < nd + no; b++) {
            if ((static_cast<unsigned char>(buf[b >> 3]) >> (b & 7)) & 1) {
                if (b < nd) {
                    det_rows[s].push_back(static_cast<uint32_t>(b));
                } else {
                    obs_rows[s].push_back(static_cast<uint32_t>(b - nd));
                }
            }
        }
    }
    return {BitMatrix::from_rows(nd, std::move(det_rows)), BitMatrix::from_rows(no, std::move(obs_rows))};
}

}  // namespace qldpc
