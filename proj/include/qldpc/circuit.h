#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qldpc/codes.h"
#include "qldpc/scheduler.h"

namespace qldpc {

enum class Gate : uint8_t {
    RZ,
    RX,
    MZ,
    MX,
    CX,      // targets are (control, target) pairs
    DEPOL1,  // X, Y, Z each with p / 3
    DEPOL2,  // 15 two-qubit Paulis each with p / 15, targets are pairs
    FLIP_X,  // X with p
    FLIP_Z,  // Z with p
};

const char *gate_name(Gate g);
bool is_noise(Gate g);

struct Instruction {
    Gate gate = Gate::RZ;
    double p = 0.0;
    std::vector<uint32_t> targets;

    bool operator==(const Instruction &) const = default;
};

enum class LayerKind : uint8_t { DataInit, Reset, Cnot, Measure, DataReadout };

const char *layer_kind_name(LayerKind k);

/// One time step. Instructions apply in order.
struct Layer {
    LayerKind kind = LayerKind::Reset;
    uint32_t round = 0;
    std::vector<Instruction> ops;

    bool operator==(const Layer &) const = default;
};

enum class Basis : uint8_t { Z, X };

struct Detector {
    Basis type = Basis::Z;  // Z-detectors come from Z-checks
    uint32_t round = 0;     // detector round within its type
    uint32_t check = 0;
    std::vector<uint32_t> records;

    bool operator==(const Detector &) const = default;
};

/// Memory experiment: data init, T rounds of resets / CNOT layers / measurements, transversal data
/// readout. Qubits: data 0..n-1, Z-syndromes n..n+mz-1, X-syndromes after. Measurement records are
/// numbered in instruction order: each round measures all Z-syndromes then all X-syndromes, and the
/// final readout appends one record per data qubit.
///
/// Detectors are listed with all detectors of the memory basis first (R = T + 1 rounds: D(0) = M(1),
/// D(t) = M(t) + M(t+1), D(T) = M(T) + data reconstruction), then the other type (T - 1 rounds of
/// consecutive comparisons), each round-major. Observables are the logical operators of the memory
/// basis (lz for Z) read from the final data records.
class Circuit {
   public:
    size_t num_data = 0;
    size_t num_z = 0;
    size_t num_x = 0;
    size_t rounds = 0;
    Basis basis = Basis::Z;
    std::vector<Layer> layers;
    std::vector<Detector> detectors;
    std::vector<std::vector<uint32_t>> observables;

    size_t num_qubits() const { return num_data + num_z + num_x; }
    size_t num_measurements() const;
    size_t num_detectors() const { return detectors.size(); }
    size_t num_observables() const { return observables.size(); }
    /// Detectors of one type; they form a contiguous block.
    size_t num_detectors_of(Basis type) const;
    size_t first_detector_of(Basis type) const;
    /// Number of noise instructions' target slots (single qubits or pairs).
    size_t num_noise_locations() const;

    bool operator==(const Circuit &) const = default;

    /// Header "CIRCUIT n mz mx T basis"; one line per layer "LAYER kind round | op ; op ; ...", ops as
    /// "NAME [p] targets"; then "DETECTOR type round check records..." and "OBSERVABLE records..." lines.
    /// Probabilities are printed with 17 significant digits so the format round-trips exactly.
    void write_text(std::ostream &out) const;
    static Circuit read_text(std::istream &in);
    /// Export in the widely used stabilizer-circuit text format (convenience).
    void write_stim(std::ostream &out) const;
};

Circuit build_memory_experiment(const CssCode &code, const Schedule &schedule, size_t rounds, Basis basis = Basis::Z);

struct NoiseSpec {
    double p = 0.0;
    /// Scale factors per channel relative to p.
    double idle = 1.0;
    double cx = 1.0;
    double reset = 1.0;
    double measure = 1.0;
    /// Idle depolarizing on syndrome qubits during CNOT layers.
    bool syndrome_idle = true;
    /// Idle depolarizing on data qubits during the reset and measurement ticks.
    bool data_idle_reset_measure = true;
};

/// Standard circuit-level depolarizing noise: DEPOL1(p) on every idle qubit in each CNOT layer and on
/// data during reset and measurement ticks, DEPOL2(p) after every CNOT, and X (Z) flips with p after
/// Z-type (X-type) syndrome resets and before their measurements. Data init and readout stay noiseless.
/// The two idle switches in NoiseSpec turn off parts of the idle noise.
Circuit attach_noise(const Circuit &c, const NoiseSpec &noise);
Circuit attach_noise(const Circuit &c, double p);

}  // namespace qldpc
