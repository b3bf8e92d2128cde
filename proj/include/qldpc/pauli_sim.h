#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qldpc/circuit.h"
#include "qldpc/gf2.h"

namespace qldpc {

/// Pauli error on one shot, phases ignored.
struct PauliFrame {
    BitVec x;
    BitVec z;

    explicit PauliFrame(size_t num_qubits = 0) : x(num_qubits), z(num_qubits) {}

    /// Applies a non-noise instruction. Measurements append their flip bits to *records (if given).
    /// Resets and measurements leave the gauge component at zero.
    void apply(const Instruction &op, std::vector<uint8_t> *records = nullptr);
};

/// Detector and observable bits, one row per shot.
struct ShotBatch {
    BitMatrix detectors;
    BitMatrix observables;

    size_t shots() const { return detectors.rows(); }
    bool operator==(const ShotBatch &) const = default;

    /// Header line "SHOTS shots detectors observables", then per shot the detector bits followed by
    /// the observable bits, packed little-endian into ceil((D + O) / 8) bytes.
    void write(std::ostream &out) const;
    static ShotBatch read(std::istream &in);
};

/// Pauli codes: bit 0 = X, bit 1 = Z on the first qubit; bits 2 and 3 the same on the second qubit of a pair.
/// So 1 = X, 2 = Z, 3 = Y.
struct Injection {
    /// Index in the flattened instruction list (all ops of all layers, in order).
    uint32_t instruction = 0;
    /// Position in that instruction's target list; two-qubit ops count pairs.
    uint32_t slot = 0;
    uint8_t pauli = 0;

    bool operator==(const Injection &) const = default;
};

/// Monte Carlo sampling of the noisy circuit. Shots are simulated 1024 at a time in bit-packed words;
/// the noise of instruction i in block b is drawn from a generator keyed by (seed, i, b), so the
/// output depends only on (circuit, shots, seed).
ShotBatch sample(const Circuit &c, size_t shots, uint64_t seed);

/// Noise-free simulation where shot s suffers exactly the Paulis listed in injections[s]. Each
/// injection takes effect at the position of its instruction (which must be a noise instruction).
ShotBatch simulate_injections(const Circuit &c, const std::vector<std::vector<Injection>> &injections);

/// Location of every noise instruction in flattened order: (instruction index, layer index, op index).
struct NoiseSite {
    uint32_t instruction;
    uint32_t layer;
    uint32_t op;
};
std::vector<NoiseSite> noise_sites(const Circuit &c);

}  // namespace qldpc
