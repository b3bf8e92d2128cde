#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qldpc/circuit.h"
#include "qldpc/codes.h"
#include "qldpc/gf2.h"
#include "qldpc/pauli_sim.h"

namespace qldpc {

/// Detector error matrix of one detector type. Rows are detectors ordered round-major
/// (row = round * detectors_per_round + check); columns are merged error mechanisms sorted by their
/// signature (detector rows, then observables).
struct DetectorErrorModel {
    Basis type = Basis::Z;
    BitMatrix h;    // detector x mechanism
    BitMatrix obs;  // observable x mechanism
    std::vector<double> priors;
    std::vector<uint32_t> round_of;
    size_t detectors_per_round = 0;
    size_t num_rounds = 0;
    /// Index of row 0 in the circuit's full detector list.
    size_t first_detector = 0;
    /// One circuit fault producing each column (empty for models not built from a circuit).
    std::vector<Injection> faults;

    size_t num_detectors() const { return h.rows(); }
    size_t num_mechanisms() const { return h.cols(); }

    bool operator==(const DetectorErrorModel &) const = default;

    /// Text format: "DEM type rows cols observables c rounds first_detector" header, "PRIOR j p" per column
    /// (17 significant digits), "H r j" and "O o j" entries, "ROUND r t" per row, "FAULT j instr slot pauli".
    void write_text(std::ostream &out) const;
    static DetectorErrorModel read_text(std::istream &in);
};

struct DemPair {
    DetectorErrorModel z;  // Z-detectors, X-part of each fault, carries the observables of a Z memory
    DetectorErrorModel x;  // X-detectors, Z-part of each fault
};

/// Enumerates every Pauli component of every noise instruction, propagates it to its detector and
/// observable flips (backwards sensitivity propagation), splits it into X- and Z-parts and merges
/// equal signatures with p <- p1 (1 - p2) + p2 (1 - p1). Empty signatures are dropped.
DemPair build_dem(const Circuit &noisy);

/// Data errors (one column per data qubit and detector round, flipping that round's checks) and
/// measurement errors (one column per check and syndrome round t = 1..T, flipping rounds t-1 and t),
/// each with prior p. `type` selects hz (Z) or hx (X); observables are lz or lx accordingly.
DetectorErrorModel phenomenological_dem(const CssCode &code, size_t rounds, double p, Basis type = Basis::Z);

/// Largest detector round minus smallest over one column's rows (0 for an empty column).
size_t column_round_span(const DetectorErrorModel &dem, size_t column);

struct WindowSlice {
    size_t first_row = 0;
    size_t end_row = 0;
    size_t commit_end_row = 0;
    BitMatrix sub_h;
    std::vector<double> sub_priors;
    std::vector<uint32_t> column_map;  // local column -> global mechanism
    /// Local columns whose first row falls in [first_row, commit_end_row).
    std::vector<uint32_t> commit_columns;
};

/// Number of windows: starts at 0, F, 2F, ...; the last window is the first one reaching round R.
size_t window_count(size_t num_rounds, size_t W, size_t F);

/// Window w (1-based) covers detector rounds [(w-1)F, (w-1)F + W), clipped to R, and the last window
/// extends to R. Columns are those whose first row lies in the window (entries past the window are
/// cut off); columns starting earlier belong to a previous window. Commit rows are the first F rounds
/// (all remaining rounds in the last window).
WindowSlice window_slice(const DetectorErrorModel &dem, size_t w, size_t W, size_t F);

}  // namespace qldpc
