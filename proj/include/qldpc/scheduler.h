#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qldpc/codes.h"
#include "qldpc/rng.h"

namespace qldpc {

enum class Direction : uint8_t { E = 0, N = 1, S = 2, W = 3 };

const char *direction_name(Direction d);

/// sigma[e] in {-1, +1} for each classical edge e, in input order.
using SignAssignment = std::vector<int8_t>;

/// Balanced sign assignment: one xi draw per edge, edges processed in list order.
SignAssignment assign_signs(const std::vector<ClassicalEdge> &edges, Rng &rng);
SignAssignment assign_signs(const std::vector<ClassicalEdge> &edges, uint64_t seed);

/// One syndrome-extraction edge. `check` indexes hz rows when is_z, hx rows otherwise.
struct TannerEdge {
    uint32_t data = 0;
    uint32_t check = 0;
    bool is_z = false;
    Direction direction = Direction::E;
    uint32_t color = 0;
};

struct DirectedTanner {
    std::vector<TannerEdge> edges;
    /// Number of colors used in each direction (E, N, S, W).
    std::array<uint32_t, 4> colors{};

    size_t depth() const { return colors[0] + colors[1] + colors[2] + colors[3]; }
};

/// Turns classical signs into directions. sigma_h covers layout.horizontal_edges, sigma_v covers
/// layout.vertical_edges. Lower horizontal edges get E for -, upper ones the opposite; left vertical
/// edges get N for -, right ones the opposite. Colors are left at zero.
DirectedTanner assign_directions(const CssCode &code, const SignAssignment &sigma_h, const SignAssignment &sigma_v);

/// Proper edge coloring of a bipartite multigraph-free edge list with exactly max-degree colors
/// (alternating-path recoloring). Returns the color of each edge; *num_colors receives the count.
std::vector<uint32_t> color_edges(const std::vector<std::pair<uint32_t, uint32_t>> &edges, uint32_t *num_colors);

/// First-fit coloring of the line graph, edges visited by decreasing line-graph degree (ties in input order).
/// May use more than max-degree colors.
std::vector<uint32_t> color_edges_greedy(const std::vector<std::pair<uint32_t, uint32_t>> &edges,
                                         uint32_t *num_colors);

enum class ColoringMethod {
    /// Exactly max-degree colors per direction.
    Konig,
    /// Largest-first greedy; depth can exceed the degree bound.
    Greedy,
};

/// Colors every direction class of dt in place.
void color_directions(DirectedTanner &dt, ColoringMethod method = ColoringMethod::Konig);

/// Per-direction max degree, which equals the color count of that direction.
std::array<uint32_t, 4> direction_degrees(const DirectedTanner &dt, size_t num_data, size_t num_z, size_t num_x);

/// One round of syndrome extraction. Qubits: data 0..n-1, Z-syndromes n..n+mz-1, X-syndromes after.
struct Schedule {
    size_t num_data = 0;
    size_t num_z = 0;
    size_t num_x = 0;
    /// CNOT layers in E, N, S, W order; each entry is (control, target).
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> layers;
    /// Direction of each layer.
    std::vector<Direction> layer_direction;

    size_t depth() const { return layers.size(); }
    size_t num_qubits() const { return num_data + num_z + num_x; }
    uint32_t z_qubit(size_t i) const { return static_cast<uint32_t>(num_data + i); }
    uint32_t x_qubit(size_t i) const { return static_cast<uint32_t>(num_data + num_z + i); }

    bool operator==(const Schedule &) const = default;

    /// Layered text format: "SCHEDULE n mz mx", "R Z/X ..." resets, "CX dir c t c t ..." per layer,
    /// "M Z/X ..." measurements, "ROUND" marker.
    void write_text(std::ostream &out) const;
    static Schedule read_text(std::istream &in);
};

/// Emits the CNOT layers. Throws std::logic_error if two gates of a layer share a qubit.
Schedule build_schedule(const CssCode &code, const DirectedTanner &dt);

struct ScheduleCheck {
    bool deterministic = true;
    bool four_cycles_ok = true;
    size_t four_cycles = 0;
    std::vector<std::string> failures;

    bool ok() const { return deterministic && four_cycles_ok; }
};

/// Back-propagates every syndrome measurement through the layers: the pre-round operator must be the
/// check itself on the data, Z-only on Z-syndromes and X-only on X-syndromes.
bool check_deterministic(const CssCode &code, const Schedule &schedule, std::vector<std::string> *failures = nullptr);

/// Every (data, Z-check, data, X-check) cycle must use all four directions.
bool check_four_cycles(const CssCode &code, const DirectedTanner &dt, size_t *num_cycles = nullptr,
                       std::vector<std::string> *failures = nullptr);

ScheduleCheck verify_schedule(const CssCode &code, const DirectedTanner &dt, const Schedule &schedule);

enum class SignMode {
    /// Horizontal and vertical classical graphs get independent sign draws.
    Independent,
    /// When both factors share one classical graph, the vertical signs copy the horizontal ones.
    Shared,
};

struct DepthSearch {
    DirectedTanner tanner;
    Schedule schedule;
    std::map<size_t, size_t> histogram;  // depth -> attempts
    size_t best_attempt = 0;
};

/// Repeats sign draw, direction assignment and coloring; keeps the first minimum-depth attempt.
DepthSearch minimize_depth(const CssCode &code, size_t attempts, uint64_t seed, SignMode mode = SignMode::Shared,
                           ColoringMethod coloring = ColoringMethod::Konig);

/// Same attempts as minimize_depth, keeping the first attempt whose depth equals target_depth.
/// Throws std::runtime_error if none does.
DepthSearch schedule_with_depth(const CssCode &code, size_t target_depth, size_t attempts, uint64_t seed,
                                SignMode mode = SignMode::Shared, ColoringMethod coloring = ColoringMethod::Konig);

}  // namespace qldpc
