#include "qldpc/scheduler.h"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qldpc {

const char *direction_name(Direction d) {
    static const char *names[] = {"E", "N", "S", "W"};
    return names[static_cast<int>(d)];
}

namespace {

Direction parse_direction(const std::string &s) {
    for (int d = 0; d < 4; d++) {
        if (s == direction_name(static_cast<Direction>(d))) {
            return static_cast<Direction>(d);
        }
    }
    throw std::invalid_argument("unknown direction '" + s + "'");
}

}  // namespace

SignAssignment assign_signs(const std::vector<ClassicalEdge> &edges, Rng &rng) {
    uint32_t max_check = 0, max_bit = 0;
    for (const auto &e : edges) {
        max_check = std::max(max_check, e.check + 1);
        max_bit = std::max(max_bit, e.bit + 1);
    }
    std::vector<int64_t> mu(max_check, 0);
    std::vector<int64_t> nu(max_bit, 0);
    SignAssignment sigma(edges.size());
    for (size_t k = 0; k < edges.size(); k++) {
        double xi = rng.uniform();
        int64_t &m = mu[edges[k].check];
        int64_t &v = nu[edges[k].bit];
        if (m + v > 0 || (m + v == 0 && xi >= 0.5)) {
            sigma[k] = +1;
            m -= 1;
            v -= 1;
        } else {
            sigma[k] = -1;
            m += 1;
            v += 1;
        }
    }
    return sigma;
}

SignAssignment assign_signs(const std::vector<ClassicalEdge> &edges, uint64_t seed) {
    Rng rng(seed);
    return assign_signs(edges, rng);
}

DirectedTanner assign_directions(const CssCode &code, const SignAssignment &sigma_h, const SignAssignment &sigma_v) {
    const ProductLayout &lay = code.layout;
    if (lay.empty()) {
        throw std::invalid_argument("assign_directions: code has no product layout");
    }
    if (sigma_h.size() != lay.horizontal_edges.size() || sigma_v.size() != lay.vertical_edges.size()) {
        throw std::invalid_argument("assign_directions: sign assignment size mismatch");
    }
    DirectedTanner dt;
    for (size_t r = 0; r < code.hz.rows(); r++) {
        const auto &row = code.hz.row(r);
        for (size_t k = 0; k < row.size(); k++) {
            uint32_t e = lay.hz_edge[r][k];
            Direction d;
            if (lay.is_lower(row[k])) {
                d = sigma_v[e] < 0 ? Direction::N : Direction::S;  // left vertical
            } else {
                d = sigma_h[e] < 0 ? Direction::W : Direction::E;  // upper horizontal
            }
            dt.edges.push_back({row[k], static_cast<uint32_t>(r), true, d, 0});
        }
    }
    for (size_t r = 0; r < code.hx.rows(); r++) {
        const auto &row = code.hx.row(r);
        for (size_t k = 0; k < row.size(); k++) {
            uint32_t e = lay.hx_edge[r][k];
            Direction d;
            if (lay.is_lower(row[k])) {
                d = sigma_h[e] < 0 ? Direction::E : Direction::W;  // lower horizontal
            } else {
                d = sigma_v[e] < 0 ? Direction::S : Direction::N;  // right vertical
            }
            dt.edges.push_back({row[k], static_cast<uint32_t>(r), false, d, 0});
        }
    }
    return dt;
}

std::vector<uint32_t> color_edges(const std::vector<std::pair<uint32_t, uint32_t>> &edges, uint32_t *num_colors) {
    constexpr uint32_t none = std::numeric_limits<uint32_t>::max();
    uint32_t nl = 0, nr = 0;
    for (const auto &[u, v] : edges) {
        nl = std::max(nl, u + 1);
        nr = std::max(nr, v + 1);
    }
    std::vector<uint32_t> degree(nl + nr, 0);
    for (const auto &[u, v] : edges) {
        degree[u]++;
        degree[nl + v]++;
    }
    uint32_t delta = edges.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
    // at[vertex * delta + c] = edge with color c at that vertex.
    std::vector<uint32_t> at(static_cast<size_t>(nl + nr) * delta, none);
    std::vector<uint32_t> color(edges.size(), none);
    auto slot = [&](uint32_t vertex, uint32_t c) -> uint32_t & { return at[static_cast<size_t>(vertex) * delta + c]; };
    auto free_color = [&](uint32_t vertex) {
        for (uint32_t c = 0; c < delta; c++) {
            if (slot(vertex, c) == none) {
                return c;
            }
        }
        throw std::logic_error("color_edges: vertex has no free color");
    };
    std::vector<uint32_t> path;
    for (uint32_t e = 0; e < edges.size(); e++) {
        uint32_t u = edges[e].first;
        uint32_t v = nl + edges[e].second;
        uint32_t a = free_color(u);
        if (slot(v, a) != none) {
            uint32_t b = free_color(v);
            // Swap a and b along the alternating path that starts at v with color a; it cannot reach u.
            path.clear();
            uint32_t cur = v;
            uint32_t c = a;
            while (slot(cur, c) != none) {
                uint32_t f = slot(cur, c);
                path.push_back(f);
                uint32_t fu = edges[f].first;
                uint32_t fv = nl + edges[f].second;
                cur = (cur == fu) ? fv : fu;
                c = (c == a) ? b : a;
            }
            for (uint32_t f : path) {
                slot(edges[f].first, color[f]) = none;
                slot(nl + edges[f].second, color[f]) = none;
            }
            for (uint32_t f : path) {
                color[f] = (color[f] == a) ? b : a;
                slot(edges[f].first, color[f]) = f;
                slot(nl + edges[f].second, color[f]) = f;
            }
        }
        color[e] = a;
        slot(u, a) = e;
        slot(v, a) = e;
    }
    if (num_colors) {
        *num_colors = delta;
    }
    return color;
}

namespace {

// Syndrome-side vertex id shared by both check types.
uint32_t check_vertex(const TannerEdge &e, size_t num_z) {
    return e.is_z ? e.check : static_cast<uint32_t>(num_z + e.check);
}

}  // namespace

std::vector<uint32_t> color_edges_greedy(const std::vector<std::pair<uint32_t, uint32_t>> &edges,
                                         uint32_t *num_colors) {
    uint32_t nl = 0, nr = 0;
    for (const auto &[u, v] : edges) {
        nl = std::max(nl, u + 1);
        nr = std::max(nr, v + 1);
    }
    std::vector<uint32_t> degree(nl + nr, 0);
    for (const auto &[u, v] : edges) {
        degree[u]++;
        degree[nl + v]++;
    }
    std::vector<uint32_t> order(edges.size());
    for (uint32_t e = 0; e < edges.size(); e++) {
        order[e] = e;
    }
    auto line_degree = [&](uint32_t e) { return degree[edges[e].first] + degree[nl + edges[e].second]; };
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return line_degree(a) > line_degree(b); });
    std::vector<std::vector<uint32_t>> used(nl + nr);
    std::vector<uint32_t> color(edges.size(), 0);
    uint32_t count = 0;
    for (uint32_t e : order) {
        auto &a = used[edges[e].first];
        auto &b = used[nl + edges[e].second];
        uint32_t c = 0;
        while (std::find(a.begin(), a.end(), c) != a.end() || std::find(b.begin(), b.end(), c) != b.end()) {
            c++;
        }
        a.push_back(c);
        b.push_back(c);
        color[e] = c;
        count = std::max(count, c + 1);
    }
    if (num_colors) {
        *num_colors = count;
    }
    return color;
}

void color_directions(DirectedTanner &dt, ColoringMethod method) {
    size_t num_z = 0;
    for (const auto &e : dt.edges) {
        if (e.is_z) {
            num_z = std::max<size_t>(num_z, e.check + 1);
        }
    }
    for (int d = 0; d < 4; d++) {
        std::vector<uint32_t> idx;
        std::vector<std::pair<uint32_t, uint32_t>> sub;
        for (uint32_t i = 0; i < dt.edges.size(); i++) {
            if (static_cast<int>(dt.edges[i].direction) == d) {
                idx.push_back(i);
                sub.emplace_back(dt.edges[i].data, check_vertex(dt.edges[i], num_z));
            }
        }
        uint32_t count = 0;
        auto colors = method == ColoringMethod::Konig ? color_edges(sub, &count) : color_edges_greedy(sub, &count);
        for (size_t k = 0; k < idx.size(); k++) {
            dt.edges[idx[k]].color = colors[k];
        }
        dt.colors[d] = count;
    }
}

std::array<uint32_t, 4> direction_degrees(const DirectedTanner &dt, size_t num_data, size_t num_z, size_t num_x) {
    std::array<uint32_t, 4> out{};
    std::vector<uint32_t> deg((num_data + num_z + num_x) * 4, 0);
    for (const auto &e : dt.edges) {
        int d = static_cast<int>(e.direction);
        uint32_t a = ++deg[e.data * 4 + d];
        uint32_t b = ++deg[(num_data + check_vertex(e, num_z)) * 4 + d];
        out[d] = std::max({out[d], a, b});
    }
    return out;
}

Schedule build_schedule(const CssCode &code, const DirectedTanner &dt) {
    Schedule s;
    s.num_data = code.n;
    s.num_z = code.hz.rows();
    s.num_x = code.hx.rows();
    for (int d = 0; d < 4; d++) {
        size_t base = s.layers.size();
        for (uint32_t c = 0; c < dt.colors[d]; c++) {
            s.layers.emplace_back();
            s.layer_direction.push_back(static_cast<Direction>(d));
        }
        for (const auto &e : dt.edges) {
            if (static_cast<int>(e.direction) != d) {
                continue;
            }
            if (e.color >= dt.colors[d]) {
                throw std::logic_error("build_schedule: edge color out of range");
            }
            auto &layer = s.layers[base + e.color];
            if (e.is_z) {
                layer.emplace_back(e.data, s.z_qubit(e.check));
            } else {
                layer.emplace_back(s.x_qubit(e.check), e.data);
            }
        }
    }
    std::vector<uint32_t> last_layer(s.num_qubits(), std::numeric_limits<uint32_t>::max());
    for (uint32_t li = 0; li < s.layers.size(); li++) {
        std::sort(s.layers[li].begin(), s.layers[li].end());
        for (const auto &[c, t] : s.layers[li]) {
            if (last_layer[c] == li || last_layer[t] == li) {
                throw std::logic_error("build_schedule: scheduling conflict in layer " + std::to_string(li));
            }
            last_layer[c] = li;
            last_layer[t] = li;
        }
    }
    return s;
}

void Schedule::write_text(std::ostream &out) const {
    out << "SCHEDULE " << num_data << " " << num_z << " " << num_x << "\n";
    out << "R Z";
    for (size_t i = 0; i < num_z; i++) {
        out << " " << z_qubit(i);
    }
    out << "\nR X";
    for (size_t i = 0; i < num_x; i++) {
        out << " " << x_qubit(i);
    }
    out << "\n";
    for (size_t li = 0; li < layers.size(); li++) {
        out << "CX " << direction_name(layer_direction[li]);
        for (const auto &[c, t] : layers[li]) {
            out << " " << c << " " << t;
        }
        out << "\n";
    }
    out << "M Z";
    for (size_t i = 0; i < num_z; i++) {
        out << " " << z_qubit(i);
    }
    out << "\nM X";
    for (size_t i = 0; i < num_x; i++) {
        out << " " << x_qubit(i);
    }
    out << "\nROUND\n";
}

Schedule Schedule::read_text(std::istream &in) {
    Schedule s;
    std::string line;
    bool header = false, done = false;
    while (!done && std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::string op;
        ls >> op;
        if (op == "SCHEDULE") {
            ls >> s.num_data >> s.num_z >> s.num_x;
            header = true;
        } else if (!header) {
            throw std::invalid_argument("schedule text: missing SCHEDULE header");
        } else if (op == "R" || op == "M") {
            std::string basis;
            ls >> basis;
            size_t expected = basis == "Z" ? s.num_z : s.num_x;
            uint32_t first = basis == "Z" ? s.z_qubit(0) : s.x_qubit(0);
            size_t count = 0;
            uint32_t q;
            while (ls >> q) {
                if (q != first + count) {
                    throw std::invalid_argument("schedule text: unexpected qubit in " + op + " " + basis);
                }
                count++;
            }
            if (count != expected) {
                throw std::invalid_argument("schedule text: wrong qubit count in " + op + " " + basis);
            }
        } else if (op == "CX") {
            std::string dir;
            ls >> dir;
            s.layer_direction.push_back(parse_direction(dir));
            s.layers.emplace_back();
            uint32_t c, t;
            while (ls >> c >> t) {
                if (c >= s.num_qubits() || t >= s.num_qubits()) {
                    throw std::invalid_argument("schedule text: qubit out of range");
                }
                s.layers.back().emplace_back(c, t);
            }
        } else if (op == "ROUND") {
            done = true;
        } else {
            throw std::invalid_argument("schedule text: unknown opcode '" + op + "'");
        }
    }
    if (!done) {
        throw std::invalid_argument("schedule text: missing ROUND marker");
    }
    return s;
}

bool check_deterministic(const CssCode &code, const Schedule &schedule, std::vector<std::string> *failures) {
    size_t nq = schedule.num_qubits();
    bool ok = true;
    auto report = [&](const std::string &msg) {
        ok = false;
        if (failures) {
            failures->push_back(msg);
        }
    };
    for (int type = 0; type < 2; type++) {
        bool is_z = type == 0;
        const BitMatrix &h = is_z ? code.hz : code.hx;
        for (size_t r = 0; r < h.rows(); r++) {
            BitVec x(nq), z(nq);
            uint32_t anc = is_z ? schedule.z_qubit(r) : schedule.x_qubit(r);
            (is_z ? z : x).set(anc);
            for (size_t li = schedule.layers.size(); li-- > 0;) {
                for (const auto &[c, t] : schedule.layers[li]) {
                    if (x.get(c)) {
                        x.flip(t);
                    }
                    if (z.get(t)) {
                        z.flip(c);
                    }
                }
            }
            // Pre-round operator: the check on the data, nothing else on the data, and only Paulis that the
            // resets stabilize (Z on |0> syndromes, X on |+> syndromes).
            const BitVec &main = is_z ? z : x;
            const BitVec &other = is_z ? x : z;
            bool bad = false;
            std::vector<uint32_t> support;
            for (uint32_t q = 0; q < schedule.num_data; q++) {
                if (main.get(q)) {
                    support.push_back(q);
                }
                bad |= other.get(q);
            }
            bad |= support != h.row(r);
            for (size_t q = schedule.num_data; q < nq && !bad; q++) {
                bool is_x_anc = q >= schedule.num_data + schedule.num_z;
                bad |= is_x_anc ? z.get(q) : x.get(q);
            }
            if (bad) {
                report(std::string(is_z ? "Z" : "X") + "-check " + std::to_string(r) +
                       " is not measured deterministically");
            }
        }
    }
    return ok;
}

namespace {

std::vector<std::vector<uint32_t>> column_adjacency(const BitMatrix &h) {
    std::vector<std::vector<uint32_t>> adj(h.cols());
    for (size_t r = 0; r < h.rows(); r++) {
        for (uint32_t c : h.row(r)) {
            adj[c].push_back(static_cast<uint32_t>(r));
        }
    }
    return adj;
}

}  // namespace

bool check_four_cycles(const CssCode &code, const DirectedTanner &dt, size_t *num_cycles,
                       std::vector<std::string> *failures) {
    // Direction lookup per (check, position in row).
    std::vector<std::vector<Direction>> zdir(code.hz.rows()), xdir(code.hx.rows());
    for (size_t r = 0; r < code.hz.rows(); r++) {
        zdir[r].resize(code.hz.row(r).size());
    }
    for (size_t r = 0; r < code.hx.rows(); r++) {
        xdir[r].resize(code.hx.row(r).size());
    }
    for (const auto &e : dt.edges) {
        const auto &row = e.is_z ? code.hz.row(e.check) : code.hx.row(e.check);
        auto it = std::lower_bound(row.begin(), row.end(), e.data);
        if (it == row.end() || *it != e.data) {
            throw std::invalid_argument("check_four_cycles: edge not present in check matrix");
        }
        (e.is_z ? zdir : xdir)[e.check][it - row.begin()] = e.direction;
    }
    auto dir_of = [&](bool is_z, uint32_t check, uint32_t data) {
        const auto &row = is_z ? code.hz.row(check) : code.hx.row(check);
        auto it = std::lower_bound(row.begin(), row.end(), data);
        return (is_z ? zdir : xdir)[check][it - row.begin()];
    };
    auto zadj = column_adjacency(code.hz);
    size_t cycles = 0;
    bool ok = true;
    std::vector<std::vector<uint32_t>> shared(code.hz.rows());
    std::vector<uint32_t> touched;
    for (uint32_t x = 0; x < code.hx.rows(); x++) {
        touched.clear();
        for (uint32_t d : code.hx.row(x)) {
            for (uint32_t z : zadj[d]) {
                if (shared[z].empty()) {
                    touched.push_back(z);
                }
                shared[z].push_back(d);
            }
        }
        for (uint32_t z : touched) {
            const auto &ds = shared[z];
            for (size_t a = 0; a < ds.size(); a++) {
                for (size_t b = a + 1; b < ds.size(); b++) {
                    cycles++;
                    unsigned mask = 0;
                    mask |= 1u << static_cast<int>(dir_of(true, z, ds[a]));
                    mask |= 1u << static_cast<int>(dir_of(true, z, ds[b]));
                    mask |= 1u << static_cast<int>(dir_of(false, x, ds[a]));
                    mask |= 1u << static_cast<int>(dir_of(false, x, ds[b]));
                    if (mask != 0xF) {
                        ok = false;
                        if (failures && failures->size() < 20) {
                            failures->push_back("4-cycle (d" + std::to_string(ds[a]) + ", z" + std::to_string(z) +
                                                ", d" + std::to_string(ds[b]) + ", x" + std::to_string(x) +
                                                ") misses a direction");
                        }
                    }
                }
            }
            shared[z].clear();
        }
    }
    if (num_cycles) {
        *num_cycles = cycles;
    }
    return ok;
}

ScheduleCheck verify_schedule(const CssCode &code, const DirectedTanner &dt, const Schedule &schedule) {
    ScheduleCheck out;
    out.deterministic = check_deterministic(code, schedule, &out.failures);
    out.four_cycles_ok = check_four_cycles(code, dt, &out.four_cycles, &out.failures);
    return out;
}

namespace {

// Runs the sign / direction / coloring attempts and keeps the first attempt that is better than all
// earlier ones under `better(depth, best_so_far)`.
template <typename Better>
DepthSearch search_depth(const CssCode &code, size_t attempts, uint64_t seed, SignMode mode, ColoringMethod coloring,
                         Better &&better) {
    if (attempts < 1) {
        throw std::invalid_argument("minimize_depth: attempts must be >= 1");
    }
    const ProductLayout &lay = code.layout;
    bool share = mode == SignMode::Shared && lay.horizontal_edges == lay.vertical_edges;
    DepthSearch out;
    size_t best = 0;
    bool have = false;
    for (size_t a = 0; a < attempts; a++) {
        Rng rng(derive_seed(seed, a));
        SignAssignment sh = assign_signs(lay.horizontal_edges, rng);
        SignAssignment sv = share ? sh : assign_signs(lay.vertical_edges, rng);
        DirectedTanner dt = assign_directions(code, sh, sv);
        size_t depth;
        if (coloring == ColoringMethod::Konig) {
            // The exact coloring uses max-degree colors, so only the winner needs to be colored.
            auto deg = direction_degrees(dt, code.n, code.hz.rows(), code.hx.rows());
            depth = deg[0] + deg[1] + deg[2] + deg[3];
        } else {
            color_directions(dt, coloring);
            depth = dt.depth();
        }
        out.histogram[depth]++;
        if (!have || better(depth, best)) {
            have = true;
            best = depth;
            out.best_attempt = a;
            out.tanner = std::move(dt);
        }
    }
    if (coloring == ColoringMethod::Konig) {
        color_directions(out.tanner, coloring);
        if (out.tanner.depth() != best) {
            throw std::logic_error("minimize_depth: coloring used more colors than the max degree");
        }
    }
    out.schedule = build_schedule(code, out.tanner);
    return out;
}

}  // namespace

DepthSearch minimize_depth(const CssCode &code, size_t attempts, uint64_t seed, SignMode mode,
                           ColoringMethod coloring) {
    return search_depth(code, attempts, seed, mode, coloring, [](size_t d, size_t best) { return d < best; });
}

DepthSearch schedule_with_depth(const CssCode &code, size_t target_depth, size_t attempts, uint64_t seed,
                                SignMode mode, ColoringMethod coloring) {
    DepthSearch out = search_depth(code, attempts, seed, mode, coloring, [&](size_t d, size_t best) {
        return best != target_depth && d == target_depth;
    });
    if (out.schedule.depth() != target_depth) {
        throw std::runtime_error("schedule_with_depth: no attempt reached depth " + std::to_string(target_depth));
    }
    return out;
}

}  // namespace qldpc
