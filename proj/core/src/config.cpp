#include "adel/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "adel/errors.hpp"

namespace adel {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Nested bracketed value: either a scalar token or a list of values.
struct Node {
    bool is_list = false;
    std::string scalar;
    std::vector<Node> items;
};

Node parse_value(const std::string& text, std::size_t& pos) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) throw ConfigError("unexpected end of value");
    Node node;
    if (text[pos] == '[') {
        node.is_list = true;
        ++pos;
        for (;;) {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
            if (pos >= text.size()) throw ConfigError("unterminated '[' in value");
            if (text[pos] == ']') { ++pos; break; }
            node.items.push_back(parse_value(text, pos));
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
            if (pos < text.size() && text[pos] == ',') { ++pos; continue; }
            if (pos < text.size() && text[pos] == ']') { ++pos; break; }
            if (pos >= text.size()) throw ConfigError("unterminated '[' in value");
            throw ConfigError("expected ',' or ']' in list value");
        }
    } else {
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ',' && text[pos] != ']') ++pos;
        node.scalar = trim(text.substr(start, pos - start));
        if (node.scalar.empty()) throw ConfigError("empty scalar in value");
    }
    return node;
}

Node parse_value(const std::string& text) {
    std::size_t pos = 0;
    Node n = parse_value(text, pos);
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos != text.size()) throw ConfigError("trailing characters after value: '" + text + "'");
    return n;
}

double to_real(const Node& n, const std::string& key) {
    if (n.is_list) throw ConfigError("key '" + key + "' expects a scalar");
    const Cplx c = parse_complex(n.scalar);
    if (c.imag() != 0.0) throw ConfigError("key '" + key + "' expects a real number");
    return c.real();
}

long to_int(const Node& n, const std::string& key) {
    const double v = to_real(n, key);
    const long r = static_cast<long>(std::llround(v));
    if (static_cast<double>(r) != v) throw ConfigError("key '" + key + "' expects an integer");
    return r;
}

bool to_bool(const Node& n, const std::string& key) {
    if (n.is_list) throw ConfigError("key '" + key + "' expects true/false");
    if (n.scalar == "true") return true;
    if (n.scalar == "false") return false;
    throw ConfigError("key '" + key + "' expects true/false");
}

std::vector<double> to_real_list(const Node& n, const std::string& key) {
    if (!n.is_list) throw ConfigError("key '" + key + "' expects a bracketed list");
    std::vector<double> out;
    for (const auto& item : n.items) out.push_back(to_real(item, key));
    return out;
}

std::vector<int> to_int_list(const Node& n, const std::string& key) {
    if (!n.is_list) throw ConfigError("key '" + key + "' expects a bracketed list");
    std::vector<int> out;
    for (const auto& item : n.items) out.push_back(static_cast<int>(to_int(item, key)));
    return out;
}

Mat to_matrix(const Node& n, const std::string& key) {
    if (!n.is_list || n.items.empty()) throw ConfigError("key '" + key + "' expects a matrix [[..],..]");
    const std::size_t rows = n.items.size();
    std::size_t cols = 0;
    for (const auto& row : n.items) {
        if (!row.is_list) throw ConfigError("key '" + key + "': matrix rows must be bracketed lists");
        if (cols == 0) cols = row.items.size();
        if (row.items.size() != cols) throw ConfigError("key '" + key + "': ragged matrix");
    }
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const Node& e = n.items[r].items[c];
            if (e.is_list) throw ConfigError("key '" + key + "': matrix entries must be scalars");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_complex(e.scalar);
        }
    return m;
}

std::vector<Mat> to_matrix_list(const Node& n, const std::string& key) {
    if (!n.is_list) throw ConfigError("key '" + key + "' expects a list of matrices");
    std::vector<Mat> out;
    for (const auto& item : n.items) out.push_back(to_matrix(item, key));
    return out;
}

struct Section {
    std::string name;
    std::map<std::string, Node> entries;
    std::vector<std::string> order;  // insertion order, for diagnostics
};

std::vector<Section> split_sections(const std::string& text) {
    std::vector<Section> sections;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            Section s;
            s.name = trim(line.substr(1, line.size() - 2));
            if (s.name.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            sections.push_back(std::move(s));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        if (sections.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside of any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        auto& sec = sections.back();
        if (sec.entries.count(key))
            throw ConfigError("duplicate key '" + key + "' in section [" + sec.name + "]");
        sec.entries[key] = parse_value(value);
        sec.order.push_back(key);
    }
    return sections;
}

const Node* find(const Section& s, const std::string& key) {
    const auto it = s.entries.find(key);
    return it == s.entries.end() ? nullptr : &it->second;
}

void require_known_keys(const Section& s, const std::vector<std::string>& known) {
    for (const auto& key : s.order) {
        bool ok = false;
        for (const auto& k : known)
            if (k == key) { ok = true; break; }
        if (!ok) throw ConfigError("unknown key '" + key + "' in section [" + s.name + "]");
    }
}

const Node& require(const Section& s, const std::string& key) {
    const Node* n = find(s, key);
    if (!n) throw ConfigError("section [" + s.name + "] is missing required key '" + key + "'");
    return *n;
}

Lindbladian parse_generator(const Section& s, const std::string& ham_key,
                            const std::string& jumps_key, const std::string& rates_key) {
    Lindbladian gen;
    gen.hamiltonian = to_matrix(require(s, ham_key), ham_key);
    const Node* jumps = find(s, jumps_key);
    const Node* rates = find(s, rates_key);
    if (jumps) {
        const auto ops = to_matrix_list(*jumps, jumps_key);
        std::vector<double> r(ops.size(), 1.0);
        if (rates) {
            r = to_real_list(*rates, rates_key);
            if (r.size() != ops.size())
                throw ConfigError("'" + rates_key + "' length does not match '" + jumps_key + "'");
        }
        for (std::size_t i = 0; i < ops.size(); ++i) gen.jumps.push_back({ops[i], r[i]});
    } else if (rates) {
        throw ConfigError("'" + rates_key + "' given without '" + jumps_key + "'");
    }
    return gen;
}

} // namespace

Cplx parse_complex(const std::string& token) {
    const std::string t = trim(token);
    if (t.empty()) throw ConfigError("empty number");
    // Forms: a | bi | a+bi | a-bi  (either part in C scientific notation).
    const char* str = t.c_str();
    char* end = nullptr;
    double first = std::strtod(str, &end);
    if (end == str) {
        // Allow a bare "i" / "-i" / "+i".
        std::string rest = t;
        double sign = 1.0;
        if (!rest.empty() && (rest[0] == '+' || rest[0] == '-')) {
            sign = rest[0] == '-' ? -1.0 : 1.0;
            rest = rest.substr(1);
        }
        if (rest == "i") return Cplx(0.0, sign);
        throw ConfigError("malformed number '" + t + "'");
    }
    if (*end == '\0') return Cplx(first, 0.0);
    if (*end == 'i' && *(end + 1) == '\0') return Cplx(0.0, first);
    if (*end == '+' || *end == '-') {
        const char* second_start = end;
        char* end2 = nullptr;
        double second = std::strtod(second_start, &end2);
        if (end2 == second_start) {
            // "a+i" / "a-i"
            const std::string rest(second_start);
            if (rest == "+i") return Cplx(first, 1.0);
            if (rest == "-i") return Cplx(first, -1.0);
            throw ConfigError("malformed number '" + t + "'");
        }
        if (*end2 == 'i' && *(end2 + 1) == '\0') return Cplx(first, second);
    }
    throw ConfigError("malformed number '" + t + "'");
}

CompositeModel RunConfig::build_model() const {
    if (generic_model) return *generic_model;
    if (tls) return tls_normalized ? build_normalized_model(*tls) : build_full_model(*tls);
    throw ConfigError("no model configured: provide a [model]/[subsystem] block or a [tlsbath] block");
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    const auto sections = split_sections(text);

    std::optional<CompositeModel> model;
    std::vector<FastSubsystem> subsystems;
    bool saw_model = false, saw_tls = false;

    for (const auto& s : sections) {
        if (s.name == "model") {
            if (saw_model) throw ConfigError("duplicate [model] section");
            saw_model = true;
            require_known_keys(s, {"dim_b", "epsilon", "h_tilde_b", "coupling_b",
                                   "hamiltonian_b", "jumps_b", "jump_rates_b"});
            CompositeModel m;
            const int dim_b = static_cast<int>(to_int(require(s, "dim_b"), "dim_b"));
            m.h_tilde_b = to_matrix(require(s, "h_tilde_b"), "h_tilde_b");
            m.coupling_b = to_matrix(require(s, "coupling_b"), "coupling_b");
            m.epsilon = to_real(require(s, "epsilon"), "epsilon");
            if (find(s, "hamiltonian_b")) {
                m.gen_b = parse_generator(s, "hamiltonian_b", "jumps_b", "jump_rates_b");
            } else {
                m.gen_b = Lindbladian::zero(dim_b);
            }
            if (m.coupling_b.rows() != dim_b || m.h_tilde_b.rows() != dim_b)
                throw ConfigError("[model]: dim_b does not match the matrices");
            model = std::move(m);
        } else if (s.name == "subsystem") {
            require_known_keys(s, {"hamiltonian", "coupling", "jumps", "jump_rates"});
            FastSubsystem sub;
            sub.gen = parse_generator(s, "hamiltonian", "jumps", "jump_rates");
            sub.coupling = to_matrix(require(s, "coupling"), "coupling");
            subsystems.push_back(std::move(sub));
        } else if (s.name == "tlsbath") {
            if (saw_tls) throw ConfigError("duplicate [tlsbath] section");
            saw_tls = true;
            require_known_keys(s, {"g", "gamma_minus", "delta_c", "v_tilde", "fock_dim",
                                   "delta_q", "delta_q_min", "delta_q_max", "n_tls", "units"});
            TlsBathParams p;
            p.g = to_real(require(s, "g"), "g");
            p.gamma_minus = to_real(require(s, "gamma_minus"), "gamma_minus");
            p.delta_c = to_real(require(s, "delta_c"), "delta_c");
            p.v_tilde = to_real(require(s, "v_tilde"), "v_tilde");
            if (find(s, "fock_dim")) p.fock_dim = static_cast<int>(to_int(*find(s, "fock_dim"), "fock_dim"));
            if (find(s, "delta_q")) {
                p.delta_q = to_real_list(*find(s, "delta_q"), "delta_q");
            } else {
                if (!find(s, "delta_q_min") || !find(s, "delta_q_max") || !find(s, "n_tls"))
                    throw ConfigError("[tlsbath]: give delta_q or delta_q_min/delta_q_max/n_tls");
                p.delta_q = TlsBathParams::uniform_detunings(
                    to_real(*find(s, "delta_q_min"), "delta_q_min"),
                    to_real(*find(s, "delta_q_max"), "delta_q_max"),
                    static_cast<int>(to_int(*find(s, "n_tls"), "n_tls")));
            }
            if (const Node* u = find(s, "units")) {
                if (u->is_list) throw ConfigError("'units' expects normalized|hz");
                if (u->scalar == "normalized") cfg.tls_normalized = true;
                else if (u->scalar == "hz") cfg.tls_normalized = false;
                else throw ConfigError("'units' expects normalized|hz");
            }
            cfg.tls = std::move(p);
        } else if (s.name == "reduce") {
            require_known_keys(s, {"order", "gauge"});
            if (find(s, "order")) cfg.order = static_cast<int>(to_int(*find(s, "order"), "order"));
            if (const Node* g = find(s, "gauge")) {
                if (g->is_list) throw ConfigError("'gauge' expects cancel-hs1|traceless");
                if (g->scalar == "cancel-hs1") cfg.gauge = Gauge::CancelHs1;
                else if (g->scalar == "traceless") cfg.gauge = Gauge::Traceless;
                else throw ConfigError("unknown gauge '" + g->scalar + "'");
            }
        } else if (s.name == "verify") {
            require_known_keys(s, {"orders", "epsilons"});
            if (find(s, "orders")) cfg.verify.orders = to_int_list(*find(s, "orders"), "orders");
            if (find(s, "epsilons")) cfg.verify.epsilons = to_real_list(*find(s, "epsilons"), "epsilons");
        } else if (s.name == "simulate") {
            require_known_keys(s, {"horizon", "steps", "epsilons", "rho_s0", "off_manifold",
                                   "dimension_cap"});
            if (find(s, "horizon")) cfg.simulate.horizon = to_real(*find(s, "horizon"), "horizon");
            if (find(s, "steps")) cfg.simulate.steps = static_cast<int>(to_int(*find(s, "steps"), "steps"));
            if (find(s, "epsilons")) cfg.simulate.epsilons = to_real_list(*find(s, "epsilons"), "epsilons");
            if (find(s, "rho_s0")) cfg.simulate.rho_s0 = to_matrix(*find(s, "rho_s0"), "rho_s0");
            if (find(s, "off_manifold")) cfg.simulate.off_manifold = to_bool(*find(s, "off_manifold"), "off_manifold");
            if (find(s, "dimension_cap"))
                cfg.simulate.dimension_cap = static_cast<int>(to_int(*find(s, "dimension_cap"), "dimension_cap"));
        } else if (s.name == "sweep") {
            require_known_keys(s, {"delta_c_min", "delta_c_max", "delta_c_count",
                                   "v_tilde_min", "v_tilde_max", "v_tilde_count"});
            SweepGrid grid;
            grid.delta_c_min = to_real(require(s, "delta_c_min"), "delta_c_min");
            grid.delta_c_max = to_real(require(s, "delta_c_max"), "delta_c_max");
            grid.delta_c_count = static_cast<int>(to_int(require(s, "delta_c_count"), "delta_c_count"));
            grid.v_tilde_min = to_real(require(s, "v_tilde_min"), "v_tilde_min");
            grid.v_tilde_max = to_real(require(s, "v_tilde_max"), "v_tilde_max");
            grid.v_tilde_count = static_cast<int>(to_int(require(s, "v_tilde_count"), "v_tilde_count"));
            cfg.sweep_grid = grid;
        } else if (s.name == "output") {
            require_known_keys(s, {"dir"});
            if (const Node* d = find(s, "dir")) {
                if (d->is_list) throw ConfigError("'dir' expects a path string");
                cfg.out_dir = d->scalar;
            }
        } else if (s.name == "run") {
            require_known_keys(s, {"seed"});
            if (find(s, "seed")) cfg.seed = static_cast<std::uint64_t>(to_int(*find(s, "seed"), "seed"));
        } else if (s.name == "tolerances") {
            require_known_keys(s, {"residual_order0", "residual_order1", "residual_order2",
                                   "cptp_exponent_order1", "cptp_exponent_order2",
                                   "cptp_min_choi", "noise_floor"});
            auto set = [&](const char* key, double& slot) {
                if (const Node* n = find(s, key)) slot = to_real(*n, key);
            };
            set("residual_order0", cfg.tol.residual_order0);
            set("residual_order1", cfg.tol.residual_order1);
            set("residual_order2", cfg.tol.residual_order2);
            set("cptp_exponent_order1", cfg.tol.cptp_exponent_order1);
            set("cptp_exponent_order2", cfg.tol.cptp_exponent_order2);
            set("cptp_min_choi", cfg.tol.cptp_min_choi);
            set("noise_floor", cfg.tol.noise_floor);
        } else {
            throw ConfigError("unknown section [" + s.name + "]");
        }
    }

    if (saw_model) {
        if (subsystems.empty())
            throw ConfigError("[model] requires at least one [subsystem] section");
        model->fast = std::move(subsystems);
        cfg.generic_model = std::move(model);
    } else if (!subsystems.empty()) {
        throw ConfigError("[subsystem] sections require a [model] section");
    }
    if (cfg.generic_model && cfg.tls)
        throw ConfigError("give either a generic [model] or a [tlsbath] block, not both");
    if (cfg.order < 0 || cfg.order > 2) throw ConfigError("order must be 0, 1 or 2");
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace adel
