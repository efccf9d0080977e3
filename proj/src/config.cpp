#include "saddle/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "saddle/parse.hpp"

namespace saddle {

// ---------------------------------------------------------------------------
// Text helpers

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (s.empty() || ec != std::errc() || ptr != last) throw ConfigError("expected a number, got '" + s + "'");
    return v;
}

long long parse_int(std::string_view raw) {
    const std::string s = trim(raw);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("expected an integer, got '" + s + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view raw) {
    const std::string s = trim(raw);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("expected an unsigned integer, got '" + s + "'");
    return v;
}

bool parse_bool(std::string_view raw) {
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("expected true or false, got '" + s + "'");
}

Vector parse_vector(std::string_view s) {
    const auto parts = split(s, ',');
    Vector v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_double(parts[i]);
    return v;
}

Matrix parse_matrix(std::string_view s) {
    const auto rows = split(s, ';');
    std::vector<Vector> parsed;
    for (const auto& r : rows) parsed.push_back(parse_vector(r));
    const Eigen::Index cols = parsed.front().size();
    Matrix m(static_cast<Eigen::Index>(parsed.size()), cols);
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        if (parsed[i].size() != cols) throw ConfigError("matrix rows have different lengths in '" + std::string(s) + "'");
        m.row(static_cast<Eigen::Index>(i)) = parsed[i].transpose();
    }
    return m;
}

std::vector<Vector> parse_point_list(std::string_view s) {
    std::vector<Vector> pts;
    for (const auto& p : split(s, ';')) pts.push_back(parse_vector(p));
    return pts;
}

std::vector<std::vector<int>> parse_blocks(std::string_view s) {
    std::vector<std::vector<int>> blocks;
    for (const auto& b : split(s, ';')) {
        std::vector<int> block;
        for (const auto& i : split(b, ',')) block.push_back(static_cast<int>(parse_int(i)));
        blocks.push_back(std::move(block));
    }
    return blocks;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string format_vector(const Vector& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Config files

InitDistribution::Kind parse_init_kind(std::string_view raw) {
    const std::string s = trim(raw);
    if (s == "auto") return InitDistribution::Kind::Auto;
    if (s == "box") return InitDistribution::Kind::UniformBox;
    if (s == "sphere") return InitDistribution::Kind::UniformSphere;
    if (s == "dirichlet") return InitDistribution::Kind::DirichletUniform;
    if (s == "points") return InitDistribution::Kind::Points;
    throw ConfigError("unknown init distribution '" + s + "' (expected auto, box, sphere, dirichlet, points)");
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    bool n_inits_set = false;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        auto fail = [&](const std::string& msg) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + msg);
        };
        if (eq == std::string::npos) fail("expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) fail("missing key");
        if (value.empty()) fail("missing value for '" + key + "'");
        if (!seen.insert(key).second) fail("key '" + key + "' given twice");

        try {
            if (key == "problem") cfg.problem = value;
            else if (key == "method") cfg.method = parse_method(value);
            else if (key == "alpha") cfg.alpha = parse_double(value);
            else if (key == "blocks") cfg.blocks = parse_blocks(value);
            else if (key == "n_inits") {
                const long long n = parse_int(value);
                if (n < 1 || n > 100000000) fail("n_inits must be between 1 and 1e8");
                cfg.n_inits = static_cast<int>(n);
                n_inits_set = true;
            } else if (key == "init") cfg.init.kind = parse_init_kind(value);
            else if (key == "box_lo") cfg.init.lo = parse_vector(value);
            else if (key == "box_hi") cfg.init.hi = parse_vector(value);
            else if (key == "points") cfg.init.points = parse_point_list(value);
            else if (key == "max_iters") cfg.limits.max_iters = parse_int(value);
            else if (key == "tol_grad") cfg.limits.tol_grad = parse_double(value);
            else if (key == "tol_step") cfg.limits.tol_step = parse_double(value);
            else if (key == "divergence_radius") cfg.limits.divergence_radius = parse_double(value);
            else if (key == "saddle_match_radius") cfg.limits.saddle_match_radius = parse_double(value);
            else if (key == "master_seed") cfg.master_seed = parse_u64(value);
            else if (key == "output") cfg.output_path = value;
            else if (key == "summary") cfg.summary_path = value;
            else if (key == "strict_stepsize") cfg.strict_stepsize = parse_bool(value);
            else fail("unknown key '" + key + "'");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            if (msg.rfind("line ", 0) == 0) throw;
            fail(msg);
        }
    }
    if (cfg.init.kind == InitDistribution::Kind::Points) {
        if (cfg.init.points.empty()) throw ConfigError("init = points needs a 'points' list");
        if (!n_inits_set) cfg.n_inits = static_cast<int>(cfg.init.points.size());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_text(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "problem = " << c.problem << '\n';
    os << "method = " << to_string(c.method) << '\n';
    os << "alpha = " << format_double(c.alpha) << '\n';
    if (!c.blocks.empty()) {
        os << "blocks = ";
        for (std::size_t b = 0; b < c.blocks.size(); ++b) {
            if (b) os << ';';
            for (std::size_t j = 0; j < c.blocks[b].size(); ++j) os << (j ? "," : "") << c.blocks[b][j];
        }
        os << '\n';
    }
    os << "n_inits = " << c.n_inits << '\n';
    os << "init = " << to_string(c.init.kind) << '\n';
    os << "box_lo = " << format_vector(c.init.lo) << '\n';
    os << "box_hi = " << format_vector(c.init.hi) << '\n';
    if (!c.init.points.empty()) {
        os << "points = ";
        for (std::size_t i = 0; i < c.init.points.size(); ++i) os << (i ? ";" : "") << format_vector(c.init.points[i]);
        os << '\n';
    }
    os << "max_iters = " << c.limits.max_iters << '\n';
    os << "tol_grad = " << format_double(c.limits.tol_grad) << '\n';
    os << "tol_step = " << format_double(c.limits.tol_step) << '\n';
    os << "divergence_radius = " << format_double(c.limits.divergence_radius) << '\n';
    os << "saddle_match_radius = " << format_double(c.limits.saddle_match_radius) << '\n';
    os << "master_seed = " << c.master_seed << '\n';
    if (!c.output_path.empty()) os << "output = " << c.output_path << '\n';
    if (!c.summary_path.empty()) os << "summary = " << c.summary_path << '\n';
    os << "strict_stepsize = " << (c.strict_stepsize ? "true" : "false") << '\n';
    return os.str();
}

}  // namespace saddle
