#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "duokg/cli.hpp"

namespace duokg::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Thrown inside setters; the caller adds the key and location.
struct BadValue {
    std::string why;
};

std::uint64_t to_uint(const std::string& v) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) throw BadValue{"expected a non-negative integer"};
    return out;
}

std::size_t to_positive(const std::string& v) {
    const auto n = to_uint(v);
    if (n == 0) throw BadValue{"must be positive"};
    return static_cast<std::size_t>(n);
}

double to_double(const std::string& v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) throw BadValue{"expected a number"};
    return out;
}

bool to_bool(const std::string& v) {
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw BadValue{"expected on/off"};
}

std::string show(double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

struct Key {
    std::string name;
    std::function<void(Config&, const std::string&)> set;
    std::function<std::string(const Config&)> get;
};

#define DUOKG_SIZE_KEY(field, parse)                                                              \
    Key {                                                                                         \
        #field, [](Config& c, const std::string& v) { c.field = parse(v); },                      \
            [](const Config& c) { return std::to_string(c.field); }                               \
    }
#define DUOKG_REAL_KEY(field, check, msg)                                                         \
    Key {                                                                                         \
        #field,                                                                                   \
            [](Config& c, const std::string& v) {                                                 \
                const double x = to_double(v);                                                    \
                if (!(check)) throw BadValue{msg};                                                \
                c.field = x;                                                                      \
            },                                                                                    \
            [](const Config& c) { return show(c.field); }                                         \
    }
#define DUOKG_BOOL_KEY(field)                                                                     \
    Key {                                                                                         \
        #field, [](Config& c, const std::string& v) { c.field = to_bool(v); },                    \
            [](const Config& c) { return std::string(c.field ? "on" : "off"); }                   \
    }

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        Key{"dataset_dir",
            [](Config& c, const std::string& v) {
                if (v.empty()) throw BadValue{"must not be empty"};
                c.dataset_dir = v;
            },
            [](const Config& c) { return c.dataset_dir; }},
        Key{"output_dir",
            [](Config& c, const std::string& v) {
                if (v.empty()) throw BadValue{"must not be empty"};
                c.output_dir = v;
            },
            [](const Config& c) { return c.output_dir; }},
        DUOKG_SIZE_KEY(embedding_size, to_positive),
        DUOKG_SIZE_KEY(hidden_size, to_positive),
        DUOKG_SIZE_KEY(batch_size, to_positive),
        DUOKG_REAL_KEY(learning_rate, x > 0.0, "must be > 0"),
        DUOKG_SIZE_KEY(cluster_number, to_positive),
        DUOKG_SIZE_KEY(beam_size, to_positive),
        DUOKG_REAL_KEY(alpha, x >= 0.0, "must be >= 0"),
        DUOKG_REAL_KEY(delta, x > 0.0, "must be > 0"),
        DUOKG_REAL_KEY(epsilon, x > 0.0, "must be > 0"),
        DUOKG_SIZE_KEY(path_length, to_positive),
        DUOKG_SIZE_KEY(rollouts_train, to_positive),
        DUOKG_SIZE_KEY(rollouts_test, to_positive),
        DUOKG_SIZE_KEY(epochs, to_uint),
        DUOKG_SIZE_KEY(seed, to_uint),
        DUOKG_REAL_KEY(entropy_beta, x >= 0.0, "must be >= 0"),
        DUOKG_BOOL_KEY(baseline),
        DUOKG_BOOL_KEY(guidance),
        DUOKG_SIZE_KEY(transe_epochs, to_uint),
        DUOKG_REAL_KEY(transe_margin, x > 0.0, "must be > 0"),
        DUOKG_REAL_KEY(transe_lr, x > 0.0, "must be > 0"),
        DUOKG_SIZE_KEY(kmeans_iters, to_positive),
    };
    return table;
}

#undef DUOKG_SIZE_KEY
#undef DUOKG_REAL_KEY
#undef DUOKG_BOOL_KEY

void assign(Config& c, const std::string& key, const std::string& value, const std::string& where) {
    for (const auto& k : keys()) {
        if (k.name != key) continue;
        try {
            k.set(c, value);
        } catch (const BadValue& b) {
            throw ConfigError(where + ": key '" + key + "': " + b.why + " (got '" + value + "')");
        }
        return;
    }
    throw ConfigError(where + ": unknown key '" + key + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& k : keys()) n.push_back(k.name);
        return n;
    }();
    return names;
}

void Config::validate() const {
    if (hidden_size != embedding_size) {
        throw ConfigError("key 'hidden_size': must equal embedding_size (" + std::to_string(embedding_size) + ")");
    }
    if (rollouts_train < 2 && baseline) {
        throw ConfigError("key 'rollouts_train': a batch-mean baseline needs at least 2 rollouts");
    }
}

train::TrainConfig Config::train_config(std::size_t workers) const {
    train::TrainConfig t;
    t.batch_size = batch_size;
    t.learning_rate = learning_rate;
    t.path_length = path_length;
    t.rollouts_train = rollouts_train;
    t.rollouts_test = rollouts_test;
    t.beam_size = beam_size;
    t.alpha = alpha;
    t.delta = delta;
    t.epsilon = epsilon;
    t.entropy_beta = entropy_beta;
    t.baseline = baseline;
    t.guidance = guidance;
    t.epochs = epochs;
    t.seed = seed;
    t.workers = workers;
    t.validate();
    return t;
}

Config parse_config(std::istream& in, const std::string& source) {
    Config c;
    std::string line;
    std::size_t no = 0;
    std::vector<std::string> seen;
    while (std::getline(in, line)) {
        ++no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = source + " line " + std::to_string(no);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key before '='");
        for (const auto& s : seen)
            if (s == key) throw ConfigError(where + ": key '" + key + "' given twice");
        seen.push_back(key);
        assign(c, key, value, where);
    }
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, path.string());
}

void apply_override(Config& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("--set '" + assignment + "': expected key=value");
    const std::string key = trim(assignment.substr(0, eq));
    assign(config, key, trim(assignment.substr(eq + 1)), "--set");
}

void write_config(std::ostream& out, const Config& config) {
    for (const auto& k : keys()) out << k.name << " = " << k.get(config) << '\n';
}

}  // namespace duokg::cli
