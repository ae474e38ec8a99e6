#include "rlct/experiment_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "rlct/error.hpp"

namespace rlct {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw ConfigError("config: " + where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("config: missing field " + where + "." + key);
    return *it;
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError("");
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!v.is_number_unsigned()) throw ConfigError("");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError("");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError("");
        }
        return v.get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config: field " + where + "." + key + " has the wrong type");
    }
}

json prior_json(const PriorSpec& p) {
    return {{"alpha", p.alpha}, {"shape", p.shape}, {"rate", p.rate}, {"b_lo", p.b_lo}, {"b_hi", p.b_hi}};
}

json sampler_json(const SamplerSettings& s) {
    return {{"chains", s.chains},
            {"iterations", s.iterations},
            {"burn_in", s.burn_in},
            {"thinning", s.thinning},
            {"proposal_scales", {{"weights", s.scales.weights}, {"rates", s.scales.rates}}},
            {"seed", s.seed}};
}

json to_json_object(const ExperimentConfig& cfg) {
    const auto& q = cfg.truth.params();
    return {{"sig", {{"M", cfg.sig.M}, {"H", cfg.sig.H}, {"r", cfg.sig.r}}},
            {"truth", {{"weights", std::vector<double>(q.weights().begin(), q.weights().end())},
                       {"rates", q.rate_rows()}}},
            {"n_grid", cfg.n_grid},
            {"replications", cfg.replications},
            {"prior", prior_json(cfg.prior)},
            {"sampler", sampler_json(cfg.sampler)},
            {"truncation_tol", cfg.truncation_tol},
            {"output_path", cfg.output_path},
            {"wbic", cfg.wbic}};
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
T parse_number(std::string_view s, const char* name) {
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError("csv: bad value '" + std::string(s) + "' in column " + name);
    return v;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");

    try {
        const json& sig = field(root, "sig", "config");
        ExperimentConfig cfg;
        cfg.sig = ModelSignature(get<int>(sig, "M", "sig"), get<int>(sig, "H", "sig"), get<int>(sig, "r", "sig"));
        const json& truth = field(root, "truth", "config");
        cfg.truth = TrueModel(MixtureParams::from_rows(get<std::vector<double>>(truth, "weights", "truth"),
                                                       get<std::vector<std::vector<double>>>(truth, "rates", "truth")));
        cfg.n_grid = get<std::vector<std::size_t>>(root, "n_grid", "config");
        cfg.replications = get<std::size_t>(root, "replications", "config");

        const json& prior = field(root, "prior", "config");
        cfg.prior.alpha = get<double>(prior, "alpha", "prior");
        cfg.prior.shape = get<double>(prior, "shape", "prior");
        cfg.prior.rate = get<double>(prior, "rate", "prior");
        cfg.prior.b_lo = get<double>(prior, "b_lo", "prior");
        cfg.prior.b_hi = get<double>(prior, "b_hi", "prior");

        const json& s = field(root, "sampler", "config");
        cfg.sampler.chains = get<std::size_t>(s, "chains", "sampler");
        cfg.sampler.iterations = get<std::size_t>(s, "iterations", "sampler");
        cfg.sampler.burn_in = get<std::size_t>(s, "burn_in", "sampler");
        cfg.sampler.thinning = get<std::size_t>(s, "thinning", "sampler");
        const json& scales = field(s, "proposal_scales", "sampler");
        cfg.sampler.scales.weights = get<double>(scales, "weights", "sampler.proposal_scales");
        cfg.sampler.scales.rates = get<double>(scales, "rates", "sampler.proposal_scales");
        cfg.sampler.seed = get<std::uint64_t>(s, "seed", "sampler");

        cfg.truncation_tol = get<double>(root, "truncation_tol", "config");
        cfg.output_path = get<std::string>(root, "output_path", "config");
        if (root.contains("wbic")) cfg.wbic = get<bool>(root, "wbic", "config");
        cfg.validate();
        return cfg;
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_config_json(const ExperimentConfig& cfg) {
    json j = to_json_object(cfg);
    j.erase("output_path");
    return j.dump();
}

std::string config_to_json(const ExperimentConfig& cfg) { return to_json_object(cfg).dump(2); }

std::string config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_config_json(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const std::string& csv_header() {
    static const std::string header =
        "config_hash,M,H,r,n,rep,seed,Gn,L0,wbic_lambda,accept_w,accept_b,ess_proxy,wall_ms";
    return header;
}

std::string format_record(const ExperimentRecord& rec) {
    std::ostringstream os;
    os << rec.config_hash << ',' << rec.M << ',' << rec.H << ',' << rec.r << ',' << rec.n << ',' << rec.rep << ','
       << rec.seed << ',' << format_double(rec.gn) << ',' << format_double(rec.l0) << ','
       << (rec.wbic_lambda ? format_double(*rec.wbic_lambda) : std::string()) << ',' << format_double(rec.accept_w)
       << ',' << format_double(rec.accept_b) << ',' << format_double(rec.ess_proxy) << ',' << rec.wall_ms;
    return os.str();
}

ExperimentRecord parse_record(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto cols = split(line, ',');
    if (cols.size() != 14) throw ConfigError("csv: expected 14 columns, got " + std::to_string(cols.size()));
    ExperimentRecord rec;
    rec.config_hash = std::string(cols[0]);
    rec.M = parse_number<int>(cols[1], "M");
    rec.H = parse_number<int>(cols[2], "H");
    rec.r = parse_number<int>(cols[3], "r");
    rec.n = parse_number<std::size_t>(cols[4], "n");
    rec.rep = parse_number<std::size_t>(cols[5], "rep");
    rec.seed = parse_number<std::uint64_t>(cols[6], "seed");
    rec.gn = parse_number<double>(cols[7], "Gn");
    rec.l0 = parse_number<double>(cols[8], "L0");
    if (!cols[9].empty()) rec.wbic_lambda = parse_number<double>(cols[9], "wbic_lambda");
    rec.accept_w = parse_number<double>(cols[10], "accept_w");
    rec.accept_b = parse_number<double>(cols[11], "accept_b");
    rec.ess_proxy = parse_number<double>(cols[12], "ess_proxy");
    rec.wall_ms = parse_number<std::int64_t>(cols[13], "wall_ms");
    return rec;
}

std::vector<ExperimentRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) return {};
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header()) throw ConfigError("csv: unexpected header in " + path);
    std::vector<ExperimentRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(parse_record(line));
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace rlct
