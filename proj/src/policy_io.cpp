#include "quadtune/policy_io.hpp"

#include "quadtune/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace quadtune {

namespace {

constexpr char k_magic[4] = {'Q', 'T', 'P', 'F'};

std::uint8_t activation_tag(const std::string& name) {
    if (name == "tanh") return 0;
    if (name == "linear") return 1;
    if (name == "clipped_relu") return 2;
    throw UnsupportedActivation("unsupported activation: " + name);
}

std::string activation_from_tag(std::uint8_t tag) {
    switch (tag) {
    case 0: return "tanh";
    case 1: return "linear";
    case 2: return "clipped_relu";
    default:
        throw UnsupportedActivation("unsupported activation tag " +
                                    std::to_string(int(tag)));
    }
}

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw ConfigError("policy file truncated");
    return v;
}

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw ConfigError(std::string("policy contains non-finite ") + what);
}

} // namespace

void PolicyFile::validate() const {
    if (version != 1)
        throw ConfigError("unsupported policy version " + std::to_string(version));
    if (obs_dim <= 0 || act_dim <= 0)
        throw DimensionMismatch("policy obs_dim/act_dim must be positive");
    if (!(bound_lo < bound_hi) || !std::isfinite(bound_lo) ||
        !std::isfinite(bound_hi))
        throw ConfigError("policy action bounds must be finite with lo < hi");
    if (layers.empty()) throw DimensionMismatch("policy has no layers");
    int prev = obs_dim;
    for (const auto& l : layers) {
        if (l.rows <= 0 || l.cols <= 0)
            throw DimensionMismatch("policy layer with non-positive dims");
        if (l.cols != prev)
            throw DimensionMismatch("policy layer input does not chain");
        if (l.weights.size() != std::size_t(l.rows) * std::size_t(l.cols))
            throw DimensionMismatch("policy weight count does not match dims");
        if (l.biases.size() != std::size_t(l.rows))
            throw DimensionMismatch("policy bias count does not match dims");
        activation_tag(l.activation); // throws UnsupportedActivation
        require_finite(l.weights, "weights");
        require_finite(l.biases, "biases");
        prev = l.rows;
    }
    if (prev != act_dim)
        throw DimensionMismatch("policy output does not match act_dim");
}

PolicyFile export_policy(const DenseNet& actor, double bound_hi, double bound_lo) {
    actor.validate();
    PolicyFile pf;
    pf.obs_dim = actor.input_dim();
    pf.act_dim = actor.output_dim();
    pf.bound_hi = bound_hi;
    pf.bound_lo = bound_lo;
    pf.layers.reserve(actor.layers.size());
    for (const Layer& l : actor.layers) {
        PolicyLayer pl;
        pl.rows = l.out_dim;
        pl.cols = l.in_dim;
        pl.weights = l.weights;
        pl.biases = l.biases;
        pl.activation = activation_name(l.activation);
        pf.layers.push_back(std::move(pl));
    }
    pf.validate();
    return pf;
}

DenseNet policy_to_net(const PolicyFile& pf) {
    pf.validate();
    DenseNet net;
    net.layers.reserve(pf.layers.size());
    for (const PolicyLayer& pl : pf.layers) {
        Layer l;
        l.in_dim = pl.cols;
        l.out_dim = pl.rows;
        l.weights = pl.weights;
        l.biases = pl.biases;
        l.activation = activation_from_name(pl.activation);
        l.clip_lo = pf.bound_lo;
        l.clip_hi = pf.bound_hi;
        net.layers.push_back(std::move(l));
    }
    net.validate();
    return net;
}

namespace {

void save_json(const PolicyFile& pf, const std::string& path) {
    nlohmann::json j;
    j["version"] = pf.version;
    j["obs_dim"] = pf.obs_dim;
    j["act_dim"] = pf.act_dim;
    j["bounds"] = {{"N", pf.bound_hi}, {"Q", pf.bound_lo}};
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : pf.layers) {
        nlohmann::json jl;
        jl["rows"] = l.rows;
        jl["cols"] = l.cols;
        jl["weights"] = l.weights;
        jl["biases"] = l.biases;
        jl["activation"] = l.activation;
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open policy file for writing: " + path);
    os << j.dump(1) << '\n';
    if (!os) throw ConfigError("failed writing policy file: " + path);
}

PolicyFile parse_json(const std::string& text, const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("policy file is not valid JSON (" + path +
                          "): " + e.what());
    }
    PolicyFile pf;
    try {
        pf.version = j.at("version").get<int>();
        pf.obs_dim = j.at("obs_dim").get<int>();
        pf.act_dim = j.at("act_dim").get<int>();
        pf.bound_hi = j.at("bounds").at("N").get<double>();
        pf.bound_lo = j.at("bounds").at("Q").get<double>();
        for (const auto& jl : j.at("layers")) {
            PolicyLayer l;
            l.rows = jl.at("rows").get<int>();
            l.cols = jl.at("cols").get<int>();
            l.weights = jl.at("weights").get<std::vector<double>>();
            l.biases = jl.at("biases").get<std::vector<double>>();
            l.activation = jl.at("activation").get<std::string>();
            pf.layers.push_back(std::move(l));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("policy file schema error (" + path + "): " + e.what());
    }
    pf.validate();
    return pf;
}

void save_binary(const PolicyFile& pf, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open policy file for writing: " + path);
    os.write(k_magic, 4);
    write_pod(os, std::uint32_t(pf.version));
    write_pod(os, std::uint32_t(pf.obs_dim));
    write_pod(os, std::uint32_t(pf.act_dim));
    write_pod(os, pf.bound_hi);
    write_pod(os, pf.bound_lo);
    write_pod(os, std::uint32_t(pf.layers.size()));
    for (const auto& l : pf.layers) {
        write_pod(os, std::uint32_t(l.rows));
        write_pod(os, std::uint32_t(l.cols));
        write_pod(os, activation_tag(l.activation));
        os.write(reinterpret_cast<const char*>(l.weights.data()),
                 std::streamsize(l.weights.size() * sizeof(double)));
        os.write(reinterpret_cast<const char*>(l.biases.data()),
                 std::streamsize(l.biases.size() * sizeof(double)));
    }
    if (!os) throw ConfigError("failed writing policy file: " + path);
}

PolicyFile parse_binary(std::istream& is, const std::string& path) {
    PolicyFile pf;
    pf.version = int(read_pod<std::uint32_t>(is));
    pf.obs_dim = int(read_pod<std::uint32_t>(is));
    pf.act_dim = int(read_pod<std::uint32_t>(is));
    pf.bound_hi = read_pod<double>(is);
    pf.bound_lo = read_pod<double>(is);
    const auto n_layers = read_pod<std::uint32_t>(is);
    if (n_layers == 0 || n_layers > 64)
        throw ConfigError("policy layer count out of range in " + path);
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        PolicyLayer l;
        l.rows = int(read_pod<std::uint32_t>(is));
        l.cols = int(read_pod<std::uint32_t>(is));
        if (l.rows <= 0 || l.cols <= 0 || l.rows > 1000000 || l.cols > 1000000)
            throw ConfigError("policy layer dims out of range in " + path);
        l.activation = activation_from_tag(read_pod<std::uint8_t>(is));
        l.weights.resize(std::size_t(l.rows) * std::size_t(l.cols));
        is.read(reinterpret_cast<char*>(l.weights.data()),
                std::streamsize(l.weights.size() * sizeof(double)));
        l.biases.resize(std::size_t(l.rows));
        is.read(reinterpret_cast<char*>(l.biases.data()),
                std::streamsize(l.biases.size() * sizeof(double)));
        if (!is) throw ConfigError("policy file truncated: " + path);
        pf.layers.push_back(std::move(l));
    }
    pf.validate();
    return pf;
}

} // namespace

void save_policy(const PolicyFile& pf, const std::string& path) {
    pf.validate();
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0)
        save_json(pf, path);
    else
        save_binary(pf, path);
}

PolicyFile load_policy(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open policy file: " + path);
    char head[4] = {};
    is.read(head, 4);
    if (is.gcount() == 4 && std::memcmp(head, k_magic, 4) == 0)
        return parse_binary(is, path);
    is.clear();
    is.seekg(0);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_json(ss.str(), path);
}

std::vector<double> reconstruct_action(const PolicyFile& pf,
                                       std::span<const double> obs) {
    pf.validate();
    if (int(obs.size()) != pf.obs_dim)
        throw DimensionMismatch("reconstruct_action: observation size mismatch");
    std::vector<double> cur(obs.begin(), obs.end());
    std::vector<double> next;
    for (const PolicyLayer& l : pf.layers) {
        next.assign(std::size_t(l.rows), 0.0);
        for (int o = 0; o < l.rows; ++o) {
            const double* w = l.weights.data() + std::size_t(o) * l.cols;
            double acc = 0.0;
            for (int i = 0; i < l.cols; ++i) acc += w[i] * cur[std::size_t(i)];
            const double z = acc + l.biases[std::size_t(o)];
            if (l.activation == "tanh")
                next[std::size_t(o)] = std::tanh(z);
            else if (l.activation == "clipped_relu")
                next[std::size_t(o)] =
                    std::min(pf.bound_hi, std::max(pf.bound_lo, z));
            else
                next[std::size_t(o)] = z;
        }
        cur.swap(next);
    }
    return cur;
}

} // namespace quadtune
