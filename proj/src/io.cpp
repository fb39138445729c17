#include "dephase/io.hpp"

#include "dephase/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dephase {

using nlohmann::json;

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    out << text;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_order_csv(const std::filesystem::path& path, const OrderSeries& series)
{
    std::string s = "t,Re_z1,Im_z1,R\n";
    for (const auto& o : series) {
        s += format_double(o.t) + ',' + format_double(o.z1.real()) + ','
             + format_double(o.z1.imag()) + ',' + format_double(o.R) + '\n';
    }
    write_text(path, s);
}

OrderSeries read_order_csv(const std::filesystem::path& path)
{
    std::istringstream in(read_text(path));
    std::string line;
    std::getline(in, line);
    if (line.rfind("t,Re_z1,Im_z1,R", 0) != 0)
        throw ConfigError(path.string() + " is not an order-series CSV");
    OrderSeries out;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        double t, re, im, R;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &re, &im, &R) != 4)
            throw ConfigError("malformed row in " + path.string() + ": " + line);
        out.push_back({t, {re, im}, R});
    }
    return out;
}

void write_snapshot_csv(const std::filesystem::path& path, const MixedField& field)
{
    std::string s = "k,omega,re,im\n";
    const auto& grid = field.grid();
    for (int k = -field.k_max(); k <= field.k_max(); ++k)
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const cplx v = field(k, j);
            s += std::to_string(k) + ',' + format_double(grid[j]) + ',' + format_double(v.real())
                 + ',' + format_double(v.imag()) + '\n';
        }
    write_text(path, s);
}

namespace {

template <class T>
void put_le(std::string& out, T v)
{
    static_assert(sizeof(T) == 8);
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i)
        out.push_back(char((bits >> (8 * i)) & 0xff));
}

template <class T>
T get_le(const std::string& in, std::size_t& pos)
{
    if (pos + 8 > in.size())
        throw ConfigError("truncated snapshot file");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= std::uint64_t(static_cast<unsigned char>(in[pos + std::size_t(i)])) << (8 * i);
    pos += 8;
    T v;
    std::memcpy(&v, &bits, 8);
    return v;
}

constexpr char magic[] = "DPHSNAP1";

} // namespace

void write_snapshot_binary(const std::filesystem::path& path, const MixedField& field)
{
    std::string s(magic, 8);
    put_le<std::uint64_t>(s, std::uint64_t(field.k_max()));
    put_le<std::uint64_t>(s, std::uint64_t(field.grid().size()));
    put_le<double>(s, field.grid().half_width());
    put_le<double>(s, field.time());
    for (const auto& v : field.values()) {
        put_le<double>(s, v.real());
        put_le<double>(s, v.imag());
    }
    write_text(path, s);
}

MixedField read_snapshot_binary(const std::filesystem::path& path)
{
    const std::string in = read_text(path);
    if (in.size() < 8 || in.compare(0, 8, magic, 8) != 0)
        throw ConfigError(path.string() + " is not a snapshot dump");
    std::size_t pos = 8;
    const auto k_max = get_le<std::uint64_t>(in, pos);
    const auto n = get_le<std::uint64_t>(in, pos);
    const auto W = get_le<double>(in, pos);
    const auto t = get_le<double>(in, pos);
    MixedField field(OmegaGrid(W, n), int(k_max), t);
    for (auto& v : field.values()) {
        const double re = get_le<double>(in, pos);
        const double im = get_le<double>(in, pos);
        v = {re, im};
    }
    if (pos != in.size())
        throw ConfigError("trailing bytes in snapshot " + path.string());
    return field;
}

json to_json(const NormReport& report)
{
    json arr = json::array();
    for (const auto& e : report)
        arr.push_back({{"lambda", e.lambda},
                       {"p", e.p},
                       {"value", e.value},
                       {"argsup_k", e.argsup_k},
                       {"argsup_eta", e.argsup_eta},
                       {"t", e.t}});
    return arr;
}

json to_json(const DecayFit& fit)
{
    return {{"slope", fit.slope},
            {"r2", fit.r_squared},
            {"intercept", fit.intercept},
            {"t_lo", fit.t_lo},
            {"t_hi", fit.t_hi},
            {"n_samples", fit.n_samples},
            {"shrunk", fit.shrunk}};
}

json check_report(const std::string& name, double max_ratio, double argmax_t,
                  const std::optional<DecayFit>& fit,
                  const std::optional<double>& refinement_stability)
{
    return {{"name", name},
            {"max_ratio", max_ratio},
            {"argmax_t", argmax_t},
            {"fit", fit ? to_json(*fit) : json(nullptr)},
            {"refinement_stability",
             refinement_stability ? json(*refinement_stability) : json(nullptr)}};
}

std::string fnv1a_hex(std::string_view bytes)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_checksum(const std::filesystem::path& path)
{
    return fnv1a_hex(read_text(path));
}

} // namespace dephase
