#include "lps/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lps {

void write_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), "cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        require(static_cast<bool>(out), "write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw InvalidArgument("cannot replace '" + path + "': " + ec.message());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json to_json(const GridFunction& f) {
    const Domain& d = f.domain();
    json values = json::array();
    for (std::size_t c = 0; c < f.cells(); ++c) {
        json row = json::array();
        for (double v : f.at(c)) row.push_back(v);
        values.push_back(std::move(row));
    }
    return {{"domain", {{"kind", to_string(d.kind())}, {"n", d.dim()}, {"N", d.N()}, {"L", d.L()}}},
            {"r", std::isinf(f.r()) ? json("inf") : json(f.r())},
            {"values", std::move(values)}};
}

GridFunction grid_function_from_json(const json& j) {
    try {
        const json& dj = j.at("domain");
        const DomainKind kind = domain_kind_from_string(dj.at("kind").get<std::string>());
        const Domain d(kind, dj.at("N").get<int>(), dj.contains("L") ? dj.at("L").get<double>() : 1.0);
        if (dj.contains("n")) require(dj.at("n").get<int>() == d.dim(), "domain dimension does not match its kind");
        const json& rj = j.at("r");
        const double r = rj.is_string() ? (rj.get<std::string>() == "inf" ? kInf : std::stod(rj.get<std::string>())) : rj.get<double>();
        const json& vals = j.at("values");
        require(vals.is_array() && vals.size() == d.cells(), "value count does not match the domain");
        const int M = static_cast<int>(vals.at(0).size());
        std::vector<double> flat;
        flat.reserve(d.cells() * M);
        for (const auto& row : vals) {
            require(row.is_array() && static_cast<int>(row.size()) == M, "values must share one coordinate count");
            for (const auto& v : row) flat.push_back(v.get<double>());
        }
        return GridFunction(d, M, r, std::move(flat));
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed GridFunction file: ") + e.what());
    }
}

void save_grid_function(const std::string& path, const GridFunction& f) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
        write_atomic(path, to_csv(f));
    else
        write_atomic(path, to_json(f).dump() + "\n");
}

GridFunction load_grid_function(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw InvalidArgument("cannot parse '" + path + "': " + e.what());
    }
    return grid_function_from_json(j);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const GridFunction& f) {
    const Domain& d = f.domain();
    std::string out = d.dim() == 1 ? "x1" : "x1,x2";
    for (int k = 1; k <= f.M(); ++k) out += ",c" + std::to_string(k);
    out += "\n";
    for (std::size_t c = 0; c < f.cells(); ++c) {
        const Point x = d.point(c);
        out += format_double(x[0]);
        if (d.dim() == 2) out += "," + format_double(x[1]);
        for (double v : f.at(c)) out += "," + format_double(v);
        out += "\n";
    }
    return out;
}

json to_json(const NormEstimate& e) {
    json trace = json::array();
    for (const auto& t : e.trace) trace.push_back({t.iteration, t.ratio});
    return {{"operator", e.op}, {"variant", to_string(e.variant)}, {"p", e.p}, {"q", e.q},
            {"r", std::isinf(e.r) ? json("inf") : json(e.r)}, {"M", e.M}, {"estimate", e.estimate},
            {"seed", e.seed}, {"best_restart", e.best_restart}, {"trace", std::move(trace)}};
}

std::string martingale_csv(const MartingaleTrialSpec& spec, const std::vector<MartingaleTrialRow>& rows) {
    std::string out = "trial,depth,q,p,statistic,value\n";
    for (const auto& r : rows)
        out += std::to_string(r.trial) + "," + std::to_string(spec.depth) + "," + format_double(spec.q) + "," +
               format_double(spec.p) + "," + r.statistic + "," + format_double(r.value) + "\n";
    return out;
}

std::string kernel_profile_csv(const CzProfile& profile) {
    std::string out = "scale,size-bound,gradient-bound\n";
    for (const auto& r : profile.rows) out += format_double(r.rho) + "," + format_double(r.size) + "," + format_double(r.gradient) + "\n";
    return out;
}

}  // namespace lps
