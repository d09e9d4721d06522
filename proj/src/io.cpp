#include "lipgeo/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lipgeo::io {
namespace {

using nlohmann::json;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InputError("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    return out;
}

double to_double(const std::string& s, const std::string& path) {
    try {
        return std::stod(s);
    } catch (...) {
        throw InputError("bad number '" + s + "' in " + path);
    }
}

}  // namespace

FiniteMetricSpace read_space_json(const std::string& path) {
    const json j = load_json(path);
    if (!j.contains("points") || !j["points"].is_array() || j["points"].empty())
        throw InputError(path + ": missing points");
    const std::string metric = j.value("metric", std::string("euclidean"));

    std::vector<std::string> ids;
    std::vector<double> weights;
    std::vector<double> coords;
    std::size_t dim = 0;
    for (const auto& p : j["points"]) {
        if (p.contains("id") && p["id"].is_string())
            ids.push_back(p["id"].get<std::string>());
        else if (p.contains("id"))
            ids.push_back(std::to_string(p["id"].get<long long>()));
        else
            ids.push_back("p" + std::to_string(ids.size()));
        weights.push_back(p.value("weight", 1.0));
        if (p.contains("coords")) {
            const auto& c = p["coords"];
            if (dim == 0) dim = c.size();
            if (c.size() != dim) throw InputError(path + ": ragged coords");
            for (const auto& v : c) coords.push_back(v.get<double>());
        }
    }

    if (metric == "matrix") {
        if (!j.contains("matrix")) throw InputError(path + ": metric=matrix needs matrix");
        const std::size_t n = ids.size();
        std::vector<double> m;
        m.reserve(n * n);
        for (const auto& row : j["matrix"]) {
            if (row.size() != n) throw InputError(path + ": matrix not square");
            for (const auto& v : row) m.push_back(v.get<double>());
        }
        if (m.size() != n * n) throw InputError(path + ": matrix not square");
        return FiniteMetricSpace::from_matrix(std::move(ids), std::move(m),
                                              std::move(weights));
    }
    if (coords.empty()) throw InputError(path + ": coordinate metric needs coords");
    const MetricKind kind =
        metric == "max" ? MetricKind::MaxNorm : MetricKind::Euclidean;
    if (metric != "max" && metric != "euclidean")
        throw InputError(path + ": unknown metric '" + metric + "'");
    return FiniteMetricSpace::from_coords(std::move(ids), std::move(coords), dim,
                                          kind, std::move(weights));
}

void write_space_json(const std::string& path, const FiniteMetricSpace& space) {
    nlohmann::ordered_json j;
    j["metric"] = space.metric_kind() == MetricKind::MaxNorm ? "max"
                  : space.metric_kind() == MetricKind::Matrix ? "matrix"
                                                              : "euclidean";
    j["points"] = nlohmann::ordered_json::array();
    for (Index i = 0; i < space.size(); ++i) {
        nlohmann::ordered_json p;
        p["id"] = space.id(i);
        if (space.has_coords()) {
            std::vector<double> c(space.dim());
            for (std::size_t k = 0; k < space.dim(); ++k) c[k] = space.coord(i, k);
            p["coords"] = c;
        }
        p["weight"] = space.weight(i);
        j["points"].push_back(std::move(p));
    }
    if (space.metric_kind() == MetricKind::Matrix) {
        auto& m = j["matrix"];
        m = nlohmann::ordered_json::array();
        std::vector<double> row(space.size());
        for (Index i = 0; i < space.size(); ++i) {
            space.dist_row(i, row.data());
            m.push_back(row);
        }
    }
    write_text(path, j.dump(2) + "\n");
}

FiniteMetricSpace read_space_csv(const std::string& path, bool matrix) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw InputError(path + ": empty file");

    if (matrix) {
        const std::size_t n = rows.size();
        std::vector<double> m;
        m.reserve(n * n);
        for (const auto& r : rows) {
            if (r.size() != n) throw InputError(path + ": matrix not square");
            for (const auto& f : r) m.push_back(to_double(f, path));
        }
        std::vector<std::string> ids(n);
        for (std::size_t i = 0; i < n; ++i) ids[i] = "p" + std::to_string(i);
        return FiniteMetricSpace::from_matrix(std::move(ids), std::move(m),
                                              std::vector<double>(n, 1.0));
    }

    // Header: id,x1..xd,weight
    const auto& header = rows.front();
    if (header.size() < 3 || header.front() != "id" || header.back() != "weight")
        throw InputError(path + ": expected header id,x1..xd,weight");
    const std::size_t dim = header.size() - 2;
    std::vector<std::string> ids;
    std::vector<double> coords, weights;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != header.size())
            throw InputError(path + ": ragged row " + std::to_string(r));
        ids.push_back(rows[r][0]);
        for (std::size_t k = 0; k < dim; ++k)
            coords.push_back(to_double(rows[r][1 + k], path));
        weights.push_back(to_double(rows[r].back(), path));
    }
    return FiniteMetricSpace::from_coords(std::move(ids), std::move(coords), dim,
                                          MetricKind::Euclidean, std::move(weights));
}

std::vector<double> read_values_csv(const std::string& path,
                                    const FiniteMetricSpace& space,
                                    std::size_t* q_out) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty file");
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header.front() != "id")
        throw InputError(path + ": expected header id,f1..fq");
    const std::size_t q = header.size() - 1;
    std::vector<double> values(space.size() * q, 0.0);
    std::vector<bool> seen(space.size(), false);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto row = split_csv_line(line);
        if (row.size() != header.size())
            throw InputError(path + ": ragged row");
        const Index i = space.index_of(row[0]);
        for (std::size_t k = 0; k < q; ++k)
            values[i * q + k] = to_double(row[1 + k], path);
        seen[i] = true;
    }
    for (Index i = 0; i < space.size(); ++i)
        if (!seen[i])
            throw InputError(path + ": missing value for point " + space.id(i));
    if (q_out) *q_out = q;
    return values;
}

namespace {

Fragment fragment_from_json(const json& j, const FiniteMetricSpace& space,
                            const std::string& path) {
    Fragment frag;
    if (!j.contains("domain") || !j.contains("trace"))
        throw InputError(path + ": fragment needs domain and trace");
    for (const auto& t : j["domain"]) frag.domain.push_back(t.get<double>());
    for (const auto& p : j["trace"]) {
        if (p.is_string())
            frag.trace.push_back(space.index_of(p.get<std::string>()));
        else
            frag.trace.push_back(p.get<Index>());
    }
    frag.validate(space);
    return frag;
}

}  // namespace

Fragment read_fragment_json(const std::string& path, const FiniteMetricSpace& space) {
    return fragment_from_json(load_json(path), space, path);
}

std::vector<Fragment> read_fragment_pool_json(const std::string& path,
                                              const FiniteMetricSpace& space) {
    const json j = load_json(path);
    std::vector<Fragment> pool;
    if (j.is_array()) {
        for (const auto& f : j) pool.push_back(fragment_from_json(f, space, path));
    } else if (j.contains("fragments")) {
        for (const auto& f : j["fragments"])
            pool.push_back(fragment_from_json(f, space, path));
    } else {
        pool.push_back(fragment_from_json(j, space, path));
    }
    return pool;
}

AlbertiRep read_rep_json(const std::string& path, const FiniteMetricSpace& space) {
    const json j = load_json(path);
    AlbertiRep rep;
    if (!j.contains("fragments") || !j.contains("probs") || !j.contains("densities"))
        throw InputError(path + ": rep needs fragments, probs, densities");
    for (const auto& f : j["fragments"])
        rep.fragments.push_back(fragment_from_json(f, space, path));
    for (const auto& p : j["probs"]) rep.probs.push_back(p.get<double>());
    for (const auto& d : j["densities"])
        rep.densities.push_back(d.get<std::vector<double>>());
    rep.validate_shape(space);
    return rep;
}

void write_rep_json(const std::string& path, const FiniteMetricSpace& space,
                    const AlbertiRep& rep) {
    nlohmann::ordered_json j;
    j["fragments"] = nlohmann::ordered_json::array();
    for (const auto& frag : rep.fragments) {
        nlohmann::ordered_json f;
        f["domain"] = frag.domain;
        auto ids = nlohmann::ordered_json::array();
        for (Index t : frag.trace) ids.push_back(space.id(t));
        f["trace"] = std::move(ids);
        j["fragments"].push_back(std::move(f));
    }
    j["probs"] = rep.probs;
    j["densities"] = rep.densities;
    write_text(path, j.dump(2) + "\n");
}

void write_text(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << content;
}

}  // namespace lipgeo::io
