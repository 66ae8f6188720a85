#include "fikit/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fikit {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write to " + tmp + " failed");
    }
    std::filesystem::rename(tmp, path);
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::ordered_json num(double v) { return nlohmann::ordered_json::parse(format_double(v)); }

std::vector<std::pair<int, double>> load_id_value_csv(const std::string& path,
                                                      const std::string& expect_header) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expect_header)
        throw std::runtime_error(path + ": expected header '" + expect_header + "', got '" + line +
                                 "'");
    std::vector<std::pair<int, double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error(path + ": malformed row " + line);
        rows.emplace_back(std::stoi(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    return rows;
}

std::vector<double> dense_from_rows(const std::string& path,
                                    std::vector<std::pair<int, double>> rows) {
    std::vector<double> out(rows.size(), 0.0);
    std::vector<char> seen(rows.size(), 0);
    for (auto [id, v] : rows) {
        if (id < 0 || static_cast<std::size_t>(id) >= out.size() || seen[id])
            throw std::runtime_error(path + ": ids must cover 0..n-1 exactly once");
        out[id] = v;
        seen[id] = 1;
    }
    return out;
}

}  // namespace

void save_space(const MetricSpace& space, const std::string& path) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(space.kind);
    j["geo_tol"] = num(space.geo_tol);
    if (space.approximate) j["approximate"] = true;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (int i = 0; i < space.size(); ++i) {
        nlohmann::ordered_json pt;
        pt["id"] = i;
        if (space.has_coords()) {
            nlohmann::ordered_json c = nlohmann::ordered_json::array();
            for (int d = 0; d < space.coord_dim(); ++d) c.push_back(num(space.coord(i, d)));
            pt["coords"] = c;
        }
        pts.push_back(pt);
    }
    j["points"] = pts;
    nlohmann::ordered_json metric;
    if (space.has_edges() &&
        (space.kind == SpaceKind::Graph || space.kind == SpaceKind::HeisenbergGrid)) {
        // adjacency regenerates the metric (and its shortest-path witnesses)
        metric["type"] = "graph";
        nlohmann::ordered_json edges = nlohmann::ordered_json::array();
        for (int u = 0; u < space.size(); ++u)
            for (int v : space.neighbors(u))
                if (u < v)
                    edges.push_back(
                        nlohmann::ordered_json::array({u, v, num(space.dist(u, v))}));
        metric["edges"] = edges;
    } else {
        metric["type"] = "matrix";
        nlohmann::ordered_json data = nlohmann::ordered_json::array();
        for (int i = 0; i < space.size(); ++i) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (int k = 0; k < space.size(); ++k) row.push_back(num(space.dist(i, k)));
            data.push_back(row);
        }
        metric["data"] = data;
    }
    j["metric"] = metric;
    atomic_write(path, j.dump(2) + "\n");
}

MetricSpace load_space(const std::string& path) {
    auto j = nlohmann::json::parse(read_file(path));
    auto kind = space_kind_from_string(j.at("kind").get<std::string>());
    double geo_tol = j.value("geo_tol", 0.0);
    const auto& pts = j.at("points");
    int n = static_cast<int>(pts.size());
    std::vector<double> coords;
    int coord_dim = 0;
    for (int i = 0; i < n; ++i) {
        const auto& pt = pts[i];
        if (pt.at("id").get<int>() != i)
            throw std::runtime_error(path + ": point ids must be 0..n-1 in order");
        if (pt.contains("coords")) {
            auto c = pt["coords"].get<std::vector<double>>();
            if (coord_dim == 0) coord_dim = static_cast<int>(c.size());
            if (static_cast<int>(c.size()) != coord_dim)
                throw std::runtime_error(path + ": inconsistent coordinate dimensions");
            coords.insert(coords.end(), c.begin(), c.end());
        }
    }
    const auto& metric = j.at("metric");
    auto type = metric.at("type").get<std::string>();
    MetricSpace space;
    if (type == "graph") {
        std::vector<GraphEdge> edges;
        for (const auto& e : metric.at("edges"))
            edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
        space = build_graph(n, edges);  // recomputes shortest-path witnesses
        space.kind = kind;
    } else if (type == "matrix") {
        std::vector<double> dist;
        dist.reserve(static_cast<std::size_t>(n) * n);
        for (const auto& row : metric.at("data")) {
            if (static_cast<int>(row.size()) != n)
                throw std::runtime_error(path + ": metric matrix is not square");
            for (const auto& v : row) dist.push_back(v.get<double>());
        }
        if (dist.size() != static_cast<std::size_t>(n) * n)
            throw std::runtime_error(path + ": metric matrix is not n by n");
        // only 1D grids recover their edge structure from the matrix form
        std::vector<std::vector<int>> adjacency;
        if (kind == SpaceKind::Grid1d) {
            adjacency.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                if (i > 0) adjacency[i].push_back(i - 1);
                if (i + 1 < n) adjacency[i].push_back(i + 1);
            }
        }
        space = MetricSpace::from_matrix(kind, n, std::move(dist), {}, 0, std::move(adjacency),
                                         geo_tol);
    } else {
        throw std::runtime_error(path + ": unknown metric type " + type);
    }
    space.geo_tol = geo_tol;
    space.approximate = j.value("approximate", false);
    if (coord_dim > 0) space.attach_coords(std::move(coords), coord_dim);
    return space;
}

void save_field(const ScalarField& f, const std::string& path) {
    std::ostringstream out;
    out << "point_id,value\n";
    for (int i = 0; i < f.size(); ++i) out << i << ',' << format_double(f[i]) << '\n';
    atomic_write(path, out.str());
}

ScalarField load_field(const std::string& path) {
    auto rows = load_id_value_csv(path, "point_id,value");
    return ScalarField(dense_from_rows(path, std::move(rows)));
}

void save_measure(const ProbabilityMeasure& mu, const std::string& path) {
    std::ostringstream out;
    out << "point_id,value\n";
    for (int i = 0; i < mu.size(); ++i) out << i << ',' << format_double(mu[i]) << '\n';
    atomic_write(path, out.str());
}

ProbabilityMeasure load_measure(const std::string& path) {
    auto rows = load_id_value_csv(path, "point_id,value");
    ProbabilityMeasure mu{dense_from_rows(path, std::move(rows))};
    mu.validate();
    return mu;
}

void save_hopf_lax_csv(const ScalarField& u, const std::vector<int>& argmin,
                       const std::string& path) {
    std::ostringstream out;
    out << "point_id,u,argmin_id\n";
    for (int i = 0; i < u.size(); ++i)
        out << i << ',' << format_double(u[i]) << ',' << argmin[i] << '\n';
    atomic_write(path, out.str());
}

void save_plan_csv(const TransportPlan& plan, const std::string& path) {
    std::ostringstream out;
    out << "src_id,dst_id,mass\n";
    for (int i = 0; i < plan.n; ++i)
        for (int j = 0; j < plan.n; ++j) {
            double m = plan.flow(i, j);
            if (m > 0.0) out << i << ',' << j << ',' << format_double(m) << '\n';
        }
    atomic_write(path, out.str());
}

void save_potentials_csv(const TransportPlan& plan, const std::string& path) {
    std::ostringstream out;
    out << "point_id,f,g\n";
    for (int i = 0; i < plan.n; ++i)
        out << i << ',' << format_double(plan.pot_f[i]) << ',' << format_double(plan.pot_g[i])
            << '\n';
    atomic_write(path, out.str());
}

void save_report_json(const CheckReport& report, const std::string& path) {
    atomic_write(path, report.to_json() + "\n");
}

CheckReport load_report_json(const std::string& path) {
    return CheckReport::from_json(read_file(path));
}

}  // namespace fikit
