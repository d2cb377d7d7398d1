#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fkise/excursion.hpp"
#include "fkise/explore.hpp"
#include "fkise/fk.hpp"
#include "fkise/lattice.hpp"
#include "fkise/loewner.hpp"

namespace fkise::io {

using nlohmann::json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

inline std::uint64_t hash_bytes(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t hash_file(const std::filesystem::path& path) {
    return hash_bytes(read_text(path));
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// ---- configurations: bit-packed bits plus a JSON sidecar ----

inline void write_config(const std::filesystem::path& base, const LatticeDomain& d,
                         const EdgeConfig& config, const std::string& bc_name) {
    std::string bytes;
    bytes.reserve(config.open.size() / 8 + 1);
    for (std::size_t i = 0; i < config.open.size(); i += 8) {
        unsigned char b = 0;
        for (std::size_t j = 0; j < 8 && i + j < config.open.size(); ++j)
            if (config.open[i + j]) b |= static_cast<unsigned char>(1U << j);
        bytes.push_back(static_cast<char>(b));
    }
    write_text(base.string() + ".bits", bytes);
    json side;
    side["schema_version"] = 1;
    side["edges"] = config.open.size();
    side["domain_hash"] = domain_hash(d);
    side["bc"] = bc_name;
    side["seed"] = config.seed;
    side["sweeps_done"] = config.sweeps_done;
    write_text(base.string() + ".json", side.dump(2) + "\n");
}

inline EdgeConfig read_config(const std::filesystem::path& base) {
    const json side = json::parse(read_text(base.string() + ".json"));
    const std::string bytes = read_text(base.string() + ".bits");
    EdgeConfig c;
    const std::size_t n = side.at("edges").get<std::size_t>();
    c.open.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        c.open[i] = (static_cast<unsigned char>(bytes[i / 8]) >> (i % 8)) & 1U;
    c.seed = side.value("seed", 0ULL);
    c.sweeps_done = side.value("sweeps_done", 0ULL);
    return c;
}

// ---- exploration paths: CSV with a JSON comment header ----

inline void write_path_csv(const std::filesystem::path& path, const ExplorationPath& p,
                           const LatticeDomain& d, const std::string& bc_name, std::uint64_t seed) {
    json head;
    head["schema_version"] = 1;
    head["domain_hash"] = domain_hash(d);
    head["bc"] = bc_name;
    head["seed"] = seed;
    head["mesh"] = d.mesh;
    head["units"] = "mesh/2";
    std::ostringstream os;
    os << "# " << head.dump() << "\n";
    os << "step,x,y\n";
    for (std::size_t i = 0; i < p.points.size(); ++i)
        os << i << "," << p.points[i].x << "," << p.points[i].y << "\n";
    write_text(path, os.str());
}

inline std::vector<Pt> read_path_csv(const std::filesystem::path& path, double* mesh_out = nullptr) {
    std::istringstream is(read_text(path));
    std::string line;
    std::vector<Pt> pts;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (mesh_out) {
                const auto j = json::parse(line.substr(1));
                *mesh_out = j.value("mesh", 1.0);
            }
            continue;
        }
        if (line.rfind("step", 0) == 0) continue;
        std::istringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ',');
        Pt p;
        std::getline(ls, tok, ',');
        p.x = std::stoi(tok);
        std::getline(ls, tok, ',');
        p.y = std::stoi(tok);
        pts.push_back(p);
    }
    return pts;
}

// ---- driver records ----

inline void write_driver_csv(const std::filesystem::path& path, const DriverRecord& r) {
    std::ostringstream os;
    os << "t,W,V,theta\n";
    for (std::size_t i = 0; i < r.size(); ++i)
        os << fmt(r.t[i]) << "," << fmt(r.W[i]) << "," << fmt(r.V[i]) << "," << fmt(r.theta[i])
           << "\n";
    write_text(path, os.str());
}

inline DriverRecord read_driver_csv(const std::filesystem::path& path) {
    std::istringstream is(read_text(path));
    std::string line;
    DriverRecord r;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        std::istringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ',');
        r.t.push_back(std::stod(tok));
        std::getline(ls, tok, ',');
        r.W.push_back(std::stod(tok));
        std::getline(ls, tok, ',');
        r.V.push_back(std::stod(tok));
        std::getline(ls, tok, ',');
        r.theta.push_back(std::stod(tok));
    }
    return r;
}

inline void write_curve_csv(const std::filesystem::path& path, const PlanarCurve& c) {
    std::ostringstream os;
    os << "x,y\n";
    for (const cplx& z : c) os << fmt(z.real()) << "," << fmt(z.imag()) << "\n";
    write_text(path, os.str());
}

inline PlanarCurve read_curve_csv(const std::filesystem::path& path) {
    std::istringstream is(read_text(path));
    std::string line;
    PlanarCurve c;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
        std::istringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ',');
        const double x = std::stod(tok);
        std::getline(ls, tok, ',');
        c.push_back(cplx(x, std::stod(tok)));
    }
    return c;
}

inline void write_excursions_csv(const std::filesystem::path& path,
                                 const std::vector<DiscreteExcursionRecord>& recs) {
    std::ostringstream os;
    os << "run_id,k,T_k,S_k,max,duration\n";
    for (std::size_t run = 0; run < recs.size(); ++run)
        for (std::size_t k = 0; k < recs[run].excursions.size(); ++k) {
            const auto& e = recs[run].excursions[k];
            os << run << "," << (k + 1) << "," << fmt(e.t_start) << "," << fmt(e.t_end) << ","
               << fmt(e.max_theta) << "," << fmt(e.duration) << "\n";
        }
    write_text(path, os.str());
}

// ---- minimal SVG scatter/line plots ----

struct SvgSeries {
    std::vector<double> x, y;
    std::string color = "#1f77b4";
    bool line = true;
    bool marks = false;
};

inline std::string svg_plot(const std::vector<SvgSeries>& series, const std::string& title,
                            const std::string& xlabel, const std::string& ylabel) {
    const int W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    if (!(xhi > xlo)) xhi = xlo + 1.0;
    if (!(yhi > ylo)) yhi = ylo + 1.0;
    const double padx = 0.05 * (xhi - xlo), pady = 0.05 * (yhi - ylo);
    xlo -= padx; xhi += padx; ylo -= pady; yhi += pady;
    auto sx = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr); };
    auto sy = [&](double y) { return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb); };
    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
       << "</text>\n";
    os << "<line x1='" << ml << "' y1='" << (H - mb) << "' x2='" << (W - mr) << "' y2='" << (H - mb)
       << "' stroke='black'/>\n";
    os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << (H - mb)
       << "' stroke='black'/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = xlo + k * (xhi - xlo) / 4.0;
        const double yv = ylo + k * (yhi - ylo) / 4.0;
        os << "<text x='" << sx(xv) << "' y='" << (H - mb + 18)
           << "' text-anchor='middle' font-size='11'>" << std::setprecision(3) << xv << "</text>\n";
        os << "<text x='" << (ml - 8) << "' y='" << sy(yv) + 4
           << "' text-anchor='end' font-size='11'>" << std::setprecision(3) << yv << "</text>\n";
    }
    os << "<text x='" << (ml + (W - ml - mr) / 2) << "' y='" << (H - 12)
       << "' text-anchor='middle' font-size='13'>" << xlabel << "</text>\n";
    os << "<text x='16' y='" << (mt + (H - mt - mb) / 2)
       << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
       << (mt + (H - mt - mb) / 2) << ")'>" << ylabel << "</text>\n";
    for (const auto& s : series) {
        if (s.line && s.x.size() > 1) {
            os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                os << sx(s.x[i]) << "," << sy(s.y[i]) << " ";
            os << "'/>\n";
        }
        if (s.marks)
            for (std::size_t i = 0; i < s.x.size(); ++i)
                os << "<circle cx='" << sx(s.x[i]) << "' cy='" << sy(s.y[i]) << "' r='3' fill='"
                   << s.color << "'/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace fkise::io
