#include "mcfobs/io.hpp"

#include <bit>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace mcfobs {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    return out;
}

void skip_pgm_space(std::istream& in) {
    while (true) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

}  // namespace

void write_contour_csv(const std::filesystem::path& path, const Contour& c) {
    auto out = open_out(path, false);
    out << "polyline_id,vertex_index,x,y\n";
    out << std::setprecision(17);
    for (std::size_t p = 0; p < c.polylines.size(); ++p) {
        const auto& pts = c.polylines[p].points;
        for (std::size_t k = 0; k < pts.size(); ++k) out << p << ',' << k << ',' << pts[k].x << ',' << pts[k].y << '\n';
    }
}

Contour read_contour_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("polyline_id", 0) != 0) throw Error(path.string() + ": not a contour CSV");
    Contour c;
    long current = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        long id = 0;
        long idx = 0;
        Point p;
        if (std::sscanf(line.c_str(), "%ld,%ld,%lf,%lf", &id, &idx, &p.x, &p.y) != 4) {
            throw Error(path.string() + ": malformed row '" + line + "'");
        }
        if (id != current) {
            c.polylines.emplace_back();
            current = id;
        }
        c.polylines.back().points.push_back(p);
    }
    for (auto& pl : c.polylines) {
        const auto& pts = pl.points;
        pl.closed = pts.size() > 2 && pts.front().x == pts.back().x && pts.front().y == pts.back().y;
    }
    return c;
}

void write_mask_pgm(const std::filesystem::path& path, const RegionMask& m) {
    auto out = open_out(path, true);
    const Grid2& g = m.grid();
    out << "P5\n" << g.nx() << ' ' << g.ny() << "\n255\n";
    std::vector<char> row(static_cast<std::size_t>(g.nx()));
    for (int j = g.ny() - 1; j >= 0; --j) {
        for (int i = 0; i < g.nx(); ++i) row[static_cast<std::size_t>(i)] = m(i, j) ? static_cast<char>(255) : 0;
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

RegionMask read_mask_pgm(const std::filesystem::path& path, const Grid2& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P2") throw InvalidArgument(path.string() + ": not a PGM image");
    int w = 0;
    int h = 0;
    int maxval = 0;
    skip_pgm_space(in);
    in >> w;
    skip_pgm_space(in);
    in >> h;
    skip_pgm_space(in);
    in >> maxval;
    if (!in || maxval <= 0 || maxval > 255) throw InvalidArgument(path.string() + ": unsupported PGM header");
    if (w != grid.nx() || h != grid.ny()) {
        throw GridMismatch(path.string() + " is " + std::to_string(w) + "x" + std::to_string(h));
    }
    RegionMask m(grid);
    if (magic == "P5") {
        in.get();
        std::vector<unsigned char> row(static_cast<std::size_t>(w));
        for (int j = h - 1; j >= 0; --j) {
            in.read(reinterpret_cast<char*>(row.data()), w);
            if (!in) throw InvalidArgument(path.string() + ": truncated PGM data");
            for (int i = 0; i < w; ++i) m.set(i, j, row[static_cast<std::size_t>(i)] >= 128);
        }
    } else {
        for (int j = h - 1; j >= 0; --j) {
            for (int i = 0; i < w; ++i) {
                int v = 0;
                if (!(in >> v)) throw InvalidArgument(path.string() + ": truncated PGM data");
                m.set(i, j, v >= 128);
            }
        }
    }
    return m;
}

void write_field_raw(const std::filesystem::path& path, const ScalarField& f) {
    auto out = open_out(path, true);
    const Grid2& g = f.grid();
    out << std::setprecision(17) << g.nx() << ' ' << g.ny() << ' ' << g.spacing() << ' ' << g.origin().x << ' '
        << g.origin().y << '\n';
    std::vector<float> buf(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) buf[k] = static_cast<float>(f[k]);
    static_assert(std::endian::native == std::endian::little, "raw field export assumes little endian");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

ScalarField read_field_raw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    int nx = 0;
    int ny = 0;
    double s = 0;
    Point o;
    if (!(hs >> nx >> ny >> s >> o.x >> o.y)) throw InvalidArgument(path.string() + ": bad field header");
    Grid2 g(nx, ny, s, o);
    std::vector<float> buf(g.size());
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw InvalidArgument(path.string() + ": truncated field data");
    ScalarField f(g);
    for (std::size_t k = 0; k < buf.size(); ++k) f[k] = buf[k];
    return f;
}

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t k = 0; k < n; ++k) {
        h ^= p[k];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string file_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::uint64_t h = 14695981039346656037ULL;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        h = fnv1a64(buf.data(), static_cast<std::size_t>(in.gcount()), h);
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace mcfobs
