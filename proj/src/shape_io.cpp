#include "mhfrac/shape_io.hpp"

#include "mhfrac/error.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mhfrac {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (trim(value.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw ParseError("value of '" + key + "' is not a number: '" + value + "'");
}

std::vector<Point> parse_vertices(const std::string& text) {
    std::vector<Point> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        std::istringstream is(item);
        Point p;
        if (!(is >> p.x >> p.y)) throw ParseError("bad polygon vertex '" + item + "'");
        out.push_back(p);
    }
    return out;
}

}  // namespace

std::map<std::string, std::string> read_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
        kv[lower(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::map<std::string, std::string> read_key_values_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    return read_key_values(in);
}

ShapeSpec shape_from_key_values(const std::map<std::string, std::string>& kv) {
    auto it = kv.find("shape");
    if (it == kv.end()) throw ParseError("shape config lacks a 'shape' key");
    ShapeSpec spec;
    spec.kind = shape_kind_from_string(it->second);
    for (const auto& [key, value] : kv) {
        if (key == "shape" || key == "h") continue;
        if (key == "radius" || key == "r") {
            spec.radius = to_double(key, value);
        } else if (key == "inner_radius" || key == "inner") {
            spec.inner_radius = to_double(key, value);
        } else if (key == "side") {
            spec.side = to_double(key, value);
        } else if (key == "width") {
            spec.width = to_double(key, value);
        } else if (key == "height") {
            spec.height = to_double(key, value);
        } else if (key == "k") {
            const double k = to_double(key, value);
            if (k != static_cast<int>(k)) throw ParseError("k must be an integer");
            spec.k = static_cast<int>(k);
        } else if (key == "pitch") {
            spec.pitch = to_double(key, value);
        } else if (key == "wall") {
            spec.wall = to_double(key, value);
        } else if (key == "turns") {
            spec.turns = to_double(key, value);
        } else if (key == "vertices") {
            spec.vertices = parse_vertices(value);
        } else {
            throw ParseError("unknown shape key '" + key + "'");
        }
    }
    spec.validate();
    return spec;
}

ShapeSpec parse_shape(const std::string& text) {
    const std::string t = trim(text);
    if (!t.empty() && t.front() == '@') return shape_from_key_values(read_key_values_file(t.substr(1)));
    std::map<std::string, std::string> kv;
    const auto colon = t.find(':');
    kv["shape"] = trim(t.substr(0, colon));
    if (colon != std::string::npos) {
        std::stringstream ss(t.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ParseError("shape parameter '" + item + "' lacks '='");
            kv[lower(trim(item.substr(0, eq)))] = trim(item.substr(eq + 1));
        }
    }
    return shape_from_key_values(kv);
}

void write_mask(std::ostream& out, const DomainMask& mask) {
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "mhfrac-mask 1\n";
    out << "h " << mask.h() << "\n";
    out << "origin " << mask.origin().x << " " << mask.origin().y << "\n";
    out << "size " << mask.nx() << " " << mask.ny() << "\n";
    out << "segments " << mask.segments().size() << "\n";
    for (const Segment& s : mask.segments()) out << s.a.x << " " << s.a.y << " " << s.b.x << " " << s.b.y << "\n";
    out << "cells\n";
    std::string row(static_cast<std::size_t>(mask.nx()), '0');
    for (int j = mask.ny() - 1; j >= 0; --j) {
        for (int i = 0; i < mask.nx(); ++i) row[i] = mask.occupied(i, j) ? '1' : '0';
        out << row << "\n";
    }
}

DomainMask read_mask(std::istream& in) {
    auto expect = [&](const std::string& word) {
        std::string got;
        if (!(in >> got) || got != word) throw ParseError("mask file: expected '" + word + "', found '" + got + "'");
    };
    expect("mhfrac-mask");
    int version = 0;
    if (!(in >> version) || version != 1) throw ParseError("mask file: unsupported version");
    double h = 0.0;
    Point origin;
    int nx = 0;
    int ny = 0;
    std::size_t nseg = 0;
    expect("h");
    if (!(in >> h)) throw ParseError("mask file: bad h");
    expect("origin");
    if (!(in >> origin.x >> origin.y)) throw ParseError("mask file: bad origin");
    expect("size");
    if (!(in >> nx >> ny) || nx <= 0 || ny <= 0) throw ParseError("mask file: bad size");
    expect("segments");
    if (!(in >> nseg)) throw ParseError("mask file: bad segment count");
    std::vector<Segment> segs(nseg);
    for (auto& s : segs)
        if (!(in >> s.a.x >> s.a.y >> s.b.x >> s.b.y)) throw ParseError("mask file: bad segment");
    expect("cells");
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(nx) * ny, 0);
    for (int j = ny - 1; j >= 0; --j) {
        std::string row;
        if (!(in >> row) || static_cast<int>(row.size()) != nx) throw ParseError("mask file: bad cell row");
        for (int i = 0; i < nx; ++i) {
            if (row[i] != '0' && row[i] != '1') throw ParseError("mask file: cells must be 0 or 1");
            cells[static_cast<std::size_t>(j) * nx + i] = row[i] == '1';
        }
    }
    return DomainMask(h, origin, nx, ny, std::move(cells), std::move(segs));
}

void save_mask(const std::string& path, const DomainMask& mask) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write mask file '" + path + "'");
    write_mask(out, mask);
}

DomainMask load_mask(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open mask file '" + path + "'");
    return read_mask(in);
}

}  // namespace mhfrac
