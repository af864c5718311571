#include "nsvac/serialize.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nsvac {

namespace {
// The format is pinned little-endian; byte-swap on the (rare) big-endian host.
bool host_little_endian() {
    const unsigned one = 1;
    return *reinterpret_cast<const unsigned char*>(&one) == 1;
}

void swap_doubles(std::vector<double>& v) {
    for (double& x : v) {
        unsigned char* b = reinterpret_cast<unsigned char*>(&x);
        for (int i = 0; i < 4; ++i) std::swap(b[i], b[7 - i]);
    }
}
} // namespace

void write_field(const std::string& path, const Field& f, double time) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write field file: " + path);
    char header[160];
    std::snprintf(header, sizeof header, "nsvac-field dim=%d n=%d extent=%.17g order=%d time=%.17g\n",
                  f.grid().dim, f.grid().n, f.grid().extent, f.order(), time);
    out << header;
    if (host_little_endian()) {
        out.write(reinterpret_cast<const char*>(f.raw().data()),
                  static_cast<std::streamsize>(f.raw().size() * sizeof(double)));
    } else {
        std::vector<double> tmp = f.raw();
        swap_doubles(tmp);
        out.write(reinterpret_cast<const char*>(tmp.data()),
                  static_cast<std::streamsize>(tmp.size() * sizeof(double)));
    }
    if (!out) throw Error("short write on field file: " + path);
}

FieldSnapshot read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read field file: " + path);
    std::string header;
    std::getline(in, header);
    int dim = 0, n = 0, order = 0;
    double extent = 0, time = 0;
    if (std::sscanf(header.c_str(), "nsvac-field dim=%d n=%d extent=%lg order=%d time=%lg", &dim,
                    &n, &extent, &order, &time) != 5)
        throw Error("bad field header in " + path);
    FieldSnapshot snap{Field(Grid(dim, n, extent), order), time};
    auto& raw = snap.field.raw();
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(raw.size() * sizeof(double)))
        throw Error("short read on field file: " + path);
    if (!host_little_endian()) swap_doubles(raw);
    return snap;
}

} // namespace nsvac
