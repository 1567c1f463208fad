#include "vsr/field.hpp"
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vsr {

TensorField::TensorField(int N_, int rank_, Rep rep_) : N(N_), rank(rank_), rep(rep_) {
    data.assign(std::size_t(comps()) * n3(), 0.0);
}

Mat3 TensorField::mat_at(std::size_t node) const {
    Mat3 A;
    const std::size_t n = n3();
    for (int c = 0; c < 9; ++c) A.m[c] = data[std::size_t(c) * n + node];
    return A;
}

void TensorField::set_mat(std::size_t node, const Mat3& A) {
    const std::size_t n = n3();
    for (int c = 0; c < 9; ++c) data[std::size_t(c) * n + node] = A.m[c];
}

TensorField TensorField::to_modal() const {
    if (rep == Rep::modal) return *this;
    auto plan = Plan::get(N);
    TensorField out(N, rank, Rep::modal);
    for (int c = 0; c < comps(); ++c) plan->forward(out.comp(c), comp(c));
    return out;
}

TensorField TensorField::to_nodal() const {
    if (rep == Rep::nodal) return *this;
    auto plan = Plan::get(N);
    TensorField out(N, rank, Rep::nodal);
    for (int c = 0; c < comps(); ++c) plan->inverse(out.comp(c), comp(c));
    return out;
}

void write_snapshot(const std::string& path, const TensorField& F) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f.write("VSRF", 4);
    std::uint32_t version = 1, N = std::uint32_t(F.N);
    std::uint8_t rank = std::uint8_t(F.rank), rep = std::uint8_t(F.rep);
    f.write(reinterpret_cast<const char*>(&version), 4);
    f.write(reinterpret_cast<const char*>(&N), 4);
    f.write(reinterpret_cast<const char*>(&rank), 1);
    f.write(reinterpret_cast<const char*>(&rep), 1);
    f.write(reinterpret_cast<const char*>(F.data.data()),
            std::streamsize(F.data.size() * sizeof(double)));
    if (!f) throw std::runtime_error("short write: " + path);
}

TensorField read_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "VSRF", 4) != 0)
        throw std::runtime_error("bad snapshot magic: " + path);
    std::uint32_t version = 0, N = 0;
    std::uint8_t rank = 0, rep = 0;
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&N), 4);
    f.read(reinterpret_cast<char*>(&rank), 1);
    f.read(reinterpret_cast<char*>(&rep), 1);
    if (!f || version != 1 || rank > 3 || rep > 1 || N < 4 || N > 4096)
        throw std::runtime_error("bad snapshot header: " + path);
    TensorField F{int(N), int(rank), Rep(rep)};
    f.read(reinterpret_cast<char*>(F.data.data()),
           std::streamsize(F.data.size() * sizeof(double)));
    if (!f) throw std::runtime_error("truncated snapshot: " + path);
    return F;
}

} // namespace vsr
