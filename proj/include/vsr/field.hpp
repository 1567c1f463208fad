#pragma once
#include "vsr/mat3.hpp"
#include "vsr/transform.hpp"
#include <string>
#include <vector>

namespace vsr {

enum class Rep : unsigned char { nodal = 0, modal = 1 };

// rank 0 = scalar, 1 = vector, 2 = matrix, 3 = third order; one scalar
// array of N^3 values per component, components outermost.
struct TensorField {
    int N = 0;
    int rank = 2;
    Rep rep = Rep::nodal;
    std::vector<double> data;

    TensorField() = default;
    TensorField(int N_, int rank_, Rep rep_);

    int comps() const {
        int c = 1;
        for (int r = 0; r < rank; ++r) c *= 3;
        return c;
    }
    std::size_t n3() const { return std::size_t(N) * N * N; }
    double* comp(int c) { return data.data() + std::size_t(c) * n3(); }
    const double* comp(int c) const { return data.data() + std::size_t(c) * n3(); }

    // rank-2 nodal access
    Mat3 mat_at(std::size_t node) const;
    void set_mat(std::size_t node, const Mat3& A);

    TensorField to_modal() const;
    TensorField to_nodal() const;
};

// binary snapshot: little-endian header {magic "VSRF", version u32, N u32,
// rank u8, rep u8} then comps*N^3 doubles, component outermost, then x,y,z
// (z fastest)
void write_snapshot(const std::string& path, const TensorField& F);
TensorField read_snapshot(const std::string& path);

} // namespace vsr
