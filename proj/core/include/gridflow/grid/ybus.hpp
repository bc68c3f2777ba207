#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "gridflow/grid/network.hpp"

namespace gridflow::grid {

// Bus admittance matrix Y = G + jB in compressed-row layout. Every diagonal
// entry is stored (possibly zero); the off-diagonal pattern is structurally
// symmetric and columns are sorted within each row.
struct AdmittanceMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_start;  // size n + 1
    std::vector<std::size_t> col;
    std::vector<double> g;
    std::vector<double> b;

    std::size_t nnz() const { return col.size(); }

    // Position of entry (i, j) in col/g/b, or nnz() if structurally zero.
    std::size_t find(std::size_t i, std::size_t j) const;
    std::complex<double> at(std::size_t i, std::size_t j) const;

    bool operator==(AdmittanceMatrix const&) const = default;
};

// Pi-model assembly over in-service branches plus bus shunts. For a branch
// with series admittance y, charging b and complex ratio t = tap * e^{j shift}:
//   Y_ff += (y + jb/2) / tap^2     Y_ft -= y / conj(t)
//   Y_tt += (y + jb/2)             Y_tf -= y / t
// Contributions to each entry are summed in a canonical (value-sorted) order,
// so the result is bit-identical under any permutation of the branch list.
// Throws ValidationError on a zero-impedance branch.
AdmittanceMatrix build_ybus(Network const& net);

}  // namespace gridflow::grid
