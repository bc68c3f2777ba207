#include "gridflow/grid/ybus.hpp"

#include <algorithm>
#include <tuple>

#include "gridflow/common/error.hpp"

namespace gridflow::grid {

std::size_t AdmittanceMatrix::find(std::size_t i, std::size_t j) const {
    auto const first = col.begin() + static_cast<std::ptrdiff_t>(row_start[i]);
    auto const last = col.begin() + static_cast<std::ptrdiff_t>(row_start[i + 1]);
    auto const it = std::lower_bound(first, last, j);
    if (it == last || *it != j) {
        return nnz();
    }
    return static_cast<std::size_t>(it - col.begin());
}

std::complex<double> AdmittanceMatrix::at(std::size_t i, std::size_t j) const {
    auto const k = find(i, j);
    return k == nnz() ? std::complex<double>{} : std::complex<double>{g[k], b[k]};
}

namespace {

struct Contribution {
    std::size_t row;
    std::size_t col;
    double re;
    double im;

    auto key() const { return std::tie(row, col, re, im); }
};

}  // namespace

AdmittanceMatrix build_ybus(Network const& net) {
    std::size_t const n = net.size();
    std::vector<Contribution> parts;
    parts.reserve(n + 4 * net.branches.size());

    for (std::size_t i = 0; i < n; ++i) {
        parts.push_back({i, i, net.buses[i].shunt_g, net.buses[i].shunt_b});
    }
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        auto const& br = net.branches[k];
        if (!br.in_service) {
            continue;
        }
        if (br.r * br.r + br.x * br.x <= 0.0) {
            throw ValidationError("branch " + std::to_string(k) + " has zero series impedance");
        }
        std::complex<double> const y = 1.0 / std::complex<double>(br.r, br.x);
        std::complex<double> const charging(0.0, br.b_charging / 2.0);
        std::complex<double> const t = std::polar(br.tap, br.shift);
        std::complex<double> const yff = (y + charging) / (br.tap * br.tap);
        std::complex<double> const ytt = y + charging;
        std::complex<double> const yft = -y / std::conj(t);
        std::complex<double> const ytf = -y / t;
        parts.push_back({br.from_bus, br.from_bus, yff.real(), yff.imag()});
        parts.push_back({br.to_bus, br.to_bus, ytt.real(), ytt.imag()});
        parts.push_back({br.from_bus, br.to_bus, yft.real(), yft.imag()});
        parts.push_back({br.to_bus, br.from_bus, ytf.real(), ytf.imag()});
    }

    std::sort(parts.begin(), parts.end(), [](auto const& a, auto const& b) { return a.key() < b.key(); });

    AdmittanceMatrix y;
    y.n = n;
    y.row_start.assign(n + 1, 0);
    for (std::size_t p = 0; p < parts.size();) {
        std::size_t q = p;
        double re = 0.0;
        double im = 0.0;
        while (q < parts.size() && parts[q].row == parts[p].row && parts[q].col == parts[p].col) {
            re += parts[q].re;
            im += parts[q].im;
            ++q;
        }
        y.col.push_back(parts[p].col);
        y.g.push_back(re);
        y.b.push_back(im);
        ++y.row_start[parts[p].row + 1];
        p = q;
    }
    for (std::size_t i = 0; i < n; ++i) {
        y.row_start[i + 1] += y.row_start[i];
    }
    return y;
}

}  // namespace gridflow::grid
