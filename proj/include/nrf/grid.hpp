#pragma once
#include <stdexcept>
#include <vector>

namespace nrf {

// Uniform cell-centered radial grid: r_i = (i + 1/2) * dr, i = 0..node_count-1.
// The half-cell offset keeps 1/b away from the coordinate origin.
struct RadialGrid {
    int node_count = 0;
    double dr = 0.0;
    double r_max = 0.0;
    std::vector<double> nodes;

    static RadialGrid with_count(int node_count, double dr);
    static RadialGrid with_extent(double r_max, int node_count);

    double radius(int i) const { return nodes[size_t(i)]; }
    // First node index with r_i >= r (node_count if none).
    int index_at(double r) const;
};

enum class Parity { Even, Odd };

// Radial derivatives of a cell-centered field.
//
// Interior rows are 4th-order centered; rows with index < sixth_order_until
// use 6th-order centered stencils (the origin closure supplies up to three
// parity ghost cells, a even / b odd); the outermost two rows use one-sided
// 5-point stencils. The wide origin zone exists because k_sph divides the
// b_s truncation error by b^2 ~ r^2, which turns a uniformly 2nd-order
// scheme into an O(1) error at the first cells.
std::vector<double> d_dr(const std::vector<double>& f, Parity p, double dr,
                         int sixth_order_until);
std::vector<double> d2_dr2(const std::vector<double>& f, Parity p, double dr,
                           int sixth_order_until);

// Arclength s(r_i) = \int_0^{r_i} a dr by midpoint sums (2nd order).
std::vector<double> arclength(const std::vector<double>& a, double dr);

// Midpoint-rule integral of a node field over the whole grid.
double integrate(const std::vector<double>& f, double dr);

// Finite-difference weights for the m-th derivative at x0 from arbitrary
// nodes (Fornberg's recursion).
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int m);

} // namespace nrf
