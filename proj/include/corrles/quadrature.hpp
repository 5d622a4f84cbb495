#pragma once

#include <utility>
#include <vector>

namespace corrles {

// Gauss-Legendre nodes and weights on [a, b]
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b);

} // namespace corrles
