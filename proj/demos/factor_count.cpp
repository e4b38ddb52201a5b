// How many factors does the 1 - max(x, y) covariance need?
// Prints the captured variance fraction and the tail trace per factor count.

#include <iomanip>
#include <iostream>
#include <numbers>

#include "sarcv/sarcv.hpp"

int main()
{
    const int n = 200;
    const sarcv::CovMatrix op = sarcv::cell_centred_operator(sarcv::Kernel::one_minus_max(), n);

    std::cout << "d  captured  tail_trace  analytic_lambda_d\n" << std::fixed << std::setprecision(5);
    for (int d = 1; d <= 8; ++d) {
        const auto basis = sarcv::fpca_basis(op, d);
        std::cout << d << "  " << basis.captured_fraction << "   " << basis.tail_trace << "     "
                  << sarcv::mercer_eigenvalue(sarcv::MercerKind::OneMinusMax, d) << '\n';
    }
    std::cout << "d95 = " << sarcv::d_explained(op, 0.95) << '\n';
}
