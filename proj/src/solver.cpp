#include "ellipcenter/solver.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace ellipcenter {

std::string to_string(Termination t) {
    switch (t) {
        case Termination::GradientTolerance: return "GradientTolerance";
        case Termination::MaxIterations: return "MaxIterations";
    }
    return "unknown";
}

std::string to_string(Branch b) {
    switch (b) {
        case Branch::EllipseCenter: return "ellipse_center";
        case Branch::Midpoint: return "midpoint";
        case Branch::Converged: return "converged";
    }
    return "unknown";
}

void SolveOptions::validate() const {
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
    if (max_iterations < 1) throw Error("max_iterations must be >= 1");
    if (!(dependence_tolerance >= 0.0)) throw Error("dependence_tolerance must be nonnegative");
}

double SolveOptions::threshold(double initial_grad_norm) const {
    return epsilon_mode == EpsilonMode::Absolute ? epsilon : epsilon * initial_grad_norm;
}

namespace {

void put_optional(std::ostream& os, const std::optional<double>& v) {
    if (v) os << *v;
}

}  // namespace

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
    const auto old_precision = os.precision(17);
    os << "iter,branch,f,grad_norm,t,delta,alpha,beta\n";
    for (const auto& r : trace) {
        os << r.iter << ',' << r.branch << ',' << r.f << ',' << r.grad_norm << ',';
        put_optional(os, r.t);
        os << ',';
        put_optional(os, r.delta);
        os << ',';
        put_optional(os, r.alpha);
        os << ',';
        put_optional(os, r.beta);
        os << '\n';
    }
    os.precision(old_precision);
}

}  // namespace ellipcenter
