#include "homsim/biphoton.hpp"

#include <cmath>

namespace homsim {

namespace {

cplx phase(double theta) { return cplx(std::cos(theta), std::sin(theta)); }

void require_unit_vector(const Eigen::VectorXcd& v, const char* ctx) {
    if (v.size() == 0) throw ConfigError(std::string(ctx) + ": empty state vector");
    if (std::abs(v.squaredNorm() - 1.0) > 1e-12)
        throw ConfigError(std::string(ctx) + ": state vector must be unit norm");
}

Eigen::MatrixXcd balanced_splitter_layer(int dim, int a0, int a1, int b0, int b1) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    const double s = 1.0 / std::sqrt(2.0);
    m(a0, a0) = s;  m(a0, a1) = -s;
    m(a1, a0) = s;  m(a1, a1) = s;
    m(b0, b0) = s;  m(b0, b1) = -s;
    m(b1, b0) = s;  m(b1, b1) = s;
    return m;
}

}  // namespace

void require_unitary(const Eigen::MatrixXcd& U, const char* ctx, double tol) {
    if (U.rows() == 0 || U.rows() != U.cols())
        throw ConfigError(std::string(ctx) + ": matrix must be square and non-empty");
    const double dev =
        (U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff();
    if (dev > tol)
        throw ConfigError(std::string(ctx) + ": matrix is not unitary (deviation " +
                          std::to_string(dev) + ")");
}

Eigen::MatrixXcd u2() {
    Eigen::MatrixXcd m(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    m << s, -s,
         s,  s;
    return m;
}

Eigen::MatrixXcd u3() {
    const double s = 1.0 / std::sqrt(3.0);
    const cplx w1 = phase(2.0 * pi / 3.0);   // e^{i 2pi/3}
    const cplx w2 = phase(4.0 * pi / 3.0);   // e^{i 4pi/3}
    Eigen::MatrixXcd m(3, 3);
    m << s,      s * w2, s * w1,
         s,      s * w1, s * w2,
         s,      s,      s;
    return m;
}

Eigen::MatrixXcd rot3(bool ascending) {
    const double r2 = std::sqrt(2.0);
    const double n = 1.0 / (2.0 * std::sqrt(3.0));
    Eigen::MatrixXcd r(3, 3);
    r << n * (r2 + 1.0), n * (r2 - 1.0), -n * 2.0 * std::sqrt(1.5),
         n * (r2 - 2.0), n * (r2 + 2.0),  0.0,
         n * (r2 + 1.0), n * (r2 - 1.0),  n * 2.0 * std::sqrt(1.5);
    Eigen::MatrixXcd raw = u3() * r;
    if (!ascending) return raw;
    // The raw product is stated in basis order (-1, +1, 0); conjugate by the
    // (1 <-> 2) swap to express it in the ascending (-1, 0, +1) convention
    // used everywhere else.
    Eigen::PermutationMatrix<3> perm;
    perm.indices() << 0, 2, 1;
    return perm * raw * perm;
}

Eigen::MatrixXcd u4(double phi) {
    Eigen::MatrixXcd s1 = balanced_splitter_layer(4, 0, 1, 2, 3);
    Eigen::MatrixXcd s2 = balanced_splitter_layer(4, 0, 2, 1, 3);
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Identity(4, 4);
    d(1, 1) = phase(phi);  // single internal arm carries the tuning phase
    return s2 * d * s1;
}

Eigen::MatrixXcd named_unitary(const std::string& name, int* dim_out) {
    Eigen::MatrixXcd m;
    if (name == "u2") m = u2();
    else if (name == "u3") m = u3();
    else if (name == "rot3") m = rot3();
    else if (name.rfind("u4:", 0) == 0) {
        std::size_t used = 0;
        double phi = 0.0;
        try {
            phi = std::stod(name.substr(3), &used);
        } catch (const std::exception&) {
            throw ConfigError("named_unitary: bad u4 phase in '" + name + "'");
        }
        if (used != name.size() - 3)
            throw ConfigError("named_unitary: bad u4 phase in '" + name + "'");
        m = u4(phi);
    } else if (name == "u4") {
        throw ConfigError("named_unitary: u4 needs a phase, e.g. u4:1.5708");
    } else {
        throw ConfigError("named_unitary: unknown name '" + name +
                          "' (expected u2, u3, rot3, u4:<phi>)");
    }
    if (dim_out) *dim_out = static_cast<int>(m.rows());
    return m;
}

Eigen::VectorXcd named_state(const std::string& name, int dim) {
    if (dim == 2) {
        Eigen::VectorXcd v(2);
        const double s = 1.0 / std::sqrt(2.0);
        if (name == "d") { v << s, cplx(0.0, s); return v; }
        if (name == "a") { v << s, cplx(0.0, -s); return v; }
        if (name == "h") { v << s, s; return v; }
        if (name == "v") { v << s, -s; return v; }
    } else if (dim == 3) {
        Eigen::VectorXcd v(3);
        const double s = 1.0 / std::sqrt(3.0);
        const cplx w1 = phase(2.0 * pi / 3.0);
        const cplx w2 = phase(4.0 * pi / 3.0);
        if (name == "mub2_2") { v << s * w1, s * w2, s; return v; }
        if (name == "mub2_3") { v << s * w1, s, s * w2; return v; }
        const double r2 = std::sqrt(2.0);
        const double n = 1.0 / (2.0 * std::sqrt(3.0));
        if (name == "a1") { v << n * (r2 + 1.0), n * (r2 + 1.0), n * (r2 - 2.0); return v; }
        if (name == "a2") { v << n * (r2 - 1.0), n * (r2 - 1.0), n * (r2 + 2.0); return v; }
    }
    throw ConfigError("named_state: unknown state '" + name + "' for dimension " +
                      std::to_string(dim));
}

const char* to_string(InterferenceKind k) {
    switch (k) {
        case InterferenceKind::dip: return "dip";
        case InterferenceKind::bump: return "bump";
        default: return "none";
    }
}

double coincidence_rate(const PairSetup& s) {
    require_unitary(s.unitary, "coincidence_rate");
    const int d = static_cast<int>(s.unitary.rows());
    for (const auto* v : {&s.in1, &s.in2, &s.proj1, &s.proj2}) {
        require_unit_vector(*v, "coincidence_rate");
        if (v->size() != d)
            throw ConfigError("coincidence_rate: state dimension does not match unitary");
    }
    if (s.gamma < -1.0 || s.gamma > 1.0)
        throw ConfigError("coincidence_rate: gamma must lie in [-1, 1]");

    const Eigen::VectorXcd a = s.unitary * s.in1;
    const Eigen::VectorXcd b = s.unitary * s.in2;
    const cplx pa = s.proj1.dot(a);  // <p|U|u>, Eigen dot conjugates the left side
    const cplx pb = s.proj1.dot(b);
    const cplx qa = s.proj2.dot(a);
    const cplx qb = s.proj2.dot(b);

    const double overlap = std::abs(s.proj1.dot(s.proj2));
    if (overlap > 1.0 - 1e-10) {
        const cplx A = pa * pb;
        return (1.0 + s.gamma) * std::norm(A);
    }
    if (overlap > 1e-10)
        throw ConfigError("coincidence_rate: projectors must be identical or orthogonal "
                          "(|<p|q>| = " + std::to_string(overlap) + ")");
    const cplx A = pa * qb;
    const cplx B = pb * qa;
    return std::norm(A) + std::norm(B) + 2.0 * s.gamma * (std::conj(A) * B).real();
}

double visibility(double r_classical, double r_quantum, InterferenceKind kind) {
    if (!(r_classical > 0.0))
        throw ConfigError("visibility: classical rate must be positive");
    switch (kind) {
        case InterferenceKind::dip: return (r_classical - r_quantum) / r_classical;
        case InterferenceKind::bump: return (r_quantum - r_classical) / r_classical;
        default: return 0.0;
    }
}

InterferenceKind classify(double r_classical, double r_quantum, double tol) {
    if (r_quantum < r_classical - tol) return InterferenceKind::dip;
    if (r_quantum > r_classical + tol) return InterferenceKind::bump;
    return InterferenceKind::none;
}

TwoPhotonState transform_pair(const Eigen::MatrixXcd& U, const Eigen::VectorXcd& in1,
                              const Eigen::VectorXcd& in2) {
    require_unitary(U, "transform_pair");
    require_unit_vector(in1, "transform_pair");
    require_unit_vector(in2, "transform_pair");
    const int d = static_cast<int>(U.rows());
    if (in1.size() != d || in2.size() != d)
        throw ConfigError("transform_pair: state dimension does not match unitary");

    const Eigen::VectorXcd a = U * in1;
    const Eigen::VectorXcd b = U * in2;

    TwoPhotonState st;
    st.dim = d;
    st.amp = Eigen::MatrixXcd::Zero(d, d);
    double norm2 = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            // |1_i 1_j> picks up both orderings; |2_i> carries the sqrt(2)
            // of the doubly excited Fock state
            const cplx c = (i == j) ? std::sqrt(2.0) * a(i) * b(i)
                                    : a(i) * b(j) + a(j) * b(i);
            st.amp(i, j) = c;
            norm2 += std::norm(c);
        }
    }
    if (norm2 < 1e-300) throw NumericError("transform_pair: vanishing output state");
    st.amp /= std::sqrt(norm2);

    // global phase: largest amplitude real positive, ties to the first index
    // pair in lexicographic order
    double best = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) best = std::max(best, std::abs(st.amp(i, j)));
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            if (std::abs(st.amp(i, j)) >= best * (1.0 - 1e-12)) {
                const cplx ref = st.amp(i, j) / std::abs(st.amp(i, j));
                st.amp *= std::conj(ref);
                return st;
            }
        }
    }
    return st;
}

}  // namespace homsim
